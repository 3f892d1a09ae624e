use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use qalg_core::elliptic::{
    ellint_k, elliptic_alpha_real, inverse_singular_modulus, j_invariant_eta, j_invariant_real,
    multiplier, singular_modulus_real,
};
use qalg_core::harness::{emit_report, run_suite, ReportFormat, Suite, Summary};
use qalg_core::hp::{HPReal, PrecisionContext, Rational};
use qalg_core::modular::{rrcf, sextic_theta, RrcfMethod};
use qalg_core::moebius::{
    detect_period, extract_x, represent_product, represent_theta, PeriodicCoeffs, Periodicity,
    TaylorInput,
};
use qalg_core::qengine::{
    agile, agile_star, eta_paper, theta2, theta3, theta_general, AgileSpec, Nome, ThetaSpec,
};
use qalg_core::recognizer::{recognize_expression, Bounds, Expression, NomeSource};
use qalg_core::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_NOT_PERIODIC: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "qalg",
    version,
    about = "High-precision q-series, singular moduli and algebraic recognition"
)]
struct Cli {
    /// Working precision in significant decimal digits.
    #[arg(long, global = true, env = "QALG_DIGITS", default_value_t = 120)]
    digits: u32,

    /// Emit JSON; with a path, write the JSON document there.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "-", value_name = "PATH")]
    json: Option<String>,

    /// Write the output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one quantity.
    Eval(EvalArgs),
    /// Find the Moebius-periodic structure of a Taylor series.
    Analyze(AnalyzeArgs),
    /// Search for an integer polynomial satisfied by a computed value.
    Recognize(RecognizeArgs),
    /// Run an identity suite.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Subject {
    Agile,
    AgileStar,
    Theta,
    Theta2,
    Theta3,
    EtaPaper,
    K,
    Ki,
    #[value(name = "K")]
    #[serde(rename = "K")]
    BigK,
    Alpha,
    J,
    Rrcf,
    SexticTheta,
    Multiplier,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    Product,
    ContinuedFraction,
}

#[derive(Args, Debug, Default, Clone)]
struct Params {
    /// Rational a (n or n/d).
    #[arg(long)]
    a: Option<String>,
    /// Rational p.
    #[arg(long)]
    p: Option<String>,
    /// Rational b (second theta parameter).
    #[arg(long)]
    b: Option<String>,
    /// Nome parameter r, q = exp(-pi sqrt r).
    #[arg(long)]
    r: Option<String>,
    /// Modulus x; as a nome source this means r = k_i(x).
    #[arg(long)]
    x: Option<String>,
    /// Eta multiplier.
    #[arg(long)]
    m: Option<String>,
    /// Multiplier degree.
    #[arg(long)]
    n: Option<u32>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(value_enum)]
    subject: Subject,
    #[command(flatten)]
    params: Params,
    #[arg(long, value_enum, default_value = "product")]
    method: Method,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// TaylorInput JSON file: {"coeffs": ["c1", "c2", ...]}.
    series_file: PathBuf,
    #[arg(long, default_value_t = 60)]
    max_period: usize,
}

#[derive(Args, Debug)]
struct RecognizeArgs {
    /// agile-star, rrcf, normalized or const, optionally followed by a power, e.g. agile-star6.
    #[arg(long)]
    expr: String,
    #[command(flatten)]
    params: Params,
    /// One period of X for `normalized`, comma separated.
    #[arg(long)]
    values: Option<String>,
    /// Decimal value for `const`.
    #[arg(long)]
    value: Option<String>,
    #[arg(long, default_value_t = 4)]
    degree: usize,
    /// Height bound as a number of decimal digits.
    #[arg(long, default_value_t = 7)]
    height: u32,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long)]
    parallelism: Option<usize>,
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        };
        Failure {
            code,
            err: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            err,
        }
    }
}

type CmdResult = Result<Outcome, Failure>;

/// What a command produced: text and JSON renderings plus its exit code.
struct Outcome {
    text: String,
    json: String,
    code: u8,
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        err: anyhow!(msg.into()),
    }
}

fn rational(name: &str, v: &Option<String>) -> Result<Rational, Failure> {
    let s = v
        .as_ref()
        .ok_or_else(|| usage(format!("--{name} is required")))?;
    s.parse::<Rational>()
        .map_err(|e| usage(format!("--{name}: {e}")))
}

fn shown(x: &HPReal, digits: u32) -> String {
    x.to_decimal(digits.saturating_sub(10).max(1) as usize)
}

fn params_json(p: &Params) -> Value {
    let mut m = serde_json::Map::new();
    for (k, v) in [
        ("a", &p.a),
        ("p", &p.p),
        ("b", &p.b),
        ("r", &p.r),
        ("x", &p.x),
        ("m", &p.m),
    ] {
        if let Some(v) = v {
            m.insert(k.into(), json!(v));
        }
    }
    if let Some(n) = p.n {
        m.insert("n".into(), json!(n));
    }
    Value::Object(m)
}

fn nome_source(p: &Params) -> Result<NomeSource, Failure> {
    match (&p.r, &p.x) {
        (Some(_), None) => Ok(NomeSource::R(rational("r", &p.r)?)),
        (None, Some(_)) => Ok(NomeSource::InverseModulus(rational("x", &p.x)?)),
        (Some(_), Some(_)) => Err(usage("give either --r or --x, not both")),
        (None, None) => Err(usage("a nome needs --r or --x")),
    }
}

fn nome_r(p: &Params, ctx: PrecisionContext) -> Result<HPReal, Failure> {
    Ok(match nome_source(p)? {
        NomeSource::R(r) => HPReal::from_rational(&r, ctx),
        NomeSource::InverseModulus(x) => inverse_singular_modulus(&HPReal::from_rational(&x, ctx))?,
    })
}

fn eval_value(args: &EvalArgs, ctx: PrecisionContext) -> Result<HPReal, Failure> {
    let p = &args.params;
    let nome = || -> Result<Nome, Failure> { Ok(nome_source(p)?.nome(ctx)?) };
    let spec = || -> Result<AgileSpec, Failure> {
        Ok(AgileSpec::new(rational("a", &p.a)?, rational("p", &p.p)?)?)
    };
    Ok(match args.subject {
        Subject::Agile => agile(&spec()?, &nome()?),
        Subject::AgileStar => agile_star(&spec()?, &nome()?),
        Subject::Theta => theta_general(
            &ThetaSpec::new(rational("a", &p.a)?, rational("b", &p.b)?)?,
            &nome()?,
        ),
        Subject::Theta2 => theta2(&nome()?),
        Subject::Theta3 => theta3(&nome()?),
        Subject::EtaPaper => {
            let m = match &p.m {
                Some(_) => rational("m", &p.m)?,
                None => Rational::one(),
            };
            eta_paper(&m, &nome()?)?
        }
        Subject::K => singular_modulus_real(&nome_r(p, ctx)?)?,
        Subject::Ki => {
            inverse_singular_modulus(&HPReal::from_rational(&rational("x", &p.x)?, ctx))?
        }
        Subject::BigK => match (&p.x, &p.r) {
            (Some(_), None) => ellint_k(&HPReal::from_rational(&rational("x", &p.x)?, ctx))?,
            _ => ellint_k(&singular_modulus_real(&nome_r(p, ctx)?)?)?,
        },
        Subject::Alpha => elliptic_alpha_real(&nome_r(p, ctx)?)?,
        Subject::J => match nome_source(p)? {
            NomeSource::R(_) => j_invariant_real(&nome_r(p, ctx)?)?,
            NomeSource::InverseModulus(_) => j_invariant_eta(&nome()?)?,
        },
        Subject::Rrcf => {
            let method = match args.method {
                Method::Product => RrcfMethod::Product,
                Method::ContinuedFraction => RrcfMethod::ContinuedFraction,
            };
            rrcf(&nome()?, method)?
        }
        Subject::SexticTheta => sextic_theta(&nome()?)?,
        Subject::Multiplier => {
            let n = p.n.ok_or_else(|| usage("--n is required"))?;
            multiplier(&rational("r", &p.r)?, n, ctx)?
        }
    })
}

#[derive(Serialize)]
struct EvalOutput {
    subject: String,
    params: Value,
    digits: u32,
    shown_digits: u32,
    value: String,
}

fn cmd_eval(args: &EvalArgs, ctx: PrecisionContext) -> CmdResult {
    let v = eval_value(args, ctx)?;
    let value = shown(&v, ctx.digits());
    let subject = serde_json::to_value(args.subject).expect("subject serializes");
    let name = subject.as_str().unwrap_or_default().to_string();
    Ok(Outcome {
        text: format!(
            "{name} = {value}\n(shown to {} significant digits)\n",
            ctx.digits().saturating_sub(10)
        ),
        json: pretty(&EvalOutput {
            subject: name,
            params: params_json(&args.params),
            digits: ctx.digits(),
            shown_digits: ctx.digits().saturating_sub(10),
            value,
        }),
        code: 0,
    })
}

fn factor_list(pc: &PeriodicCoeffs) -> Result<(String, Value), Failure> {
    let product = represent_product(pc)?;
    let theta = represent_theta(pc)?;
    let prod_text: Vec<String> = product
        .iter()
        .map(|f| format!("[{},{}]^({})", f.spec.a, f.spec.p, f.exponent))
        .collect();
    let mut theta_text = vec![format!(
        "eta({}tau)^({})",
        theta.eta_multiplier, theta.eta_exponent
    )];
    theta_text.extend(
        theta
            .factors
            .iter()
            .map(|(s, e)| format!("theta({},{})^({})", s.a, s.b, e)),
    );
    let text = format!(
        "product: {}\ntheta: {}\n",
        if prod_text.is_empty() {
            "1".to_string()
        } else {
            prod_text.join(" ")
        },
        theta_text.join(" ")
    );
    let value = json!({ "product": product, "theta": theta });
    Ok((text, value))
}

fn cmd_analyze(args: &AnalyzeArgs) -> CmdResult {
    let raw = fs::read_to_string(&args.series_file)
        .with_context(|| format!("reading {}", args.series_file.display()))?;
    let input = TaylorInput::from_json(&raw)?;
    let x = extract_x(&input);
    let shown_x: Vec<String> = x.iter().take(24).map(|v| v.to_string()).collect();
    let mut text = format!(
        "X(n): {}{}\n",
        shown_x.join(", "),
        if x.len() > 24 { ", ..." } else { "" }
    );
    let periodicity = detect_period(&x, args.max_period)?;
    let mut doc = json!({ "X": x, "periodicity": periodicity });
    match &periodicity {
        Periodicity::Periodic(pc) => {
            text.push_str(&format!(
                "period T = {}\ncatoptric: {}\nA = {}\n",
                pc.period, pc.catoptric, pc.a
            ));
            if pc.catoptric {
                let (t, v) = factor_list(pc)?;
                text.push_str(&t);
                doc["representation"] = v;
            } else {
                text.push_str("not catoptric: no agile representation\n");
            }
            Ok(Outcome {
                text,
                json: pretty(&doc),
                code: 0,
            })
        }
        Periodicity::Linear { exponent } => {
            text.push_str(&format!(
                "period T = 1 (degenerate)\nA = 0\nproduct: (1-x)^({exponent})\n"
            ));
            Ok(Outcome {
                text,
                json: pretty(&doc),
                code: 0,
            })
        }
        Periodicity::NotPeriodic => {
            text.push_str(&format!(
                "not periodic within max period {}\n",
                args.max_period
            ));
            Ok(Outcome {
                text,
                json: pretty(&doc),
                code: EXIT_NOT_PERIODIC,
            })
        }
    }
}

/// Splits "agile-star6" into ("agile-star", 6).
fn split_power(expr: &str) -> Result<(&str, u32), Failure> {
    let base = expr.trim_end_matches(|c: char| c.is_ascii_digit());
    let digits = &expr[base.len()..];
    let power = if digits.is_empty() {
        1
    } else {
        digits
            .parse()
            .map_err(|_| usage(format!("bad power in --expr {expr}")))?
    };
    if power == 0 {
        return Err(usage("power must be positive"));
    }
    Ok((base, power))
}

fn build_expression(args: &RecognizeArgs) -> Result<Expression, Failure> {
    let (base, power) = split_power(&args.expr)?;
    let p = &args.params;
    Ok(match base {
        "agile-star" => Expression::AgileStar {
            spec: AgileSpec::new(rational("a", &p.a)?, rational("p", &p.p)?)?,
            nome: nome_source(p)?,
            power,
        },
        "rrcf" => Expression::Rrcf {
            nome: nome_source(p)?,
            power,
        },
        "normalized" => {
            let raw = args
                .values
                .as_ref()
                .ok_or_else(|| usage("--values is required for normalized"))?;
            let period = raw
                .split(',')
                .map(|s| {
                    s.parse::<Rational>()
                        .map_err(|e| usage(format!("--values: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Expression::NormalizedProduct {
                period,
                nome: nome_source(p)?,
                power,
            }
        }
        "const" => {
            if power != 1 && args.expr != "const" {
                return Err(usage("const takes no power"));
            }
            let value = args
                .value
                .clone()
                .ok_or_else(|| usage("--value is required for const"))?;
            Expression::Const { value }
        }
        other => {
            return Err(usage(format!(
                "unknown expression {other:?}; expected agile-star, rrcf, normalized or const"
            )))
        }
    })
}

fn cmd_recognize(args: &RecognizeArgs, ctx: PrecisionContext) -> CmdResult {
    let expr = build_expression(args)?;
    let bounds = Bounds::new(args.degree, args.height)?;
    let result = match recognize_expression(&expr, bounds, ctx) {
        Err(Error::InsufficientPrecision { needed, have }) => {
            return Err(Failure {
                code: EXIT_DOMAIN,
                err: anyhow!(
                    "degree {} with height 10^{} needs at least {needed} digits, have {have}; rerun with --digits {needed} or more",
                    args.degree,
                    args.height
                ),
            })
        }
        other => other?,
    };
    let poly = result
        .poly
        .as_ref()
        .map_or_else(|| "none".to_string(), |p| p.to_string());
    let text = format!(
        "{}\nstatus: {}\npolynomial: {poly}\nresidual: {}\nverified residual: {}\ndigits: {}\n",
        result.provenance.clone().unwrap_or_default(),
        result.status,
        result.residual,
        result.verified_residual,
        result.digits
    );
    Ok(Outcome {
        text,
        json: pretty(&result),
        code: 0,
    })
}

fn cmd_verify(args: &VerifyArgs, digits: u32) -> CmdResult {
    let suite: Suite = args
        .suite
        .parse()
        .map_err(|e: Error| usage(e.to_string()))?;
    let threads = args
        .parallelism
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let reports = run_suite(suite, digits, threads)?;
    let name = suite.to_string();
    let text = emit_report(&name, digits, &reports, ReportFormat::Text);
    let json = emit_report(&name, digits, &reports, ReportFormat::Json);
    let code = if Summary::of(&reports).fail == 0 {
        0
    } else {
        EXIT_VERIFY
    };
    Ok(Outcome { text, json, code })
}

fn write(path: &PathBuf, body: &str) -> Result<(), Failure> {
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let ctx = PrecisionContext::new(cli.digits).map_err(|e| usage(e.to_string()))?;
    let outcome = match &cli.command {
        Command::Eval(a) => cmd_eval(a, ctx)?,
        Command::Analyze(a) => cmd_analyze(a)?,
        Command::Recognize(a) => cmd_recognize(a, ctx)?,
        Command::Verify(a) => cmd_verify(a, cli.digits)?,
    };
    let json_body = format!("{}\n", outcome.json);
    let body = match cli.json.as_deref() {
        Some("-") => json_body.clone(),
        Some(path) => {
            write(&PathBuf::from(path), &json_body)?;
            outcome.text.clone()
        }
        None => outcome.text.clone(),
    };
    match &cli.out {
        Some(path) => write(path, &body)?,
        None => print!("{body}"),
    }
    Ok(outcome.code)
}

const COMMANDS: [&str; 4] = ["eval", "analyze", "recognize", "verify"];

/// `--json` followed by a command name is the bare flag, not a path.
fn normalize_args(args: impl Iterator<Item = std::ffi::OsString>) -> Vec<std::ffi::OsString> {
    let args: Vec<_> = args.collect();
    let mut out = Vec::with_capacity(args.len());
    for (i, a) in args.iter().enumerate() {
        let next_is_command = args
            .get(i + 1)
            .and_then(|n| n.to_str())
            .is_some_and(|n| COMMANDS.contains(&n) || n.starts_with('-'));
        if a == "--json" && next_is_command {
            out.push("--json=-".into());
        } else {
            out.push(a.clone());
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(normalize_args(std::env::args_os())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
