use rug::Float;
use serde::{Deserialize, Serialize};

use super::{recognize, recognize_with, Bounds, RecognitionResult};
use crate::elliptic::inverse_singular_modulus;
use crate::error::{Error, Result};
use crate::hp::context::MIN_DIGITS;
use crate::hp::{pow_rational_float, HPReal, PrecisionContext, Rational};
use crate::modular::{rrcf, RrcfMethod};
use crate::moebius::{evaluate_product, represent_product, PeriodicCoeffs};
use crate::qengine::{agile_star, theta_general, AgileSpec, Nome, ThetaSpec};
use crate::report::IdentityReport;

/// Where the nome comes from: q = e^{−π√r} for a given r, or for
/// r = k_i(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NomeSource {
    R(Rational),
    InverseModulus(Rational),
}

impl NomeSource {
    pub fn nome(&self, ctx: PrecisionContext) -> Result<Nome> {
        match self {
            NomeSource::R(r) => Nome::new(r, ctx),
            NomeSource::InverseModulus(x) => {
                let r = inverse_singular_modulus(&HPReal::from_rational(x, ctx))?;
                Nome::from_real(&r)
            }
        }
    }
}

impl std::fmt::Display for NomeSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NomeSource::R(r) => write!(f, "r={r}"),
            NomeSource::InverseModulus(x) => write!(f, "r=k_i({x})"),
        }
    }
}

/// A named computation whose value can be recognized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expression {
    /// ([a,p;q]*)^power
    AgileStar {
        spec: AgileSpec,
        nome: NomeSource,
        power: u32,
    },
    /// (q^E·e^{−f(q)})^power for one catoptric period of X
    NormalizedProduct {
        period: Vec<Rational>,
        nome: NomeSource,
        power: u32,
    },
    /// (q^shift·ϑ(num)/ϑ(den))^power
    ThetaQuotient {
        num: ThetaSpec,
        den: ThetaSpec,
        shift: Rational,
        nome: NomeSource,
        power: u32,
    },
    /// R(q)^power
    Rrcf { nome: NomeSource, power: u32 },
    /// A decimal constant taken as given.
    Const { value: String },
}

fn raise(x: HPReal, power: u32) -> Result<HPReal> {
    if power == 1 {
        return Ok(x);
    }
    let ctx = x.ctx();
    HPReal::new(rug::ops::Pow::pow(x.into_value(), power), ctx)
}

impl Expression {
    pub fn evaluate(&self, ctx: PrecisionContext) -> Result<HPReal> {
        match self {
            Expression::AgileStar { spec, nome, power } => {
                raise(agile_star(spec, &nome.nome(ctx)?), *power)
            }
            Expression::NormalizedProduct {
                period,
                nome,
                power,
            } => {
                let pc = PeriodicCoeffs::new(period.clone())?;
                let nome = nome.nome(ctx)?;
                let e = evaluate_product(&represent_product(&pc)?, &nome)?;
                let v = e.into_value() * nome.pow(&pc.normalizing_exponent());
                raise(HPReal::new(v, ctx)?, *power)
            }
            Expression::ThetaQuotient {
                num,
                den,
                shift,
                nome,
                power,
            } => {
                let nome = nome.nome(ctx)?;
                let d = theta_general(den, &nome);
                if d.value().is_zero() {
                    return Err(Error::Singular("theta denominator vanishes".into()));
                }
                let v = theta_general(num, &nome).into_value() / d.value() * nome.pow(shift);
                raise(HPReal::new(v, ctx)?, *power)
            }
            Expression::Rrcf { nome, power } => {
                raise(rrcf(&nome.nome(ctx)?, RrcfMethod::Product)?, *power)
            }
            Expression::Const { value } => {
                HPReal::parse_decimal(value.trim().trim_end_matches("..."), ctx)
            }
        }
    }

    pub fn provenance(&self) -> String {
        match self {
            Expression::AgileStar { spec, nome, power } => {
                format!("([{},{};q]*)^{power} at {nome}", spec.a, spec.p)
            }
            Expression::NormalizedProduct {
                period,
                nome,
                power,
            } => {
                let vals: Vec<String> = period.iter().map(|v| v.to_string()).collect();
                format!(
                    "(q^A e^(-f))^{power} for X = {{{}}} at {nome}",
                    vals.join(",")
                )
            }
            Expression::ThetaQuotient {
                num,
                den,
                shift,
                nome,
                power,
            } => format!(
                "(q^({shift}) theta({},{})/theta({},{}))^{power} at {nome}",
                num.a, num.b, den.a, den.b
            ),
            Expression::Rrcf { nome, power } => format!("R(q)^{power} at {nome}"),
            Expression::Const { value } => format!("constant {value}"),
        }
    }
}

/// Evaluates the expression and recognizes its value.
pub fn recognize_expression(
    expr: &Expression,
    bounds: Bounds,
    ctx: PrecisionContext,
) -> Result<RecognitionResult> {
    let mut result = match expr {
        Expression::Const { value } => {
            let given = significant_digits(value);
            let c = if given < ctx.digits() {
                ctx.with_digits(given.max(MIN_DIGITS))?
            } else {
                ctx
            };
            recognize(&expr.evaluate(c)?, bounds)?
        }
        _ => recognize_with(|c| expr.evaluate(c), bounds, ctx)?,
    };
    result.provenance = Some(expr.provenance());
    Ok(result)
}

/// Significant decimal digits written in a decimal string.
fn significant_digits(s: &str) -> u32 {
    let mantissa = s.trim().split(['e', 'E']).next().unwrap_or("");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    digits.trim_start_matches('0').len() as u32
}

/// One point of an x-grid probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QProbe {
    pub x: Rational,
    pub result: RecognitionResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<IdentityReport>,
}

/// 4(1−x²)/x, the twelfth power of [1,4]* at r = k_i(x).
fn q_one_four(x: &Float) -> Float {
    let prec = x.prec();
    Float::with_val(prec, 1u32 - Float::with_val(prec, x.square_ref())) * 4u32 / x
}

/// 4(1−x)⁴(2+x−2√(1+x))¹²/(x¹³(1+x)²), the 48th power of [1/2,4]*.
fn q_half_four(x: &Float) -> Float {
    use rug::ops::Pow;
    let prec = x.prec();
    let one_plus = Float::with_val(prec, 1u32 + x);
    let inner = Float::with_val(prec, 2u32 + x) - Float::with_val(prec, one_plus.sqrt_ref()) * 2u32;
    let num = Float::with_val(prec, 1u32 - x).pow(4u32) * inner.pow(12u32) * 4u32;
    let den = Float::with_val(prec, x.pow(13u32)) * one_plus.square();
    num / den
}

/// The closed-form comparison for (a,p) ∈ {(1,4), (1/2,4)} at modulus x.
pub fn q_closed_form_check(
    spec: &AgileSpec,
    nome: &Nome,
    x: &Float,
    id: &str,
) -> Result<Option<IdentityReport>> {
    let quarter = Rational::from_int(4);
    if spec.p != quarter {
        return Ok(None);
    }
    let v = agile_star(spec, nome).into_value();
    let tol = nome.ctx().tolerance_exponent();
    if spec.a == Rational::one() {
        let lhs = pow_rational_float(&v, &Rational::from_int(12))?;
        return Ok(Some(IdentityReport::compare(id, &lhs, &q_one_four(x), tol)));
    }
    if spec.a == Rational::new(1, 2)? {
        let lhs = pow_rational_float(&v, &Rational::from_int(48))?;
        return Ok(Some(IdentityReport::compare(
            id,
            &lhs,
            &q_half_four(x),
            tol,
        )));
    }
    Ok(None)
}

/// Recognizes ([a,p; q at r = k_i(x)]*)^power for each x, and checks the
/// known closed forms where they apply.
pub fn probe_q_function(
    spec: &AgileSpec,
    xs: &[Rational],
    power: u32,
    bounds: Bounds,
    ctx: PrecisionContext,
) -> Result<Vec<QProbe>> {
    let mut out = Vec::with_capacity(xs.len());
    for x in xs {
        if !x.is_positive() || x >= &Rational::one() {
            return Err(Error::Domain(format!(
                "probe points must lie in (0,1), got {x}"
            )));
        }
        let source = NomeSource::InverseModulus(x.clone());
        let expr = Expression::AgileStar {
            spec: spec.clone(),
            nome: source.clone(),
            power,
        };
        let result = recognize_expression(&expr, bounds, ctx)?;
        let nome = source.nome(ctx)?;
        let id = format!("q.{}.{}.x{x}", spec.a, spec.p);
        let closed_form = q_closed_form_check(spec, &nome, &x.to_float(ctx.bits()), &id)?;
        out.push(QProbe {
            x: x.clone(),
            result,
            closed_form,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::rat;
    use crate::recognizer::IntegerPolynomial;

    #[test]
    fn agile_one_four_at_one() {
        let ctx = PrecisionContext::new(120).unwrap();
        let expr = Expression::AgileStar {
            spec: AgileSpec::from_ints(1, 4).unwrap(),
            nome: NomeSource::R(rat(1, 1)),
            power: 12,
        };
        let r = recognize_expression(&expr, Bounds::new(4, 6).unwrap(), ctx).unwrap();
        assert!(r.recognized(), "{r:?}");
        assert_eq!(
            r.poly.unwrap(),
            IntegerPolynomial::from_i64(&[-8, 0, 1]).unwrap()
        );
    }

    #[test]
    fn constant_precision_follows_input() {
        let ctx = PrecisionContext::new(120).unwrap();
        let root2 = "1.41421356237309504880168872420969807856967187537694807317667973799...";
        let expr = Expression::Const {
            value: root2.into(),
        };
        let r = recognize_expression(&expr, Bounds::new(2, 1).unwrap(), ctx).unwrap();
        assert_eq!(r.digits, 66);
        assert_eq!(
            r.poly,
            Some(IntegerPolynomial::from_i64(&[-2, 0, 1]).unwrap())
        );
        let short = Expression::Const {
            value: "1.41421356".into(),
        };
        assert!(matches!(
            recognize_expression(&short, Bounds::new(2, 1).unwrap(), ctx),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn q_probe_closed_forms() {
        let ctx = PrecisionContext::new(80).unwrap();
        let spec = AgileSpec::from_ints(1, 4).unwrap();
        let probes =
            probe_q_function(&spec, &[rat(1, 2)], 12, Bounds::new(2, 4).unwrap(), ctx).unwrap();
        assert!(probes[0].result.recognized());
        assert_eq!(
            probes[0].result.poly,
            Some(IntegerPolynomial::from_i64(&[-6, 1]).unwrap())
        );
        assert!(probes[0].closed_form.as_ref().unwrap().passed());
        let half = AgileSpec::new(rat(1, 2), rat(4, 1)).unwrap();
        let nome = NomeSource::InverseModulus(rat(1, 2)).nome(ctx).unwrap();
        let rep = q_closed_form_check(&half, &nome, &rat(1, 2).to_float(ctx.bits()), "h")
            .unwrap()
            .unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}
