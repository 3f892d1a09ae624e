use rug::ops::Pow;
use rug::Float;

use super::{IdentityCheck, Suite};
use crate::elliptic::{
    ellint_k, elliptic_alpha, inverse_singular_modulus, j_invariant, j_invariant_eta_double_shift,
    powersum_closed_form, singular_modulus, singular_modulus_real, JRoute, OddPowersumReading,
};
use crate::error::{Error, Result};
use crate::hp::{pi_const, rat, FormalSeries, HPReal, PrecisionContext, Rational};
use crate::modular::{
    eq39_series_check, eq43_derivative_check, eq9_series_check, klein_j_from_r, modular5_check,
    ramanujan_modular5_check, rrcf, sextic_theta, sextic_theta_from_rrcf, sextic_y_check,
    solve_sextic, theorem3_check, theorem3_sides, theorem4_check, theta_moduli, BetaArgument,
    HermiteReading, RrcfMethod, SexticInstance,
};
use crate::moebius::{
    conjecture2_etaquotient, evaluate_product, evaluate_theta, exponent_a, lambert_series,
    logderiv_representation, product_qexpansion, represent_product, represent_theta, taylor_from_x,
    JacobiCharacter, PeriodicCoeffs, Sequence,
};
use crate::qengine::{
    agile, agile_qexpansion, eta_log_derivative, eta_paper, eta_qexpansion, m_series, tau_star,
    theta_general, theta_log_derivative, theta_powersum, theta_qexpansion, AgileSpec, Nome,
    ThetaSpec,
};
use crate::recognizer::{
    q_closed_form_check, recognize_expression, Bounds, Expression, IntegerPolynomial, NomeSource,
};
use crate::report::IdentityReport;

use Suite::{Conjectures as CJ, PaperCore as PC, SeriesExact as SE};

/// Equation and theorem anchors that must each be exercised by some check.
pub const REQUIRED_ANCHORS: &[&str] = &[
    "eq1", "eq2", "eq3", "eq4", "eq5", "eq6", "eq7", "eq8", "eq9", "eq10", "eq13", "eq14", "eq15",
    "eq16", "eq17", "eq18", "eq19", "eq20", "eq21", "eq22", "eq23", "eq24", "eq25", "eq26", "eq27",
    "eq28", "eq29", "eq30", "eq32", "eq33", "eq34", "eq35", "eq36", "eq39", "eq40", "eq41", "eq43",
    "eq44", "eq45", "eq46", "eq47", "eq48", "eq49", "eq50", "eq52", "eq53", "eq54", "eq55", "eq56",
    "eq57", "eq58", "eq59", "thm3", "thm4", "ex1", "ex2", "ex3",
];

const SERIES_ORDER: usize = 100;

fn cmp(lhs: &Float, rhs: &Float, ctx: PrecisionContext) -> IdentityReport {
    IdentityReport::compare("", lhs, rhs, ctx.tolerance_exponent())
}

fn zero(ctx: PrecisionContext) -> Float {
    Float::with_val(ctx.bits(), 0)
}

fn nome(r: &Rational, ctx: PrecisionContext) -> Result<Nome> {
    Nome::new(r, ctx)
}

fn tag(r: &Rational) -> String {
    r.to_string().replace('/', "_")
}

fn sqrt_f(x: &Float) -> Float {
    Float::with_val(x.prec(), x.sqrt_ref())
}

fn root_f(x: &Float, n: u32) -> Float {
    Float::with_val(x.prec(), x.root_ref(n))
}

/// K(k′)/K(k) = √r at k = k_r.
fn eq01(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq01.k_r.r{}", tag(&r)),
        &[PC],
        &["eq1", "eq2"],
        move |ctx| {
            let k = singular_modulus(&rr, ctx)?;
            let kp = HPReal::new(
                sqrt_f(&Float::with_val(
                    ctx.bits(),
                    1u32 - Float::with_val(ctx.bits(), k.value().square_ref()),
                )),
                ctx,
            )?;
            let ratio = ellint_k(&kp)?.into_value() / ellint_k(&k)?.value();
            Ok(cmp(&ratio, &sqrt_f(&rr.to_float(ctx.bits())), ctx))
        },
    )
    .param("r", r)
}

/// k_{k_i(x)} = x.
fn eq50(x: Rational) -> IdentityCheck {
    let xx = x.clone();
    IdentityCheck::new(
        format!("eq50.inverse.x{}", tag(&x)),
        &[PC],
        &["eq50"],
        move |ctx| {
            let r = inverse_singular_modulus(&HPReal::from_rational(&xx, ctx))?;
            let back = singular_modulus_real(&r)?;
            Ok(cmp(back.value(), &xx.to_float(ctx.bits()), ctx))
        },
    )
    .param("x", x)
}

fn eq03(r: Rational) -> [IdentityCheck; 2] {
    let (r1, r2) = (r.clone(), r.clone());
    [
        IdentityCheck::new(
            format!("eq03.modular5.r{}", tag(&r)),
            &[PC],
            &["eq3", "eq6"],
            move |ctx| Ok(modular5_check(&nome(&r1, ctx)?, HermiteReading::Swapped)?.0),
        )
        .param("r", r.clone()),
        IdentityCheck::new(
            format!("eq04.depressed.r{}", tag(&r)),
            &[PC],
            &["eq4", "eq6"],
            move |ctx| {
                Ok(modular5_check(&nome(&r2, ctx)?, HermiteReading::Swapped)?
                    .1
                    .with_note("u = k_25r^(1/4), v = k_r^(1/4)"))
            },
        )
        .param("r", r),
    ]
}

fn eq04_as_printed() -> IdentityCheck {
    IdentityCheck::new("eq04.as_printed.r1", &[PC], &["eq4"], |ctx| {
        Ok(
            modular5_check(&nome(&Rational::one(), ctx)?, HermiteReading::AsPrinted)?
                .1
                .with_note("u = k_r^(1/4), v = k_25r^(1/4) as printed; does not vanish"),
        )
    })
    .param("r", Rational::one())
    .recorded()
}

fn eq05(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq05.k_theta.r{}", tag(&r)),
        &[PC],
        &["eq5"],
        move |ctx| {
            let (k, _) = theta_moduli(&nome(&rr, ctx)?)?;
            Ok(cmp(k.value(), singular_modulus(&rr, ctx)?.value(), ctx))
        },
    )
    .param("r", r)
}

fn eq06(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq06.k25_theta.r{}", tag(&r)),
        &[PC],
        &["eq6"],
        move |ctx| {
            let (k25, _) = theta_moduli(&nome(&rr, ctx)?.power(&Rational::from_int(5))?)?;
            let direct = singular_modulus(&(&rr * &Rational::from_int(25)), ctx)?;
            Ok(cmp(k25.value(), direct.value(), ctx))
        },
    )
    .param("r", r)
}

fn eq07(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq07.rrcf.r{}", tag(&r)),
        &[PC],
        &["eq7", "ex1"],
        move |ctx| {
            let n = nome(&rr, ctx)?;
            let p = rrcf(&n, RrcfMethod::Product)?;
            let c = rrcf(&n, RrcfMethod::ContinuedFraction)?;
            Ok(cmp(p.value(), c.value(), ctx))
        },
    )
    .param("r", r)
}

fn eq08(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq08.klein.r{}", tag(&r)),
        &[PC],
        &["eq8", "eq10"],
        move |ctx| {
            let n2 = nome(&rr, ctx)?.power(&Rational::from_int(2))?;
            let klein = klein_j_from_r(&rrcf(&n2, RrcfMethod::Product)?)?;
            let j = j_invariant(&rr, JRoute::Modulus, ctx)?;
            Ok(IdentityReport::compare_relative(
                "",
                klein.value(),
                j.value(),
                ctx.tolerance_exponent(),
            ))
        },
    )
    .param("r", r)
}

fn eq09(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq09.ramanujan5.r{}", tag(&r)),
        &[PC],
        &["eq9"],
        move |ctx| ramanujan_modular5_check(&nome(&rr, ctx)?),
    )
    .param("r", r)
}

/// b²/20a + bY + aY² = cY^{5/3} with a=1, b=250, c=20, so j = 8000.
fn eq13() -> IdentityCheck {
    IdentityCheck::new("eq13.sextic_solve.j8000", &[PC], &["eq13", "eq14"], |ctx| {
        let inst = SexticInstance::new(
            HPReal::from_i64(1, ctx),
            HPReal::from_i64(250, ctx),
            HPReal::from_i64(20, ctx),
        )?;
        let sol = solve_sextic(&inst, ctx)?;
        let theta = sextic_theta(&nome(&rat(2, 1), ctx)?)?;
        let rep = cmp(sol.y.value(), theta.value(), ctx);
        let res = inst.residual(sol.y.value()).abs();
        if crate::hp::real::below_pow10(&res, ctx.tolerance_exponent()) {
            Ok(rep.with_note(format!("recovered r = {}", sol.r.to_decimal(20))))
        } else {
            Ok(IdentityReport::compare(
                "",
                &res,
                &zero(ctx),
                ctx.tolerance_exponent(),
            ))
        }
    })
}

fn eq16(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq16.eta_j.r{}", tag(&r)),
        &[PC],
        &["eq16", "eq15", "eq10"],
        move |ctx| {
            let eta = j_invariant(&rr, JRoute::Eta, ctx)?;
            let modulus = j_invariant(&rr, JRoute::Modulus, ctx)?;
            Ok(IdentityReport::compare_relative(
                "",
                eta.value(),
                modulus.value(),
                ctx.tolerance_exponent(),
            ))
        },
    )
    .param("r", r)
}

fn eq16_double_shift() -> IdentityCheck {
    IdentityCheck::new("eq16.double_shift.r2", &[PC], &["eq16"], |ctx| {
        let r = rat(2, 1);
        let shifted = j_invariant_eta_double_shift(&nome(&r, ctx)?)?;
        let j = j_invariant(&r, JRoute::Modulus, ctx)?;
        Ok(IdentityReport::compare_relative(
            "",
            shifted.value(),
            j.value(),
            ctx.tolerance_exponent(),
        )
        .with_note("eta ratio with q^(-1/24) applied on top of a shifted eta; does not match"))
    })
    .recorded()
}

/// η(τ)⁸ = 2^{8/3}π⁻⁴ q^{−1/3} k^{2/3} k′^{8/3} K⁴.
fn eq17(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq17.eta_k.r{}", tag(&r)),
        &[PC],
        &["eq17", "eq15"],
        move |ctx| {
            let prec = ctx.bits();
            let n = nome(&rr, ctx)?;
            let lhs = Float::with_val(
                prec,
                Pow::pow(eta_paper(&Rational::one(), &n)?.value(), 8u32),
            );
            let k = singular_modulus(&rr, ctx)?.into_value();
            let kp = sqrt_f(&Float::with_val(
                prec,
                1u32 - Float::with_val(prec, k.square_ref()),
            ));
            let big_k = ellint_k(&HPReal::new(k.clone(), ctx)?)?.into_value();
            let pi = pi_const(ctx).into_value();
            let c = Float::with_val(prec, 2).pow(Float::with_val(prec, 8) / 3u32) / pi.pow(4u32);
            let rhs = c
                * n.pow(&rat(-1, 3))
                * Float::with_val(prec, k.square_ref()).cbrt()
                * Float::with_val(prec, Pow::pow(&kp, 8u32)).cbrt()
                * big_k.pow(4u32);
            Ok(cmp(&lhs, &rhs, ctx))
        },
    )
    .param("r", r)
}

fn eq22(name: &str, values: &'static [i64], expected: Rational) -> IdentityCheck {
    IdentityCheck::new(
        format!("eq22.exponent.{name}"),
        &[PC],
        &["eq22", "eq20", "eq21"],
        move |_| {
            let pc = PeriodicCoeffs::from_ints(values)?;
            Ok(IdentityReport::rational("", &exponent_a(&pc), &expected))
        },
    )
}

/// [a,p;q] = (M(−q^{−a},q^p) − q^a M(−q^a,q^p))/η(pτ).
fn eq28() -> IdentityCheck {
    IdentityCheck::new("eq28.m_series.a1p5.r2", &[PC], &["eq27", "eq28"], |ctx| {
        let prec = ctx.bits();
        let n = nome(&rat(2, 1), ctx)?;
        let (a, p) = (Rational::one(), rat(5, 1));
        let qa = n.pow(&a);
        let qp = HPReal::new(n.pow(&p), ctx)?;
        let m1 = m_series(&HPReal::new(-n.pow(&-&a), ctx)?, &qp)?;
        let m2 = m_series(&HPReal::new(-qa.clone(), ctx)?, &qp)?;
        let num = Float::with_val(prec, m1.value() - Float::with_val(prec, &qa * m2.value()));
        let rhs = num / eta_paper(&p, &n)?.value();
        Ok(cmp(agile(&AgileSpec::new(a, p)?, &n).value(), &rhs, ctx))
    })
}

fn eq30(a: Rational, p: Rational, shift: Rational) -> IdentityCheck {
    let (aa, pp, ss) = (a.clone(), p.clone(), shift.clone());
    IdentityCheck::new(
        format!("eq30.tau_star.a{}p{}.to{}", tag(&a), tag(&p), tag(&shift)),
        &[PC],
        &["eq29", "eq30"],
        move |ctx| {
            let n = nome(&Rational::one(), ctx)?;
            let lhs = tau_star(&AgileSpec::extended(aa.clone(), pp.clone())?, &n)?;
            let rhs = tau_star(&AgileSpec::extended(ss.clone(), pp.clone())?, &n)?;
            Ok(cmp(lhs.value(), rhs.value(), ctx))
        },
    )
    .param("a", a)
    .param("p", p)
}

fn eq32(name: &str, values: &'static [i64], r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq32.theta_rep.{name}.r{}", tag(&r)),
        &[PC],
        &["eq32", "eq25"],
        move |ctx| {
            let pc = PeriodicCoeffs::from_ints(values)?;
            let n = nome(&rr, ctx)?;
            let prod = evaluate_product(&represent_product(&pc)?, &n)?;
            let theta = evaluate_theta(&represent_theta(&pc)?, &n)?;
            Ok(cmp(prod.value(), theta.value(), ctx))
        },
    )
    .param("r", r)
}

fn eq33(a: i64, p: i64, r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq33.theta_agile.a{a}p{p}.r{}", tag(&r)),
        &[PC],
        &["eq33", "eq18", "eq26", "eq15"],
        move |ctx| {
            let n = nome(&rr, ctx)?;
            let spec = AgileSpec::from_ints(a, p)?;
            let pr = Rational::from_int(p);
            let rhs = Float::with_val(
                ctx.bits(),
                eta_paper(&pr, &n)?.value() * agile(&spec, &n).value(),
            );
            let lhs = theta_general(&ThetaSpec::for_agile(&spec.a, &spec.p)?, &n);
            Ok(cmp(lhs.value(), &rhs, ctx))
        },
    )
    .param("r", r)
}

fn eq34(name: &str, values: &'static [i64]) -> IdentityCheck {
    IdentityCheck::new(
        format!("eq34.lambert.{name}.r1"),
        &[PC],
        &["eq34"],
        move |ctx| {
            let pc = PeriodicCoeffs::from_ints(values)?;
            let n = nome(&Rational::one(), ctx)?;
            let l = lambert_series(&pc, &n)?;
            let d = logderiv_representation(&pc, &n)?;
            Ok(cmp(l.value(), d.value(), ctx))
        },
    )
}

fn theta5(b: i64) -> Result<ThetaSpec> {
    ThetaSpec::new(rat(5, 2), rat(b, 2))
}

fn eq35(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq35.n5.r{}", tag(&r)),
        &[PC],
        &["eq35", "ex1"],
        move |ctx| {
            let n = nome(&rr, ctx)?;
            let l = lambert_series(&JacobiCharacter::new(5)?, &n)?;
            let d3 = theta_log_derivative(&theta5(3)?, &n)?;
            let d1 = theta_log_derivative(&theta5(1)?, &n)?;
            let rhs = Float::with_val(ctx.bits(), d1.value() - d3.value());
            Ok(cmp(l.value(), &rhs, ctx))
        },
    )
    .param("r", r)
}

/// ϑ(5/2,3/2)/ϑ(5/2,1/2) = q^{−1/5}R(q) with R from the continued fraction.
fn eq35_ratio() -> IdentityCheck {
    IdentityCheck::new("eq35.rrcf_ratio.r1", &[PC], &["eq35", "eq7"], |ctx| {
        let n = nome(&Rational::one(), ctx)?;
        let ratio =
            theta_general(&theta5(3)?, &n).into_value() / theta_general(&theta5(1)?, &n).value();
        let r = rrcf(&n, RrcfMethod::ContinuedFraction)?.into_value() * n.pow(&rat(-1, 5));
        Ok(cmp(&ratio, &r, ctx))
    })
}

/// S(q) − 5S(q⁵) = −q d/dq log(ϑ(5/2,1/2)ϑ(5/2,3/2)/η(5τ)²).
fn eq36(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq36.lambert5.r{}", tag(&r)),
        &[PC],
        &["eq36"],
        move |ctx| {
            let prec = ctx.bits();
            let n = nome(&rr, ctx)?;
            let one = |_: u64| Rational::one();
            let s1 = lambert_series(&one, &n)?;
            let s5 = lambert_series(&one, &n.power(&rat(5, 1))?)?;
            let lhs = Float::with_val(prec, s1.value() - Float::with_val(prec, s5.value() * 5u32));
            let t = Float::with_val(
                prec,
                theta_log_derivative(&theta5(1)?, &n)?.value()
                    + theta_log_derivative(&theta5(3)?, &n)?.value(),
            );
            let e = eta_log_derivative(&rat(5, 1), &n)?.into_value() * 2u32;
            Ok(cmp(&lhs, &(e - t), ctx))
        },
    )
    .param("r", r)
}

fn eq39(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq39.bridge.r{}", tag(&r)),
        &[PC],
        &["eq39"],
        move |ctx| {
            let n = nome(&rr, ctx)?;
            Ok(cmp(
                sextic_theta(&n)?.value(),
                sextic_theta_from_rrcf(&n)?.value(),
                ctx,
            ))
        },
    )
    .param("r", r)
}

fn eq39_worked() -> IdentityCheck {
    IdentityCheck::new("eq39.theta_value.r1_5", &[PC], &["eq39", "thm3"], |ctx| {
        let prec = ctx.bits();
        let theta = sextic_theta(&nome(&rat(1, 5), ctx)?)?;
        let five = Float::with_val(prec, 5);
        let expected = sqrt_f(&five) * 5u32;
        Ok(cmp(theta.value(), &expected, ctx))
    })
}

fn thm3(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("thm3.r{}", tag(&r)),
        &[PC],
        &["thm3", "eq40", "eq41"],
        move |ctx| theorem3_check(&rr, ctx).map(|rep| rep.with_note("Beta at k_4r squared")),
    )
    .param("r", r)
}

fn thm3_as_printed() -> IdentityCheck {
    IdentityCheck::new("thm3.as_printed.r1", &[PC], &["thm3", "eq40"], |ctx| {
        let (l, r) = theorem3_sides(&Rational::one(), BetaArgument::AsPrinted, ctx)?;
        Ok(cmp(l.value(), r.value(), ctx).with_note("Beta at k_4r as printed; does not match"))
    })
    .recorded()
}

/// The nested radical given for k_{4/5}.
pub(crate) fn k45_radical(prec: u32) -> Float {
    let five = Float::with_val(prec, 5);
    let inner = sqrt_f(&(sqrt_f(&five) - 2u32)) * 4u32;
    let s = sqrt_f(&(Float::with_val(prec, 2) - inner));
    Float::with_val(prec, 2u32 - &s) / (s + 2u32)
}

fn thm3_radical() -> IdentityCheck {
    IdentityCheck::new("thm3.k4_5_radical", &[PC], &["thm3", "eq41"], |ctx| {
        let k = singular_modulus(&rat(4, 5), ctx)?;
        Ok(cmp(&k45_radical(ctx.bits()), k.value(), ctx))
    })
}

fn eq43(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq43.derivative.r{}", tag(&r)),
        &[PC],
        &["eq43"],
        move |ctx| eq43_derivative_check(&rr, ctx),
    )
    .param("r", r)
}

fn eq44(g: u64) -> IdentityCheck {
    IdentityCheck::new(
        format!("eq44.lambert.g{g}.r1"),
        &[PC],
        &["eq44", "ex1"],
        move |ctx| {
            let chi = JacobiCharacter::new(g)?;
            let pc = PeriodicCoeffs::from_character(&chi)?;
            let n = nome(&Rational::one(), ctx)?;
            let l = lambert_series(&chi, &n)?;
            let d = logderiv_representation(&pc, &n)?;
            Ok(cmp(l.value(), d.value(), ctx))
        },
    )
}

/// 1 − 24S(q) = 6/(π√r) + 4K²(−6α + √r(1+k²))/(π²√r).
fn eq46(r: Rational) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq46.eisenstein.r{}", tag(&r)),
        &[PC],
        &["eq46"],
        move |ctx| {
            let prec = ctx.bits();
            let n = nome(&rr, ctx)?;
            let s = -eta_log_derivative(&Rational::one(), &n)?.into_value();
            let lhs = Float::with_val(prec, 1u32 - s * 24u32);
            let k = singular_modulus(&rr, ctx)?;
            let big_k = ellint_k(&k)?.into_value();
            let alpha = elliptic_alpha(&rr, ctx)?.into_value();
            let sr = sqrt_f(&rr.to_float(prec));
            let pi = pi_const(ctx).into_value();
            let first = Float::with_val(prec, 6u32 / Float::with_val(prec, &pi * &sr));
            let one_k2 =
                Float::with_val(prec, 1u32 + Float::with_val(prec, k.value().square_ref()));
            let bracket = Float::with_val(prec, &sr * one_k2) - alpha * 6u32;
            let second = big_k.square() * bracket * 4u32 / (pi.square() * &sr);
            Ok(cmp(&lhs, &(first + second), ctx))
        },
    )
    .param("r", r)
}

fn eq47(m: i64, r: Rational) -> IdentityCheck {
    let rr = r.clone();
    let (id, anchors): (String, &[&'static str]) = if m % 2 == 0 {
        (
            format!("eq47.powersum.m{m}.r{}", tag(&r)),
            &["eq47", "eq49"],
        )
    } else {
        (
            format!("eq48.powersum.m{m}.r{}", tag(&r)),
            &["eq48", "eq49"],
        )
    };
    IdentityCheck::new(id, &[PC], anchors, move |ctx| {
        let n = nome(&rr, ctx)?;
        let direct = theta_powersum(m, &n);
        let closed = powersum_closed_form(m, &n, OddPowersumReading::Corrected)?;
        let rep = cmp(direct.value(), closed.value(), ctx);
        Ok(if m % 2 == 0 {
            rep
        } else {
            rep.with_note("k22 = sqrt(1 - k21^2)")
        })
    })
    .param("r", r)
}

fn eq48_as_printed() -> IdentityCheck {
    IdentityCheck::new("eq48.as_printed.m1.r1", &[PC], &["eq48"], |ctx| {
        let n = nome(&Rational::one(), ctx)?;
        let direct = theta_powersum(1, &n);
        let closed = powersum_closed_form(1, &n, OddPowersumReading::AsPrinted)?;
        Ok(cmp(direct.value(), closed.value(), ctx)
            .with_note("k22 = sqrt(1 - k12^2) as printed; does not match"))
    })
    .recorded()
}

fn q_check(
    id: String,
    spec: AgileSpec,
    source: NomeSource,
    x_of: fn(&NomeSource, PrecisionContext) -> Result<Float>,
) -> impl Fn(PrecisionContext) -> Result<IdentityReport> {
    move |ctx| {
        let n = source.nome(ctx)?;
        let x = x_of(&source, ctx)?;
        q_closed_form_check(&spec, &n, &x, &id)?
            .ok_or_else(|| Error::Domain("no closed form for this agile".into()))
    }
}

fn x_of_inverse(s: &NomeSource, ctx: PrecisionContext) -> Result<Float> {
    match s {
        NomeSource::InverseModulus(x) => Ok(x.to_float(ctx.bits())),
        NomeSource::R(r) => Ok(singular_modulus(r, ctx)?.into_value()),
    }
}

fn eq53(x: Rational) -> [IdentityCheck; 2] {
    let s = NomeSource::InverseModulus(x.clone());
    [
        IdentityCheck::new(
            format!("eq53.q1_4.x{}", tag(&x)),
            &[PC],
            &["eq53", "eq52"],
            q_check(
                String::new(),
                AgileSpec::from_ints(1, 4).expect("1 < 4"),
                s.clone(),
                x_of_inverse,
            ),
        )
        .param("x", x.clone()),
        IdentityCheck::new(
            format!("eq54.q1_2_4.x{}", tag(&x)),
            &[PC],
            &["eq54", "eq52"],
            q_check(
                String::new(),
                AgileSpec::new(rat(1, 2), rat(4, 1)).expect("1/2 < 4"),
                s,
                x_of_inverse,
            ),
        )
        .param("x", x),
    ]
}

fn eq55(r: Rational) -> [IdentityCheck; 2] {
    let s = NomeSource::R(r.clone());
    [
        IdentityCheck::new(
            format!("eq55.q1_4.r{}", tag(&r)),
            &[CJ],
            &["eq55", "eq57"],
            q_check(
                String::new(),
                AgileSpec::from_ints(1, 4).expect("1 < 4"),
                s.clone(),
                x_of_inverse,
            ),
        )
        .param("r", r.clone()),
        IdentityCheck::new(
            format!("eq56.q1_2_4.r{}", tag(&r)),
            &[CJ],
            &["eq56", "eq57"],
            q_check(
                String::new(),
                AgileSpec::new(rat(1, 2), rat(4, 1)).expect("1/2 < 4"),
                s,
                x_of_inverse,
            ),
        )
        .param("r", r),
    ]
}

/// q^{−1/12}e^{−f} at q = e^{−π} for X = {1,1,0}.
fn example2() -> IdentityCheck {
    IdentityCheck::new("ex2.value.r1", &[PC], &["ex2", "eq21", "eq22"], |ctx| {
        let prec = ctx.bits();
        let v = normalized_value(&[1, 1, 0], &Rational::one(), ctx)?;
        let three = Float::with_val(prec, 3);
        let s3 = sqrt_f(&three);
        let inner = sqrt_f(&(Float::with_val(prec, &s3 * 100478u32) + 174033u32));
        let body = Float::with_val(prec, &s3 * 511u32) + 885u32 - inner * 3u32;
        let expected = root_f(&(body * 81u32), 12);
        Ok(cmp(&v, &expected, ctx))
    })
}

fn normalized_value(values: &[i64], r: &Rational, ctx: PrecisionContext) -> Result<Float> {
    let pc = PeriodicCoeffs::from_ints(values)?;
    let n = nome(r, ctx)?;
    Ok(evaluate_product(&represent_product(&pc)?, &n)?.into_value() * n.pow(&exponent_a(&pc)))
}

fn example3() -> [IdentityCheck; 2] {
    [
        IdentityCheck::new("ex3.root.r2", &[PC], &["ex3"], |ctx| {
            let prec = ctx.bits();
            let v = normalized_value(&[1, 1, 1, 1, 0], &rat(2, 1), ctx)?;
            let v6 = Float::with_val(prec, Pow::pow(&v, 6u32));
            let v10 = Float::with_val(prec, Pow::pow(&v, 10u32));
            let v12 = Float::with_val(prec, v6.square_ref());
            let res = v12 - v10 * 20u32 + v6 * 250u32 + 3125u32;
            Ok(cmp(&res, &zero(ctx), ctx))
        }),
        IdentityCheck::new("ex3.value.r4", &[PC], &["ex3"], |ctx| {
            let prec = ctx.bits();
            let v = normalized_value(&[1, 1, 1, 1, 0], &rat(4, 1), ctx)?;
            let s5 = sqrt_f(&Float::with_val(prec, 5));
            let expected = sqrt_f(&((s5 * 5u32 + 5u32) / 2u32));
            Ok(cmp(&v, &expected, ctx))
        }),
    ]
}

fn y_index(r: Rational) -> [IdentityCheck; 2] {
    let (r1, r2) = (r.clone(), r.clone());
    [
        IdentityCheck::new(
            format!("ex3.y_index.r{}", tag(&r)),
            &[PC],
            &["ex3"],
            move |ctx| {
                let c = sextic_y_check(&r1, ctx)?;
                let detail: Vec<String> = c
                    .candidates
                    .iter()
                    .map(|(s, res, _)| format!("j({s}): {res}"))
                    .collect();
                Ok(c.report.with_note(detail.join(", ")))
            },
        )
        .param("r", r.clone())
        .recorded(),
        IdentityCheck::new(
            format!("ex3.y_index_unique.r{}", tag(&r)),
            &[PC],
            &["ex3"],
            move |ctx| {
                let c = sextic_y_check(&r2, ctx)?;
                let classes = Rational::from_int(c.satisfied_classes.len() as i64);
                let shown: Vec<String> =
                    c.satisfied_classes.iter().map(|s| s.to_string()).collect();
                Ok(
                    IdentityReport::rational("", &classes, &Rational::one()).with_note(format!(
                        "satisfying j arguments up to s -> 1/s: {}",
                        shown.join(", ")
                    )),
                )
            },
        )
        .param("r", r),
    ]
}

fn thm4(p: u64) -> IdentityCheck {
    let check = IdentityCheck::new(format!("thm4.p{p}.r1"), &[PC], &["thm4"], move |ctx| {
        theorem4_check(p, &Rational::one(), ctx)
    })
    .param("p", Rational::from_int(p as i64))
    .param("r", Rational::one());
    if p == 2 {
        check.recorded()
    } else {
        check
    }
}

fn recognition_report(
    expr: &Expression,
    bounds: Bounds,
    expected: Option<IntegerPolynomial>,
    ctx: PrecisionContext,
) -> Result<IdentityReport> {
    let res = recognize_expression(expr, bounds, ctx)?;
    let found = res
        .poly
        .as_ref()
        .map_or_else(|| "none".to_string(), |p| p.to_string());
    let matches = match (&expected, &res.poly) {
        (Some(e), Some(p)) => e == p,
        (None, Some(_)) => true,
        _ => false,
    };
    let verdict = if res.recognized() && matches {
        crate::report::Verdict::Pass
    } else {
        crate::report::Verdict::Fail
    };
    Ok(IdentityReport {
        id: String::new(),
        lhs: found,
        rhs: expected.map_or_else(|| "recognized".to_string(), |p| p.to_string()),
        abs_difference: res.verified_residual.clone(),
        tolerance: format!(
            "1e-{}",
            2 * ctx.digits() - ctx.guard() - bounds.max_degree as u32 * bounds.height_digits
        ),
        verdict,
        wall_time_ms: 0,
        note: Some(format!(
            "status {}; {}",
            res.status,
            res.provenance.unwrap_or_default()
        )),
    })
}

fn eq19(a: i64, p: i64, r: Rational, power: u32) -> IdentityCheck {
    let rr = r.clone();
    IdentityCheck::new(
        format!("eq19.recognize.a{a}p{p}.r{}", tag(&r)),
        &[CJ],
        &["eq19", "eq21"],
        move |ctx| {
            let expr = Expression::AgileStar {
                spec: AgileSpec::from_ints(a, p)?,
                nome: NomeSource::R(rr.clone()),
                power,
            };
            recognition_report(&expr, Bounds::new(8, 7)?, None, ctx)
        },
    )
    .param("r", r)
    .min_digits(300)
}

fn eq59_expr() -> Result<Expression> {
    Ok(Expression::AgileStar {
        spec: AgileSpec::from_ints(1, 3)?,
        nome: NomeSource::InverseModulus(rat(1, 5)),
        power: 6,
    })
}

fn eq59() -> IdentityCheck {
    IdentityCheck::new(
        "eq59.recognize.a1p3.x1_5",
        &[CJ],
        &["eq59", "eq19", "eq52"],
        |ctx| {
            let expected = IntegerPolynomial::from_i64(&[-885735, 0, -21870, 364, 45])?;
            recognition_report(&eq59_expr()?, Bounds::new(6, 7)?, Some(expected), ctx)
        },
    )
    .min_digits(300)
}

/// The displayed radical for ([1,3]*)⁶ at r = k_i(1/5).
fn eq58() -> IdentityCheck {
    IdentityCheck::new("eq58.radical.a1p3.x1_5", &[CJ], &["eq58"], |ctx| {
        let prec = ctx.bits();
        let value = eq59_expr()?.evaluate(ctx)?;
        let c = Float::with_val(prec, 9).cbrt() * Float::with_val(prec, 10).cbrt();
        let c74 = Float::with_val(prec, &c * 74115u32);
        let first =
            sqrt_f(&(Float::with_val(prec, 689224u32) - Float::with_val(prec, &c * 148230u32)));
        let inner =
            sqrt_f(&(Float::with_val(prec, 2u32) / (Float::with_val(prec, 344612u32) - &c74)));
        let second = sqrt_f(&((inner * 92571934u32 + &c74 + 689224u32) * 2u32));
        let expected = (second - first - 182u32) / 90u32;
        Ok(cmp(value.value(), &expected, ctx))
    })
}

fn eq45(g: u64) -> IdentityCheck {
    IdentityCheck::new(
        format!("eq45.etaquotient.g{g}"),
        &[SE, CJ],
        &["eq45"],
        move |_| {
            let c = conjecture2_etaquotient(g, 120)?;
            Ok(IdentityReport::exact("", c.order, c.first_mismatch))
        },
    )
}

fn squarefree_primes(g: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = g;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Σ over products d of distinct primes of g of μ(d)·d·F(q^d).
fn inclusion_exclusion(g: u64, f: &dyn Fn(u64) -> Result<Float>) -> Result<Float> {
    let primes = squarefree_primes(g);
    let mut acc: Option<Float> = None;
    for mask in 0u32..(1 << primes.len()) {
        let d: u64 = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| p)
            .product();
        let sign = if mask.count_ones() % 2 == 0 { 1i32 } else { -1 };
        let term = f(d)? * (d as u32) * sign;
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    acc.ok_or_else(|| Error::Domain("empty prime set".into()))
}

/// The inclusion-exclusion L-combination for the g-eta-quotient, in two readings.
fn eq45_lambert(g: u64, as_printed: bool) -> IdentityCheck {
    let suffix = if as_printed {
        "as_printed"
    } else {
        "sum_reading"
    };
    IdentityCheck::new(
        format!("eq45.lambert.g{g}.{suffix}"),
        &[CJ],
        &["eq45", "eq46"],
        move |ctx| {
            let prec = ctx.bits();
            let n = nome(&Rational::one(), ctx)?;
            let lhs = lambert_series(&JacobiCharacter::new(g)?, &n)?;
            let s =
                |d: u64| -> Result<Float> {
                    Ok(-eta_log_derivative(
                        &Rational::one(),
                        &n.power(&Rational::from_int(d as i64))?,
                    )?
                    .into_value())
                };
            if as_printed {
                let l =
                    |d: u64| -> Result<Float> { Ok(Float::with_val(prec, 1u32 - s(d)? * 24u32)) };
                let comb = inclusion_exclusion(g, &l)?;
                let rhs = -(comb / n.q());
                Ok(cmp(lhs.value(), &rhs, ctx)
                    .with_note("-q^(-1)[L(q) - sum p L(q^p) + ...] with L = 1 - 24 S"))
            } else {
                let rhs = inclusion_exclusion(g, &s)?;
                Ok(cmp(lhs.value(), &rhs, ctx)
                    .with_note("S(q) - sum p S(q^p) + ... with S = sum n q^n/(1-q^n)"))
            }
        },
    )
    .recorded()
}

fn eq25(name: &str, values: &'static [i64]) -> IdentityCheck {
    IdentityCheck::new(
        format!("eq25.product.{name}"),
        &[SE],
        &["eq25", "eq20", "eq23", "eq24"],
        move |_| {
            let pc = PeriodicCoeffs::from_ints(values)?;
            let x: Vec<Rational> = (1..=SERIES_ORDER as u64).map(|n| pc.at(n)).collect();
            let taylor = taylor_from_x(&x);
            let mut coeffs = vec![Rational::zero()];
            coeffs.extend(taylor.coeffs.iter().map(|c| -c));
            let direct = FormalSeries::new(coeffs, SERIES_ORDER).exp()?;
            let prod = product_qexpansion(&represent_product(&pc)?, SERIES_ORDER)?;
            Ok(IdentityReport::exact(
                "",
                SERIES_ORDER,
                direct.first_mismatch(&prod),
            ))
        },
    )
}

fn eq33_series(a: i64, p: i64) -> IdentityCheck {
    IdentityCheck::new(
        format!("eq33.series.a{a}p{p}"),
        &[SE],
        &["eq33", "eq18", "eq26"],
        move |_| {
            let spec = AgileSpec::from_ints(a, p)?;
            let theta = theta_qexpansion(&ThetaSpec::for_agile(&spec.a, &spec.p)?, SERIES_ORDER)?;
            let prod = &eta_qexpansion(p as usize, SERIES_ORDER)?
                * &agile_qexpansion(&spec, SERIES_ORDER)?;
            Ok(IdentityReport::exact(
                "",
                SERIES_ORDER,
                theta.first_mismatch(&prod),
            ))
        },
    )
}

fn series_check(
    id: &str,
    anchors: &[&'static str],
    order: usize,
    f: fn(usize) -> Result<Option<usize>>,
) -> IdentityCheck {
    IdentityCheck::new(id, &[SE], anchors, move |_| {
        Ok(IdentityReport::exact("", order, f(order)?))
    })
}

/// All registered checks, in report order.
pub fn registry() -> Vec<IdentityCheck> {
    let mut v: Vec<IdentityCheck> = Vec::new();
    for r in [rat(1, 5), rat(2, 1), rat(3, 1)] {
        v.push(eq01(r));
    }
    for x in [rat(1, 5), rat(1, 2)] {
        v.push(eq50(x));
    }
    for r in [rat(1, 1), rat(2, 1), rat(1, 5)] {
        v.extend(eq03(r));
    }
    v.push(eq04_as_printed());
    for r in [rat(1, 1), rat(2, 1), rat(3, 1)] {
        v.push(eq05(r));
    }
    for r in [rat(1, 1), rat(1, 5)] {
        v.push(eq06(r));
    }
    for r in [rat(1, 2), rat(1, 1), rat(2, 1), rat(4, 1)] {
        v.push(eq07(r));
    }
    for r in [rat(1, 1), rat(2, 1), rat(3, 1)] {
        v.push(eq08(r));
    }
    for r in [rat(25, 1), rat(50, 1)] {
        v.push(eq09(r));
    }
    v.push(eq13());
    for r in [rat(1, 1), rat(2, 1), rat(3, 1)] {
        v.push(eq16(r));
    }
    v.push(eq16_double_shift());
    for r in [rat(1, 1), rat(2, 1), rat(3, 1)] {
        v.push(eq17(r));
    }
    v.push(eq22("t3", &[1, 1, 0], rat(-1, 12)));
    v.push(eq22("t5", &[1, 1, 1, 1, 0], rat(-1, 6)));
    v.push(eq22("n5", &[1, -1, -1, 1, 0], rat(1, 5)));
    v.push(eq28());
    v.push(eq30(rat(1, 3), rat(5, 1), rat(14, 3)));
    v.push(eq30(rat(1, 3), rat(5, 1), rat(16, 3)));
    v.push(eq30(rat(2, 1), rat(7, 1), rat(12, 1)));
    v.push(eq32("n5", &[1, -1, -1, 1, 0], rat(2, 1)));
    v.push(eq32("t6", &[2, 0, 1, 0, 2, 0], rat(1, 1)));
    for (a, p, r) in [
        (1, 5, rat(2, 1)),
        (2, 5, rat(1, 1)),
        (1, 4, rat(3, 1)),
        (3, 7, rat(1, 1)),
    ] {
        v.push(eq33(a, p, r));
    }
    v.push(eq34("t5", &[1, 1, 1, 1, 0]));
    v.push(eq34("t6", &[2, 0, 1, 0, 2, 0]));
    for r in [rat(1, 1), rat(2, 1)] {
        v.push(eq35(r));
    }
    v.push(eq35_ratio());
    for r in [rat(1, 1), rat(2, 1)] {
        v.push(eq36(r));
    }
    for r in [rat(1, 2), rat(1, 1), rat(2, 1)] {
        v.push(eq39(r));
    }
    v.push(eq39_worked());
    for r in [rat(1, 5), rat(1, 2), rat(1, 1)] {
        v.push(thm3(r));
    }
    v.push(thm3_as_printed());
    v.push(thm3_radical());
    for r in [rat(1, 1), rat(2, 1)] {
        v.push(eq43(r));
    }
    for g in [5, 8, 13] {
        v.push(eq44(g));
    }
    for r in [rat(1, 1), rat(2, 1), rat(3, 1)] {
        v.push(eq46(r));
    }
    for m in [0, 2, -2] {
        v.push(eq47(m, rat(1, 1)));
        v.push(eq47(m, rat(2, 1)));
    }
    for m in [1, -1, 3] {
        v.push(eq47(m, rat(1, 1)));
        v.push(eq47(m, rat(2, 1)));
    }
    v.push(eq48_as_printed());
    for x in [rat(1, 2), rat(1, 3), rat(2, 5)] {
        v.extend(eq53(x));
    }
    v.push(example2());
    v.extend(example3());
    for r in [rat(2, 1), rat(3, 1)] {
        v.extend(y_index(r));
    }
    for p in [3, 5, 2] {
        v.push(thm4(p));
    }

    for (a, p, r, power) in [
        (1, 2, rat(1, 1), 1),
        (1, 2, rat(2, 1), 1),
        (1, 4, rat(2, 1), 1),
        (1, 3, rat(2, 1), 12),
        (1, 6, rat(1, 1), 12),
        (1, 5, rat(4, 1), 4),
        (1, 8, rat(1, 1), 8),
        (1, 3, rat(1, 3), 2),
    ] {
        v.push(eq19(a, p, r, power));
    }
    v.push(eq58());
    v.push(eq59());
    for r in [rat(1, 1), rat(2, 1), rat(3, 2)] {
        v.extend(eq55(r));
    }
    for g in [9, 25, 225] {
        v.push(eq45_lambert(g, false));
        v.push(eq45_lambert(g, true));
    }

    v.push(eq25("n5", &[1, -1, -1, 1, 0]));
    v.push(eq25("t3", &[1, 1, 0]));
    v.push(eq25("t5", &[1, 1, 1, 1, 0]));
    v.push(eq25("t6", &[2, 0, 1, 0, 2, 0]));
    for (a, p) in [(1, 5), (2, 5), (1, 4), (3, 7), (5, 12)] {
        v.push(eq33_series(a, p));
    }
    v.push(series_check(
        "eq39.series",
        &["eq39"],
        120,
        eq39_series_check,
    ));
    v.push(series_check(
        "eq09.series",
        &["eq9"],
        SERIES_ORDER,
        eq9_series_check,
    ));
    for g in [9, 25, 225] {
        v.push(eq45(g));
    }
    v
}
