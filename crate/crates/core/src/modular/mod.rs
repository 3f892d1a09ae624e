//! Rogers-Ramanujan continued fraction, Klein's equation, the degree-5
//! modular equations, the sextic and its theta bridge, and the integral
//! identities built on the incomplete Beta function.

mod beta;
mod sextic;

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::{FormalSeries, HPReal, Rational};
use crate::qengine::{
    agile, agile_qexpansion, theta2, theta3, theta_general, AgileSpec, Nome, ThetaSpec,
};
use crate::report::IdentityReport;

pub use beta::{
    eq43_derivative_check, eq43_derivative_check_with_step, incomplete_beta, theorem3_check,
    theorem3_sides, theorem4_check, theorem4_sides, BetaArgument,
};
pub use sextic::{
    sextic_theta, sextic_theta_from_rrcf, sextic_y, sextic_y_check, sextic_y_residual,
    solve_sextic, SexticInstance, SexticSolution, SexticYCheck,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RrcfMethod {
    /// q^{1/5}·[1,5;q]/[2,5;q]
    Product,
    /// q^{1/5}/(1+ q/(1+ q²/(1+ …))) by backward recurrence
    ContinuedFraction,
}

/// R(q) at the nome.
pub fn rrcf(nome: &Nome, method: RrcfMethod) -> Result<HPReal> {
    match method {
        RrcfMethod::Product => {
            let one = agile(&AgileSpec::from_ints(1, 5)?, nome);
            let two = agile(&AgileSpec::from_ints(2, 5)?, nome);
            let v = one.into_value() / two.value() * nome.pow(&Rational::new(1, 5)?);
            HPReal::new(v, nome.ctx())
        }
        RrcfMethod::ContinuedFraction => rrcf_continued_fraction(nome),
    }
}

/// 1/(1+ q/(1+ q²/(1+ … q^depth/1))) evaluated from the bottom up.
fn cf_tail(q: &Float, depth: u32, prec: u32) -> Float {
    let mut acc = Float::with_val(prec, 1);
    for n in (1..=depth).rev() {
        let qn = Float::with_val(prec, Pow::pow(q, n));
        acc = Float::with_val(prec, 1u32 + qn / acc);
    }
    acc.recip()
}

fn rrcf_continued_fraction(nome: &Nome) -> Result<HPReal> {
    let prec = nome.prec();
    let ctx = nome.ctx();
    let tol = Float::with_val(prec, Float::u_pow_u(10, ctx.digits() + ctx.guard() / 2)).recip();
    // q^depth below 10^−(digits+guard); the partial numerators grow as q^n
    let mut depth = (nome.max_exponent().sqrt().ceil() as u32).max(8) + 2;
    let mut prev = cf_tail(nome.q(), depth, prec);
    for _ in 0..12 {
        let next_depth = depth + 1;
        let next = cf_tail(nome.q(), next_depth, prec);
        if Float::with_val(prec, &next - &prev).abs() < tol {
            let v = next * nome.pow(&Rational::new(1, 5)?);
            return HPReal::new(v, ctx);
        }
        depth *= 2;
        prev = cf_tail(nome.q(), depth, prec);
    }
    Err(Error::Convergence(
        "continued fraction convergents did not settle".into(),
    ))
}

/// j = −(R²⁰ − 228R¹⁵ + 494R¹⁰ + 228R⁵ + 1)³ / (R⁵(R¹⁰ + 11R⁵ − 1)⁵),
/// R = R(q²).
pub fn klein_j_from_r(r: &HPReal) -> Result<HPReal> {
    let prec = r.ctx().bits();
    let r5 = Float::with_val(prec, Pow::pow(r.value(), 5u32));
    let r10 = Float::with_val(prec, r5.square_ref());
    let r15 = Float::with_val(prec, &r10 * &r5);
    let r20 = Float::with_val(prec, r10.square_ref());
    let den_inner = Float::with_val(prec, &r10 + Float::with_val(prec, &r5 * 11u32)) - 1u32;
    let scale = Float::with_val(prec, Float::u_pow_u(10, r.ctx().internal_digits())).recip();
    if Float::with_val(prec, den_inner.abs_ref()) < scale || r5.is_zero() {
        return Err(Error::Singular("R^10 + 11R^5 - 1 vanishes".into()));
    }
    let num = r20 - Float::with_val(prec, &r15 * 228u32)
        + Float::with_val(prec, &r10 * 494u32)
        + Float::with_val(prec, &r5 * 228u32)
        + 1u32;
    let num = Float::with_val(prec, Pow::pow(&num, 3u32));
    let den = Float::with_val(prec, Pow::pow(&den_inner, 5u32)) * r5;
    HPReal::new(-(num / den), r.ctx())
}

/// k_r = θ₂²/θ₃² and k′_r = θ₄²/θ₃² at the nome.
pub fn theta_moduli(nome: &Nome) -> Result<(HPReal, HPReal)> {
    let t2 = theta2(nome).into_value();
    let t3 = theta3(nome).into_value();
    let t4 = theta_general(&ThetaSpec::new(Rational::one(), Rational::zero())?, nome).into_value();
    let t3sq = Float::with_val(nome.prec(), t3.square_ref());
    let k = t2.square() / &t3sq;
    let kp = t4.square() / &t3sq;
    Ok((HPReal::new(k, nome.ctx())?, HPReal::new(kp, nome.ctx())?))
}

/// u⁶ − v⁶ + 5u²v²(u² − v²) + 4uv(1 − u⁴v⁴).
pub fn hermite_residual(u: &Float, v: &Float) -> Float {
    let prec = u.prec().max(v.prec());
    let u2 = Float::with_val(prec, u.square_ref());
    let v2 = Float::with_val(prec, v.square_ref());
    let u6 = Float::with_val(prec, Pow::pow(&u2, 3u32));
    let v6 = Float::with_val(prec, Pow::pow(&v2, 3u32));
    let uv = Float::with_val(prec, u * v);
    let uv2 = Float::with_val(prec, uv.square_ref());
    let mid = Float::with_val(prec, &uv2 * Float::with_val(prec, &u2 - &v2)) * 5u32;
    let uv4 = Float::with_val(prec, uv2.square_ref());
    let last = Float::with_val(prec, 1u32 - uv4) * uv * 4u32;
    u6 - v6 + mid + last
}

/// Which fourth roots enter the depressed equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HermiteReading {
    /// u = k_{25r}^{1/4}, v = k_r^{1/4}: the assignment that vanishes.
    Swapped,
    /// u = k_r^{1/4}, v = k_{25r}^{1/4} as printed.
    AsPrinted,
}

/// Residuals of the degree-5 modular equation
/// k k₂₅ + k′k′₂₅ + 2^{5/3}(k k₂₅ k′ k′₂₅)^{1/3} = 1 and of the depressed
/// equation, with k_{25r} taken from theta quotients at q⁵.
pub fn modular5_check(
    nome: &Nome,
    reading: HermiteReading,
) -> Result<(IdentityReport, IdentityReport)> {
    let prec = nome.prec();
    let tol = nome.ctx().tolerance_exponent();
    let (k, kp) = theta_moduli(nome)?;
    let (k25, kp25) = theta_moduli(&nome.power(&Rational::from_int(5))?)?;
    let a = Float::with_val(prec, k.value() * k25.value());
    let b = Float::with_val(prec, kp.value() * kp25.value());
    let cube = Float::with_val(prec, &a * &b).cbrt();
    let two53 = Float::with_val(prec, 2).pow(Float::with_val(prec, 5) / 3u32);
    let lhs = a + b + two53 * cube;
    let one = Float::with_val(prec, 1);
    let eq3 = IdentityReport::compare("eq03.modular5", &lhs, &one, tol);
    let qr = |x: &HPReal| Float::with_val(prec, x.value().sqrt_ref()).sqrt();
    let (u, v) = match reading {
        HermiteReading::Swapped => (qr(&k25), qr(&k)),
        HermiteReading::AsPrinted => (qr(&k), qr(&k25)),
    };
    let res = hermite_residual(&u, &v);
    let zero = Float::with_val(prec, 0);
    let eq4 = IdentityReport::compare("eq04.depressed", &res, &zero, tol);
    Ok((eq3, eq4))
}

fn ramanujan_ratio(r: &Float) -> Float {
    let prec = r.prec();
    let r2 = Float::with_val(prec, r.square_ref());
    let r3 = Float::with_val(prec, &r2 * r);
    let r4 = Float::with_val(prec, r2.square_ref());
    let num = Float::with_val(prec, 1u32 - Float::with_val(prec, r * 2u32))
        + Float::with_val(prec, &r2 * 4u32)
        - Float::with_val(prec, &r3 * 3u32)
        + &r4;
    let den = Float::with_val(prec, 1u32 + Float::with_val(prec, r * 3u32))
        + Float::with_val(prec, &r2 * 4u32)
        + Float::with_val(prec, &r3 * 2u32)
        + &r4;
    num / den
}

/// R(q^{1/5})⁵ against R(q)(1 − 2R + 4R² − 3R³ + R⁴)/(1 + 3R + 4R² + 2R³ + R⁴).
pub fn ramanujan_modular5_check(nome: &Nome) -> Result<IdentityReport> {
    let prec = nome.prec();
    let root = nome.power(&Rational::new(1, 5)?)?;
    let small = rrcf(&root, RrcfMethod::Product)?;
    let lhs = Float::with_val(prec, Pow::pow(small.value(), 5u32));
    let big = rrcf(nome, RrcfMethod::Product)?.into_value();
    let rhs = ramanujan_ratio(&big) * &big;
    Ok(IdentityReport::compare(
        "eq09.ramanujan5",
        &lhs,
        &rhs,
        nome.ctx().tolerance_exponent(),
    ))
}

/// ρ(x) = [1,5;x]/[2,5;x] as an exact series, so R(q) = q^{1/5}ρ(q).
fn rho_series(order: usize) -> Result<FormalSeries> {
    let one = agile_qexpansion(&AgileSpec::from_ints(1, 5)?, order)?;
    let two = agile_qexpansion(&AgileSpec::from_ints(2, 5)?, order)?;
    Ok(&one * &two.inverse()?)
}

/// The degree-5 relation as an exact identity in u = q^{1/5}:
/// ρ(u)⁵·D(R) = ρ(u⁵)·N(R) with R = u·ρ(u⁵). Returns the first
/// mismatching power of u, if any.
pub fn eq9_series_check(order: usize) -> Result<Option<usize>> {
    let rho = rho_series(order)?;
    let rho5 = rho.substitute_power(5);
    let r = &FormalSeries::monomial(Rational::one(), 1, order) * &rho5;
    let poly = |c: [i64; 5]| -> Result<FormalSeries> {
        let mut acc = FormalSeries::zero(order);
        let mut pw = FormalSeries::one(order);
        for ci in c {
            acc = &acc + &pw.scale(&Rational::from_int(ci));
            pw = &pw * &r;
        }
        Ok(acc)
    };
    let num = poly([1, -2, 4, -3, 1])?;
    let den = poly([1, 3, 4, 2, 1])?;
    let lhs = &rho.pow_int(5)? * &den;
    let rhs = &rho5 * &num;
    Ok(lhs.first_mismatch(&rhs))
}

/// The theta bridge as an exact identity: multiplying both sides by q²,
/// ϑ(5,1)⁶ϑ(5,3)⁶/η(10τ)¹² = S⁻¹ − 11q² − q⁴S with S(q) = ρ(q²)⁵.
pub fn eq39_series_check(order: usize) -> Result<Option<usize>> {
    let t1 = crate::qengine::theta_qexpansion(
        &ThetaSpec::new(Rational::from_int(5), Rational::one())?,
        order,
    )?;
    let t3 = crate::qengine::theta_qexpansion(
        &ThetaSpec::new(Rational::from_int(5), Rational::from_int(3))?,
        order,
    )?;
    let eta10 = crate::qengine::eta_qexpansion(10, order)?;
    let lhs = &(&t1 * &t3).pow_int(6)? * &eta10.pow_int(-12)?;
    let s = rho_series(order)?.substitute_power(2).pow_int(5)?;
    let mut rhs = s.inverse()?;
    rhs = &rhs - &FormalSeries::monomial(Rational::from_int(11), 2, order);
    rhs = &rhs - &(&FormalSeries::monomial(Rational::one(), 4, order) * &s);
    Ok(lhs.first_mismatch(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{j_invariant, JRoute};
    use crate::hp::{rat, PrecisionContext};

    fn nome(r: Rational, d: u32) -> Nome {
        Nome::new(&r, PrecisionContext::new(d).unwrap()).unwrap()
    }

    #[test]
    fn product_and_fraction_agree() {
        for r in [rat(1, 2), rat(1, 1), rat(2, 1), rat(4, 1)] {
            let n = nome(r.clone(), 60);
            let a = rrcf(&n, RrcfMethod::Product).unwrap();
            let b = rrcf(&n, RrcfMethod::ContinuedFraction).unwrap();
            assert!(a.abs_diff(&b).is_below_pow10(60), "r={r}: {a} vs {b}");
        }
    }

    #[test]
    fn klein_matches_j() {
        let c = PrecisionContext::new(60).unwrap();
        for r in [1, 2] {
            let n = nome(rat(r, 1), 60).power(&rat(2, 1)).unwrap();
            let j = klein_j_from_r(&rrcf(&n, RrcfMethod::Product).unwrap()).unwrap();
            let jm = j_invariant(&rat(r, 1), JRoute::Modulus, c).unwrap();
            assert!(j.abs_diff(&jm).is_below_pow10(45), "r={r}: {j} vs {jm}");
        }
    }

    #[test]
    fn klein_singular() {
        let c = PrecisionContext::new(40).unwrap();
        // R⁵ = (5√5 − 11)/2 is a root of R¹⁰ + 11R⁵ − 1
        let prec = c.bits();
        let r5 = (Float::with_val(prec, 125).sqrt() - 11u32) / 2u32;
        let r = HPReal::new(r5.root(5), c).unwrap();
        assert!(matches!(klein_j_from_r(&r), Err(Error::Singular(_))));
    }

    #[test]
    fn modular_equations() {
        for r in [rat(1, 1), rat(2, 1), rat(1, 5)] {
            let (a, b) = modular5_check(&nome(r.clone(), 60), HermiteReading::Swapped).unwrap();
            assert!(a.passed() && b.passed(), "r={r}: {a:?} {b:?}");
            let (_, lit) = modular5_check(&nome(r, 60), HermiteReading::AsPrinted).unwrap();
            assert!(!lit.passed());
        }
        let rep = ramanujan_modular5_check(&nome(rat(25, 1), 60)).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn exact_series_forms() {
        assert_eq!(eq9_series_check(100).unwrap(), None);
        assert_eq!(eq39_series_check(120).unwrap(), None);
    }
}
