use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use super::{rrcf, RrcfMethod};
use crate::elliptic::j_invariant_eta;
use crate::error::{Error, Result};
use crate::hp::{HPReal, PrecisionContext, Rational};
use crate::qengine::{agile, eta_paper, theta_general, AgileSpec, Nome, ThetaSpec};
use crate::report::IdentityReport;

/// θ = ϑ(5,1;q)⁶ϑ(5,3;q)⁶ / (q²η_paper(10τ)¹²).
pub fn sextic_theta(nome: &Nome) -> Result<HPReal> {
    let prec = nome.prec();
    let t1 = theta_general(
        &ThetaSpec::new(Rational::from_int(5), Rational::one())?,
        nome,
    );
    let t3 = theta_general(
        &ThetaSpec::new(Rational::from_int(5), Rational::from_int(3))?,
        nome,
    );
    let eta = eta_paper(&Rational::from_int(10), nome)?;
    let base = Float::with_val(prec, t1.value() * t3.value());
    let prod = Float::with_val(prec, Pow::pow(&base, 6u32));
    let den =
        Float::with_val(prec, Pow::pow(eta.value(), 12u32)) * nome.pow(&Rational::from_int(2));
    HPReal::new(prod / den, nome.ctx())
}

/// R(q²)⁻⁵ − 11 − R(q²)⁵.
pub fn sextic_theta_from_rrcf(nome: &Nome) -> Result<HPReal> {
    let doubled = nome.power(&Rational::from_int(2))?;
    let r = rrcf(&doubled, RrcfMethod::Product)?;
    let prec = nome.prec();
    let r5 = Float::with_val(prec, Pow::pow(r.value(), 5u32));
    let v = Float::with_val(prec, r5.recip_ref()) - 11u32 - r5;
    HPReal::new(v, nome.ctx())
}

/// Y = q^{−1/6}·[1,5;q]·[2,5;q], the normalized e^{−f} for X = {1,1,1,1,0}.
pub fn sextic_y(nome: &Nome) -> Result<HPReal> {
    let one = agile(&AgileSpec::from_ints(1, 5)?, nome);
    let two = agile(&AgileSpec::from_ints(2, 5)?, nome);
    let v = one.into_value() * two.value() * nome.pow(&Rational::new(-1, 6)?);
    HPReal::new(v, nome.ctx())
}

/// 3125 + 250Y⁶ + Y¹² − j^{1/3}·Y¹⁰.
pub fn sextic_y_residual(y: &HPReal, j: &HPReal) -> Float {
    let prec = y.ctx().bits();
    let y2 = Float::with_val(prec, y.value().square_ref());
    let y6 = Float::with_val(prec, Pow::pow(&y2, 3u32));
    let y10 = Float::with_val(prec, &y6 * Float::with_val(prec, y2.square_ref()));
    let y12 = Float::with_val(prec, y6.square_ref());
    let jc = Float::with_val(prec, j.value().cbrt_ref());
    Float::with_val(prec, 3125u32 + Float::with_val(prec, &y6 * 250u32)) + y12 - jc * y10
}

/// Residuals of the Y-equation with j taken at r, 4r and r/4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SexticYCheck {
    pub r: Rational,
    /// (argument, |residual| as a decimal string, passes)
    pub candidates: Vec<(Rational, String, bool)>,
    /// Arguments that satisfy the equation, collapsed under j(s) = j(1/s).
    pub satisfied_classes: Vec<Rational>,
    pub report: IdentityReport,
}

fn j_class(s: &Rational) -> Rational {
    if s < &Rational::one() {
        s.recip().expect("s > 0")
    } else {
        s.clone()
    }
}

pub fn sextic_y_check(r: &Rational, ctx: PrecisionContext) -> Result<SexticYCheck> {
    let nome = Nome::new(r, ctx)?;
    let y = sextic_y(&nome)?;
    let tol = ctx.tolerance_exponent();
    let prec = ctx.bits();
    let args = [
        r.clone(),
        r * &Rational::from_int(4),
        r * &Rational::new(1, 4)?,
    ];
    let mut candidates = Vec::new();
    let mut classes: Vec<Rational> = Vec::new();
    let mut best: Option<(Float, Rational)> = None;
    for s in args {
        let j = j_invariant_eta(&Nome::new(&s, ctx)?)?;
        let res = sextic_y_residual(&y, &j).abs();
        let ok = crate::hp::real::below_pow10(&res, tol);
        candidates.push((s.clone(), crate::hp::real::format_scientific(&res, 6), ok));
        if ok && !classes.contains(&j_class(&s)) {
            classes.push(j_class(&s));
        }
        if best.as_ref().is_none_or(|(b, _)| &res < b) {
            best = Some((res, s));
        }
    }
    let (res, arg) = best.expect("three candidates");
    let zero = Float::with_val(prec, 0);
    let report = IdentityReport::compare(&format!("ex3.y_index.r{r}"), &res, &zero, tol)
        .recorded()
        .with_note(format!(
            "best j argument {arg}; satisfied classes {}",
            classes.len()
        ));
    Ok(SexticYCheck {
        r: r.clone(),
        candidates,
        satisfied_classes: classes,
        report,
    })
}

/// Coefficients of b²/(20a) + bY + aY² = c·Y^{5/3}.
#[derive(Debug, Clone, PartialEq)]
pub struct SexticInstance {
    pub a: HPReal,
    pub b: HPReal,
    pub c: HPReal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SexticSolution {
    pub r: HPReal,
    pub y: HPReal,
    pub residual: HPReal,
}

impl SexticInstance {
    pub fn new(a: HPReal, b: HPReal, c: HPReal) -> Result<Self> {
        if a.value().is_zero() || b.value().is_zero() {
            return Err(Error::Domain("sextic needs a != 0 and b != 0".into()));
        }
        Ok(Self { a, b, c })
    }

    /// j = 250c³/(a²b).
    pub fn j_target(&self) -> Float {
        let prec = self.a.ctx().bits();
        let c3 = Float::with_val(prec, Pow::pow(self.c.value(), 3u32)) * 250u32;
        let a2b = Float::with_val(prec, self.a.value().square_ref()) * self.b.value();
        c3 / a2b
    }

    /// Left minus right side at Y.
    pub fn residual(&self, y: &Float) -> Float {
        let prec = self.a.ctx().bits();
        let (a, b, c) = (self.a.value(), self.b.value(), self.c.value());
        let first = Float::with_val(prec, b.square_ref()) / Float::with_val(prec, a * 20u32);
        let second = Float::with_val(prec, b * y);
        let third = Float::with_val(prec, y.square_ref()) * a;
        let root = Float::with_val(prec, y.cbrt_ref());
        let rhs = Float::with_val(prec, Pow::pow(&root, 5u32)) * c;
        first + second + third - rhs
    }
}

fn ln_j_at(t: &Float, ctx: PrecisionContext) -> Result<Float> {
    let r = HPReal::new(Float::with_val(ctx.bits(), t.square_ref()), ctx)?;
    Ok(j_invariant_eta(&Nome::from_real(&r)?)?.into_value().ln())
}

/// Finds r ≥ 1 with j_r = 250c³/(a²b) and returns
/// Y = (b/250a)(R(q²)⁻⁵ − 11 − R(q²)⁵) at q = e^{−π√r}.
pub fn solve_sextic(inst: &SexticInstance, ctx: PrecisionContext) -> Result<SexticSolution> {
    let prec = ctx.bits();
    let target = inst.j_target();
    if !(target >= 1728) {
        return Err(Error::Branch(format!(
            "j target {} lies below 1728, outside the principal branch r >= 1",
            crate::hp::real::format_decimal(&target, 12)
        )));
    }
    let ln_target = Float::with_val(prec, target.ln_ref());
    // ln j is close to π√r + ln(1 + 744/j): bracket in t = √r
    let f = |t: &Float| -> Result<Float> { Ok(ln_j_at(t, ctx)? - &ln_target) };
    let mut lo = Float::with_val(prec, 1);
    let mut hi = Float::with_val(prec, 2);
    while f(&hi)?.is_sign_negative() {
        lo = hi.clone();
        hi *= 2u32;
        if hi > 1e6 {
            return Err(Error::Convergence("j target too large".into()));
        }
    }
    let mut f_lo = f(&lo)?;
    let mut f_hi = f(&hi)?;
    if f_lo.is_zero() {
        hi = lo.clone();
        f_hi = f_lo.clone();
    }
    let tol = Float::with_val(prec, Float::u_pow_u(10, ctx.internal_digits() - 4)).recip();
    // Illinois false position keeps the bracket and converges superlinearly
    let mut side = 0i8;
    let mut t = hi.clone();
    for _ in 0..400 {
        if Float::with_val(prec, &hi - &lo) < tol || f_hi.is_zero() {
            break;
        }
        let den = Float::with_val(prec, &f_hi - &f_lo);
        t = Float::with_val(
            prec,
            &hi - Float::with_val(prec, &f_hi * Float::with_val(prec, &hi - &lo)) / den,
        );
        let ft = f(&t)?;
        if Float::with_val(prec, ft.abs_ref()) < tol {
            break;
        }
        if ft.is_sign_negative() == f_lo.is_sign_negative() {
            lo = t.clone();
            f_lo = ft;
            if side == -1 {
                f_hi /= 2u32;
            }
            side = -1;
        } else {
            hi = t.clone();
            f_hi = ft;
            if side == 1 {
                f_lo /= 2u32;
            }
            side = 1;
        }
    }
    let r = HPReal::new(Float::with_val(prec, t.square_ref()), ctx)?;
    let nome = Nome::from_real(&r)?;
    let theta = sextic_theta_from_rrcf(&nome)?;
    let scale = Float::with_val(
        prec,
        inst.b.value() / Float::with_val(prec, inst.a.value() * 250u32),
    );
    let y = HPReal::new(theta.into_value() * scale, ctx)?;
    let residual = HPReal::new(inst.residual(y.value()).abs(), ctx)?;
    Ok(SexticSolution { r, y, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::rat;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    #[test]
    fn bridge_two_sides() {
        for r in [rat(2, 1), rat(1, 1), rat(1, 3)] {
            let n = Nome::new(&r, ctx(60)).unwrap();
            let a = sextic_theta(&n).unwrap();
            let b = sextic_theta_from_rrcf(&n).unwrap();
            assert!(a.abs_diff(&b).is_below_pow10(50), "r={r}: {a} vs {b}");
        }
    }

    #[test]
    fn fifth_root_value() {
        let c = ctx(60);
        let n = Nome::new(&rat(1, 5), c).unwrap();
        let v = sextic_theta(&n).unwrap();
        let expect = HPReal::new(Float::with_val(c.bits(), 125).sqrt(), c).unwrap();
        assert!(v.abs_diff(&expect).is_below_pow10(50), "{v}");
    }

    #[test]
    fn y_index_classes() {
        for r in [rat(2, 1), rat(3, 1), rat(4, 1)] {
            let check = sextic_y_check(&r, ctx(60)).unwrap();
            assert_eq!(
                check.satisfied_classes.len(),
                1,
                "r={r}: {:?}",
                check.candidates
            );
            assert!(check.candidates[2].2, "r/4 should satisfy at r={r}");
        }
    }

    #[test]
    fn solve_forward_instance() {
        let c = ctx(60);
        let inst = SexticInstance::new(
            HPReal::from_i64(1, c),
            HPReal::from_i64(250, c),
            HPReal::from_i64(20, c),
        )
        .unwrap();
        let sol = solve_sextic(&inst, c).unwrap();
        assert!(
            sol.r.abs_diff(&HPReal::from_i64(2, c)).is_below_pow10(45),
            "r = {}",
            sol.r
        );
        let expect = sextic_theta(&Nome::new(&rat(2, 1), c).unwrap()).unwrap();
        assert!(sol.y.abs_diff(&expect).is_below_pow10(40));
        assert!(sol.residual.is_below_pow10(35), "residual {}", sol.residual);
        let low = SexticInstance::new(
            HPReal::from_i64(1, c),
            HPReal::from_i64(250, c),
            HPReal::from_i64(10, c),
        )
        .unwrap();
        assert!(matches!(solve_sextic(&low, c), Err(Error::Branch(_))));
    }
}
