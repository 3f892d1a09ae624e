//! Double-exponential (tanh-sinh) quadrature with caller-declared power
//! substitutions at algebraic endpoint singularities and at infinity.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::context::PrecisionContext;
use super::real::HPReal;
use crate::error::{Error, Result};

const MAX_LEVEL: u32 = 14;

/// One end of the integration interval.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    Finite(Float),
    NegInfinity,
    PosInfinity,
}

impl Bound {
    pub fn finite(x: &HPReal) -> Self {
        Bound::Finite(x.value().clone())
    }
}

/// Power substitutions declared by the caller.
///
/// At a finite end `e` with power `k` the variable becomes
/// `t = e ± L·u^k` (u ∈ [0,1]), which turns `|t-e|^α` with `α = j/k - 1`
/// into a smooth integrand. At an infinite end the map is
/// `t = c + u^-k` which absorbs algebraic decay `t^-(1+j/k)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SubstitutionHint {
    pub lo: Option<u32>,
    pub hi: Option<u32>,
}

impl SubstitutionHint {
    pub const NONE: Self = Self { lo: None, hi: None };

    pub fn lo(k: u32) -> Self {
        Self {
            lo: Some(k),
            hi: None,
        }
    }

    pub fn hi(k: u32) -> Self {
        Self {
            lo: None,
            hi: Some(k),
        }
    }

    pub fn both(lo: u32, hi: u32) -> Self {
        Self {
            lo: Some(lo),
            hi: Some(hi),
        }
    }
}

/// ∫_lo^hi f(t) dt to an absolute error below 10^-(digits - guard/2).
pub fn integrate<F>(
    f: F,
    lo: Bound,
    hi: Bound,
    hint: SubstitutionHint,
    ctx: PrecisionContext,
) -> Result<HPReal>
where
    F: Fn(&Float) -> Float,
{
    let prec = ctx.bits();
    let value = match (lo, hi) {
        (Bound::Finite(a), Bound::Finite(b)) => {
            let a = Float::with_val(prec, a);
            let b = Float::with_val(prec, b);
            if a == b {
                Float::with_val(prec, 0)
            } else if a > b {
                -finite(&f, &b, &a, swap(hint), ctx)?
            } else {
                finite(&f, &a, &b, hint, ctx)?
            }
        }
        (Bound::Finite(a), Bound::PosInfinity) => {
            upper_tail(&f, &Float::with_val(prec, a), hint.hi.unwrap_or(1), ctx)?
        }
        (Bound::NegInfinity, Bound::Finite(b)) => {
            // t -> -t
            let g = |t: &Float| f(&Float::with_val(prec, -t));
            upper_tail(&g, &Float::with_val(prec, -b), hint.lo.unwrap_or(1), ctx)?
        }
        (Bound::NegInfinity, Bound::PosInfinity) => {
            let zero = Float::with_val(prec, 0);
            let g = |t: &Float| f(&Float::with_val(prec, -t));
            upper_tail(&f, &zero, hint.hi.unwrap_or(1), ctx)?
                + upper_tail(&g, &zero, hint.lo.unwrap_or(1), ctx)?
        }
        (lo, hi) => {
            return Err(Error::Domain(format!(
                "empty or reversed infinite interval {lo:?}..{hi:?}"
            )))
        }
    };
    HPReal::new(value, ctx)
}

fn swap(h: SubstitutionHint) -> SubstitutionHint {
    SubstitutionHint { lo: h.hi, hi: h.lo }
}

fn finite<F>(
    f: &F,
    a: &Float,
    b: &Float,
    hint: SubstitutionHint,
    ctx: PrecisionContext,
) -> Result<Float>
where
    F: Fn(&Float) -> Float,
{
    let prec = ctx.bits();
    match (hint.lo, hint.hi) {
        (None, None) => tanh_sinh(f, a, b, ctx),
        (Some(k), None) => {
            let len = Float::with_val(prec, b - a);
            power_end(f, a, &len, k, ctx)
        }
        (None, Some(k)) => {
            let len = Float::with_val(prec, a - b);
            power_end(f, b, &len, k, ctx).map(|v| -v)
        }
        (Some(k), Some(m)) => {
            let mid = Float::with_val(prec, a + b) / 2;
            let left = Float::with_val(prec, &mid - a);
            let right = Float::with_val(prec, &mid - b);
            let l = power_end(f, a, &left, k, ctx)?;
            let r = power_end(f, b, &right, m, ctx)?;
            Ok(l - r)
        }
    }
}

/// ∫ over t = e + len·u^k, u ∈ [0,1]; signed by len.
fn power_end<F>(f: &F, e: &Float, len: &Float, k: u32, ctx: PrecisionContext) -> Result<Float>
where
    F: Fn(&Float) -> Float,
{
    let prec = ctx.bits();
    if k <= 1 {
        let end = Float::with_val(prec, e + len);
        return if len.is_sign_negative() {
            tanh_sinh(f, &end, e, ctx).map(|v| -v)
        } else {
            tanh_sinh(f, e, &end, ctx)
        };
    }
    let g = |u: &Float| {
        let uk1 = Float::with_val(prec, u.pow(k - 1));
        let t = Float::with_val(prec, &uk1 * u) * len + e;
        f(&t) * uk1 * len * k
    };
    let zero = Float::with_val(prec, 0);
    let one = Float::with_val(prec, 1);
    tanh_sinh(&g, &zero, &one, ctx)
}

/// ∫_c^∞ via t = c - 1 + u^-k.
fn upper_tail<F>(f: &F, c: &Float, k: u32, ctx: PrecisionContext) -> Result<Float>
where
    F: Fn(&Float) -> Float,
{
    let prec = ctx.bits();
    let k = k.max(1);
    let shift = Float::with_val(prec, c - 1u32);
    let g = |u: &Float| {
        let inv = Float::with_val(prec, u.recip_ref());
        let invk = Float::with_val(prec, (&inv).pow(k));
        let t = Float::with_val(prec, &invk + &shift);
        // dt = k u^{-k-1} du
        f(&t) * invk * inv * k
    };
    let zero = Float::with_val(prec, 0);
    let one = Float::with_val(prec, 1);
    tanh_sinh(&g, &zero, &one, ctx)
}

/// Tanh-sinh on [a,b] with step halving until two levels agree.
fn tanh_sinh<F>(f: &F, a: &Float, b: &Float, ctx: PrecisionContext) -> Result<Float>
where
    F: Fn(&Float) -> Float,
{
    let prec = ctx.bits();
    let half_len = Float::with_val(prec, b - a) / 2;
    let center = Float::with_val(prec, a + b) / 2;
    let half_pi = Float::with_val(prec, Constant::Pi) / 2;
    let eps = pow10_neg(prec, ctx.internal_digits() + 10);
    let tol = pow10_neg(prec, ctx.digits() + ctx.guard() / 2);

    // Sum of weighted samples at nodes j·h for a given set of j.
    let sample = |t: &Float| -> Result<Option<Float>> {
        // x = tanh(u), 1 - x = 2/(e^{2u}+1), w = (π/2) cosh t / cosh² u
        let u: Float = Float::with_val(prec, t.sinh_ref()) * &half_pi;
        let cosh_u = Float::with_val(prec, u.cosh_ref());
        let w = Float::with_val(prec, t.cosh_ref()) * &half_pi / cosh_u.square();
        if w < eps {
            return Ok(None);
        }
        let e2u = Float::with_val(prec, &u * 2u32).exp();
        let comp = Float::with_val(prec, 2u32) / (e2u + 1u32);
        let dist = Float::with_val(prec, &comp * &half_len);
        let right = Float::with_val(prec, b - &dist);
        let left = Float::with_val(prec, a + &dist);
        let fr = f(&right);
        let fl = f(&left);
        if !fr.is_finite() || !fl.is_finite() {
            return Err(Error::Convergence(format!(
                "integrand not finite near endpoint (weight {})",
                super::real::format_scientific(&w, 3)
            )));
        }
        Ok(Some(w * (fr + fl)))
    };

    let mut h = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, f(&center)) * &half_pi;
    let mut j = 1u64;
    loop {
        let t = Float::with_val(prec, &h * j);
        match sample(&t)? {
            Some(s) => sum += s,
            None => break,
        }
        j += 1;
    }
    let mut estimate = Float::with_val(prec, &sum * &h) * &half_len;
    for _level in 1..=MAX_LEVEL {
        h /= 2;
        let mut j = 1u64;
        loop {
            let t = Float::with_val(prec, &h * j);
            match sample(&t)? {
                Some(s) => sum += s,
                None => break,
            }
            j += 2;
        }
        let next = Float::with_val(prec, &sum * &h) * &half_len;
        let diff = Float::with_val(prec, &next - &estimate).abs();
        estimate = next;
        if diff < tol {
            return Ok(estimate);
        }
    }
    Err(Error::Convergence(format!(
        "tanh-sinh did not reach 10^-{} after {MAX_LEVEL} levels",
        ctx.digits() + ctx.guard() / 2
    )))
}

fn pow10_neg(prec: u32, e: u32) -> Float {
    Float::with_val(prec, Float::u_pow_u(10, e)).recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    fn fin(x: i64, c: PrecisionContext) -> Bound {
        Bound::Finite(Float::with_val(c.bits(), x))
    }

    #[test]
    fn constant_integrand() {
        let c = ctx(60);
        let v = integrate(
            |_| Float::with_val(c.bits(), 1),
            fin(0, c),
            fin(1, c),
            SubstitutionHint::NONE,
            c,
        )
        .unwrap();
        assert!(v.abs_diff(&HPReal::from_i64(1, c)).is_below_pow10(60));
    }

    #[test]
    fn reversed_interval_changes_sign() {
        let c = ctx(40);
        let p = c.bits();
        let v = integrate(
            |t| Float::with_val(p, t * t),
            fin(1, c),
            fin(0, c),
            SubstitutionHint::NONE,
            c,
        )
        .unwrap();
        let third = HPReal::new(Float::with_val(p, -1) / 3, c).unwrap();
        assert!(v.abs_diff(&third).is_below_pow10(45));
    }

    #[test]
    fn rational_tail() {
        // ∫_0^∞ dt/(1+t)² = 1
        let c = ctx(50);
        let p = c.bits();
        let v = integrate(
            |t| Float::with_val(p, t + 1u32).square().recip(),
            fin(0, c),
            Bound::PosInfinity,
            SubstitutionHint::NONE,
            c,
        )
        .unwrap();
        assert!(v.abs_diff(&HPReal::from_i64(1, c)).is_below_pow10(50));
    }

    #[test]
    fn algebraic_tail_with_hint() {
        // ∫_1^∞ t^{-7/6} dt = 6
        let c = ctx(60);
        let p = c.bits();
        let seventh_sixth = Float::with_val(p, 7) / 6;
        let v = integrate(
            |t| Float::with_val(p, t.pow(&seventh_sixth)).recip(),
            fin(1, c),
            Bound::PosInfinity,
            SubstitutionHint::hi(6),
            c,
        )
        .unwrap();
        assert!(v.abs_diff(&HPReal::from_i64(6, c)).is_below_pow10(60));
    }

    #[test]
    fn whole_line() {
        // ∫ dt/(1+t²) = π
        let c = ctx(40);
        let p = c.bits();
        let v = integrate(
            |t| (Float::with_val(p, t.square_ref()) + 1u32).recip(),
            Bound::NegInfinity,
            Bound::PosInfinity,
            SubstitutionHint::both(1, 1),
            c,
        )
        .unwrap();
        let pi = super::super::real::pi_const(c);
        assert!(v.abs_diff(&pi).is_below_pow10(45));
    }
}
