//! Exact q-expansions of agiles, eta products and theta series.

use super::products::AgileSpec;
use super::theta::ThetaSpec;
use crate::error::{Error, Result};
use crate::hp::{FormalSeries, Rational};

fn check_order(order: usize) -> Result<()> {
    if order < 1 {
        return Err(Error::Order("expansion order must be at least 1".into()));
    }
    Ok(())
}

/// Π_{n≥0}(1−q^{pn+a})(1−q^{pn+p−a}) to q^order; a and p must be integers.
pub fn agile_qexpansion(spec: &AgileSpec, order: usize) -> Result<FormalSeries> {
    check_order(order)?;
    let (a, p) = spec
        .as_ints()
        .filter(|(a, p)| *a > 0 && a < p)
        .ok_or_else(|| {
            Error::Domain(format!(
                "exact expansion needs integers 0 < a < p, got {spec:?}"
            ))
        })?;
    let mut s = FormalSeries::one(order);
    let one = Rational::one();
    for start in [a, p - a] {
        let mut e = start as usize;
        while e <= order {
            s.mul_one_minus_monomial(&one, e);
            e += p as usize;
        }
    }
    Ok(s)
}

/// Π_{n≥1}(1 − q^{mn}) to q^order.
pub fn eta_qexpansion(multiplier: usize, order: usize) -> Result<FormalSeries> {
    check_order(order)?;
    if multiplier == 0 {
        return Err(Error::Domain("eta multiplier must be positive".into()));
    }
    let mut s = FormalSeries::one(order);
    let one = Rational::one();
    let mut e = multiplier;
    while e <= order {
        s.mul_one_minus_monomial(&one, e);
        e += multiplier;
    }
    Ok(s)
}

/// Σ(−1)ⁿ q^{an²+bn} to q^order; every exponent must be a non-negative
/// integer (2a ∈ ℤ, a+b ∈ ℤ, a ≥ |b|... checked termwise).
pub fn theta_qexpansion(spec: &ThetaSpec, order: usize) -> Result<FormalSeries> {
    check_order(order)?;
    let mut s = FormalSeries::zero(order);
    let limit = Rational::from_int(order as i64);
    let mut coeffs: Vec<Rational> = s.coeffs().to_vec();
    for sign in [1i64, -1] {
        let mut n: i64 = if sign == 1 { 0 } else { -1 };
        loop {
            let nn = Rational::from_int(n);
            let e = &(&spec.a * &(&nn * &nn)) + &(&spec.b * &nn);
            let vertex_passed =
                (&(&spec.a * &Rational::from_int(2 * n)) + &spec.b).is_positive() == (sign == 1);
            if e > limit && vertex_passed {
                break;
            }
            if e <= limit {
                let k = e.to_i64().filter(|k| *k >= 0).ok_or_else(|| {
                    Error::Domain(format!("theta exponent {e} is not a non-negative integer"))
                })?;
                let c = if n.rem_euclid(2) == 0 {
                    Rational::one()
                } else {
                    -Rational::one()
                };
                coeffs[k as usize] += &c;
            }
            n += sign;
        }
    }
    s = FormalSeries::new(coeffs, order);
    Ok(s)
}
