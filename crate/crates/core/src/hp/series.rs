//! Truncated formal power series with exact rational coefficients.
//!
//! Coefficients are stored densely for exponents `0..=order`. Binary
//! operations truncate to the smaller of the two orders.

use std::ops::{Add, Mul, Neg, Sub};

use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSeries {
    coeffs: Vec<Rational>,
}

impl FormalSeries {
    /// Series with the given coefficients, padded with zeros (or cut) to
    /// `order`.
    pub fn new(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::new(vec![Rational::one()], order)
    }

    /// c·q^k (zero when k exceeds the order).
    pub fn monomial(c: Rational, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize) -> Rational) -> Self {
        Self {
            coeffs: (0..=order).map(&mut f).collect(),
        }
    }

    pub fn from_i64(coeffs: &[i64], order: usize) -> Self {
        Self::new(
            coeffs.iter().map(|&c| Rational::from_int(c)).collect(),
            order,
        )
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(
            self.coeffs[..=order.min(self.order())].to_vec(),
            order.min(self.order()),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// f(q) -> f(q^m).
    pub fn substitute_power(&self, m: usize) -> Self {
        assert!(m >= 1, "substitution power must be positive");
        let order = self.order();
        let mut out = Self::zero(order);
        for (n, c) in self.coeffs.iter().enumerate() {
            let k = n * m;
            if k > order {
                break;
            }
            out.coeffs[k] = c.clone();
        }
        out
    }

    /// Multiplies in place by (1 - c·q^k), the building block of every
    /// q-product. Runs in O(order).
    pub fn mul_one_minus_monomial(&mut self, c: &Rational, k: usize) {
        if k == 0 {
            let f = Rational::one() - c;
            for a in &mut self.coeffs {
                *a *= &f;
            }
            return;
        }
        for n in (k..self.coeffs.len()).rev() {
            let t = &self.coeffs[n - k] * c;
            self.coeffs[n] -= &t;
        }
    }

    /// Divides in place by (1 - q^k), k ≥ 1.
    pub fn div_one_minus_monomial(&mut self, k: usize) {
        assert!(k >= 1);
        for n in k..self.coeffs.len() {
            let t = self.coeffs[n - k].clone();
            self.coeffs[n] += &t;
        }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::Order(
                "series inverse needs a nonzero constant term".into(),
            ));
        }
        let inv0 = c0.recip()?;
        let order = self.order();
        let mut g = vec![Rational::zero(); order + 1];
        g[0] = inv0.clone();
        for n in 1..=order {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += &(&self.coeffs[k] * &g[n - k]);
                }
            }
            g[n] = -(&acc * &inv0);
        }
        Ok(Self { coeffs: g })
    }

    /// s^k for any integer k; negative powers need an invertible series.
    pub fn pow_int(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one(self.order());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// s^α for rational α, constant term 1, via the power recurrence
    /// n·g_n = Σ_{k=1}^{n} ((α+1)k − n)·f_k·g_{n−k}.
    pub fn binomial_pow(&self, alpha: &Rational) -> Result<Self> {
        if self.coeffs[0] != Rational::one() {
            return Err(Error::Order("rational power needs constant term 1".into()));
        }
        if let Some(k) = alpha.to_i64() {
            return self.pow_int(k);
        }
        let order = self.order();
        let alpha1 = alpha + &Rational::one();
        let mut g = vec![Rational::zero(); order + 1];
        g[0] = Rational::one();
        for n in 1..=order {
            let mut acc = Rational::zero();
            let nn = Rational::from_int(n as i64);
            for k in 1..=n {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                let w = &(&alpha1 * &Rational::from_int(k as i64)) - &nn;
                acc += &(&(&w * &self.coeffs[k]) * &g[n - k]);
            }
            g[n] = &acc / &nn;
        }
        Ok(Self { coeffs: g })
    }

    /// log s for constant term 1: n·h_n = n·f_n − Σ_{k=1}^{n−1} k·h_k·f_{n−k}.
    pub fn log(&self) -> Result<Self> {
        if self.coeffs[0] != Rational::one() {
            return Err(Error::Order("series log needs constant term 1".into()));
        }
        let order = self.order();
        let mut h = vec![Rational::zero(); order + 1];
        for n in 1..=order {
            let nn = Rational::from_int(n as i64);
            let mut acc = &nn * &self.coeffs[n];
            for k in 1..n {
                if h[k].is_zero() || self.coeffs[n - k].is_zero() {
                    continue;
                }
                let t = &(&Rational::from_int(k as i64) * &h[k]) * &self.coeffs[n - k];
                acc -= &t;
            }
            h[n] = &acc / &nn;
        }
        Ok(Self { coeffs: h })
    }

    /// exp s for constant term 0: n·g_n = Σ_{k=1}^{n} k·h_k·g_{n−k}.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Order("series exp needs constant term 0".into()));
        }
        let order = self.order();
        let mut g = vec![Rational::zero(); order + 1];
        g[0] = Rational::one();
        for n in 1..=order {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc += &(&(&Rational::from_int(k as i64) * &self.coeffs[k]) * &g[n - k]);
            }
            g[n] = &acc / &Rational::from_int(n as i64);
        }
        Ok(Self { coeffs: g })
    }

    /// Index of the first differing coefficient up to the common order.
    pub fn first_mismatch(&self, other: &Self) -> Option<usize> {
        let n = self.order().min(other.order());
        (0..=n).find(|&i| self.coeffs[i] != other.coeffs[i])
    }

    /// Evaluates the truncated polynomial at a real point (Horner).
    pub fn eval_float(&self, x: &rug::Float) -> rug::Float {
        let prec = x.prec();
        let mut acc = rug::Float::with_val(prec, 0);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c.to_float(prec);
        }
        acc
    }
}

fn combine(
    a: &FormalSeries,
    b: &FormalSeries,
    f: impl Fn(&Rational, &Rational) -> Rational,
) -> FormalSeries {
    let order = a.order().min(b.order());
    FormalSeries {
        coeffs: (0..=order).map(|i| f(&a.coeffs[i], &b.coeffs[i])).collect(),
    }
}

impl Add for &FormalSeries {
    type Output = FormalSeries;
    fn add(self, rhs: &FormalSeries) -> FormalSeries {
        combine(self, rhs, |a, b| a + b)
    }
}

impl Sub for &FormalSeries {
    type Output = FormalSeries;
    fn sub(self, rhs: &FormalSeries) -> FormalSeries {
        combine(self, rhs, |a, b| a - b)
    }
}

impl Neg for &FormalSeries {
    type Output = FormalSeries;
    fn neg(self) -> FormalSeries {
        FormalSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &FormalSeries {
    type Output = FormalSeries;
    fn mul(self, rhs: &FormalSeries) -> FormalSeries {
        let order = self.order().min(rhs.order());
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        FormalSeries { coeffs: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::rational::rat;

    fn geometric(order: usize) -> FormalSeries {
        FormalSeries::from_fn(order, |_| Rational::one())
    }

    #[test]
    fn geometric_inverse() {
        let one_minus_q = FormalSeries::from_i64(&[1, -1], 20);
        let prod = &one_minus_q * &geometric(20);
        assert_eq!(prod, FormalSeries::one(20));
        let inv = one_minus_q.pow_int(-1).unwrap();
        assert_eq!(inv.coeff(5), &Rational::one());
    }

    #[test]
    fn orders_truncate_to_minimum() {
        let a = geometric(10);
        let b = geometric(4);
        assert_eq!((&a * &b).order(), 4);
        assert_eq!((&a + &b).order(), 4);
    }

    #[test]
    fn log_of_one_minus_q() {
        let s = FormalSeries::from_i64(&[1, -1], 12).log().unwrap();
        for n in 1..=12 {
            assert_eq!(s.coeff(n), &rat(-1, n as i64));
        }
    }

    #[test]
    fn exp_of_zero() {
        assert_eq!(FormalSeries::zero(8).exp().unwrap(), FormalSeries::one(8));
    }

    #[test]
    fn constant_term_preconditions() {
        let s = FormalSeries::from_i64(&[2, 1], 5);
        assert!(s.log().is_err());
        assert!(s.binomial_pow(&rat(1, 2)).is_err());
        assert!(s.exp().is_err());
        assert!(FormalSeries::from_i64(&[0, 1], 5).inverse().is_err());
    }

    #[test]
    fn square_root_squares_back() {
        let s = FormalSeries::from_i64(&[1, 3, -2, 7], 15);
        let r = s.binomial_pow(&rat(1, 2)).unwrap();
        assert_eq!(&r * &r, s);
    }

    #[test]
    fn one_minus_monomial_helpers() {
        let mut s = FormalSeries::one(10);
        s.mul_one_minus_monomial(&Rational::one(), 3);
        assert_eq!(s, FormalSeries::from_i64(&[1, 0, 0, -1], 10));
        s.div_one_minus_monomial(3);
        assert_eq!(s, FormalSeries::one(10));
    }
}
