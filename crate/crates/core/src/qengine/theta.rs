use rug::Float;
use serde::{Deserialize, Serialize};

use super::nome::Nome;
use crate::error::{Error, Result};
use crate::hp::{HPReal, Rational};

/// ϑ(a,b;q) = Σ_{n∈ℤ} (−1)ⁿ q^{an²+bn}, convergent for a > 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThetaSpec {
    pub a: Rational,
    pub b: Rational,
}

impl ThetaSpec {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::Domain(format!("theta series needs a > 0, got {a}")));
        }
        Ok(Self { a, b })
    }

    /// ϑ(p/2, (p−2a)/2), the theta series attached to the agile [a,p].
    pub fn for_agile(a: &Rational, p: &Rational) -> Result<Self> {
        let two = Rational::from_int(2);
        Self::new(p / &two, &(p - &(a * &two)) / &two)
    }

    /// ϑ(3m/2, −m/2) = Π(1 − q^{mn}) by the pentagonal number theorem.
    pub fn pentagonal(m: &Rational) -> Result<Self> {
        let two = Rational::from_int(2);
        Self::new(&(m * &Rational::from_int(3)) / &two, -(m / &two))
    }

    fn exponent(&self, n: i64) -> Rational {
        let n = Rational::from_int(n);
        &(&self.a * &(&n * &n)) + &(&self.b * &n)
    }
}

/// Partial sums of Σ sⁿ q^{e(n)} and Σ sⁿ e(n) q^{e(n)} with s = ±1,
/// summed outward from the vertex of e(n) until terms fall below the
/// truncation point relative to the largest term.
fn bilateral(spec: &ThetaSpec, nome: &Nome, alternating: bool) -> (Float, Float) {
    let prec = nome.prec();
    let limit = nome.max_exponent();
    let vertex = -(spec.b.to_f64()) / (2.0 * spec.a.to_f64());
    let n0 = vertex.round() as i64;
    let e_min = spec.exponent(n0).to_f64();
    let mut sum = Float::with_val(prec, 0);
    let mut weighted = Float::with_val(prec, 0);
    let mut add = |n: i64| -> bool {
        let e = spec.exponent(n);
        let ef = e.to_f64();
        let mut term = nome.pow(&e);
        if alternating && n.rem_euclid(2) == 1 {
            term = -term;
        }
        weighted += Float::with_val(prec, &term * e.to_float(prec));
        sum += term;
        ef - e_min <= limit
    };
    add(n0);
    let mut n = n0 + 1;
    while add(n) {
        n += 1;
    }
    let mut n = n0 - 1;
    while add(n) {
        n -= 1;
    }
    (sum, weighted)
}

/// Σ_{n∈ℤ} sⁿ q^{an²+bn} with s = −1 when `alternating`.
pub fn bilateral_sum(spec: &ThetaSpec, nome: &Nome, alternating: bool) -> HPReal {
    HPReal::new(bilateral(spec, nome, alternating).0, nome.ctx()).expect("finite theta sum")
}

pub fn theta_general(spec: &ThetaSpec, nome: &Nome) -> HPReal {
    bilateral_sum(spec, nome, true)
}

/// q·d/dq log ϑ(a,b;q), by termwise differentiation of the series.
pub fn theta_log_derivative(spec: &ThetaSpec, nome: &Nome) -> Result<HPReal> {
    let (sum, weighted) = bilateral(spec, nome, true);
    if sum.is_zero() {
        return Err(Error::Singular("theta series vanishes".into()));
    }
    HPReal::new(weighted / sum, nome.ctx())
}

/// θ₂(q) = Σ q^{(n+1/2)²}.
pub fn theta2(nome: &Nome) -> HPReal {
    let spec = ThetaSpec::new(Rational::one(), Rational::one()).expect("a = 1");
    let s = bilateral(&spec, nome, false).0 * nome.pow(&Rational::new(1, 4).expect("1/4"));
    HPReal::new(s, nome.ctx()).expect("finite theta sum")
}

/// θ₃(q) = Σ q^{n²}.
pub fn theta3(nome: &Nome) -> HPReal {
    let spec = ThetaSpec::new(Rational::one(), Rational::zero()).expect("a = 1");
    bilateral_sum(&spec, nome, false)
}

/// Σ_{n∈ℤ} q^{n²+mn}, summed directly.
pub fn theta_powersum(m: i64, nome: &Nome) -> HPReal {
    let spec = ThetaSpec::new(Rational::one(), Rational::from_int(m)).expect("a = 1");
    bilateral_sum(&spec, nome, false)
}

/// M(c,x) = Σ_{n≥0} cⁿ x^{n(n+1)/2}, |x| < 1.
pub fn m_series(c: &HPReal, x: &HPReal) -> Result<HPReal> {
    let ctx = c.ctx();
    let prec = ctx.bits();
    let xa = Float::with_val(prec, x.value().abs_ref());
    if xa >= 1 {
        return Err(Error::Domain("M(c,x) needs |x| < 1".into()));
    }
    let eps = Float::with_val(prec, Float::u_pow_u(10, ctx.truncation_exponent() + 5)).recip();
    let ca = Float::with_val(prec, c.value().abs_ref());
    let mut sum = Float::with_val(prec, 1);
    let mut term = Float::with_val(prec, 1);
    let mut xn = Float::with_val(prec, 1);
    for _ in 1..1_000_000u32 {
        xn *= x.value();
        term *= c.value();
        term *= &xn;
        sum += &term;
        // ratio of consecutive magnitudes is |c|·|x|^{n+1}
        let ratio = Float::with_val(prec, &ca * &xn) * &xa;
        let scale = Float::with_val(prec, sum.abs_ref()).max(&Float::with_val(prec, 1));
        if ratio < 0.5
            && Float::with_val(prec, term.abs_ref()) < Float::with_val(prec, &eps * &scale)
        {
            return HPReal::new(sum, ctx);
        }
    }
    Err(Error::Convergence("M-series did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::{rat, PrecisionContext};
    use crate::qengine::make_nome;

    #[test]
    fn theta_needs_positive_a() {
        assert!(ThetaSpec::new(rat(0, 1), rat(1, 1)).is_err());
    }

    #[test]
    fn small_nome_limits() {
        let c = PrecisionContext::new(40).unwrap();
        let nome = make_nome(&rat(900, 1), c).unwrap();
        let t = theta_general(&ThetaSpec::new(rat(5, 2), rat(3, 2)).unwrap(), &nome);
        assert!((t.to_f64() - 1.0).abs() < 1e-30);
        assert!((theta3(&nome).to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn m_series_at_half() {
        // direct summation oracle: Σ 2^{-n(n+1)/2}
        let c = PrecisionContext::new(40).unwrap();
        let one = HPReal::from_i64(1, c);
        let half = HPReal::from_rational(&rat(1, 2), c);
        let v = m_series(&one, &half).unwrap();
        let mut oracle = rug::Rational::new();
        for n in 0..60u32 {
            oracle += rug::Rational::from((1, rug::Integer::from(1) << (n * (n + 1) / 2)));
        }
        let o = HPReal::new(Float::with_val(c.bits(), &oracle), c).unwrap();
        assert!(v.abs_diff(&o).is_below_pow10(45));
        assert_eq!(
            m_series(&HPReal::from_i64(0, c), &half).unwrap().value(),
            &1
        );
        assert!(m_series(&one, &HPReal::from_i64(1, c)).is_err());
    }

    #[test]
    fn pentagonal_theta_is_euler_product() {
        let c = PrecisionContext::new(60).unwrap();
        let nome = make_nome(&rat(1, 2), c).unwrap();
        let t = theta_general(&ThetaSpec::pentagonal(&rat(3, 1)).unwrap(), &nome);
        let e = crate::qengine::eta_paper(&rat(3, 1), &nome).unwrap();
        assert!(t.abs_diff(&e).is_below_pow10(70));
    }
}
