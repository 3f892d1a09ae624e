use rug::Float;
use serde::{Deserialize, Serialize};

use super::nome::Nome;
use crate::error::{Error, Result};
use crate::hp::{HPReal, Rational};

/// Parameters of the two-sided product [a,p;q] = Π_{n≥0}(1−q^{pn+a})(1−q^{pn+p−a}).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgileSpec {
    pub a: Rational,
    pub p: Rational,
}

impl AgileSpec {
    /// Requires 0 < a < p.
    pub fn new(a: Rational, p: Rational) -> Result<Self> {
        if !a.is_positive() || a >= p {
            return Err(Error::Domain(format!(
                "agile needs 0 < a < p, got a={a}, p={p}"
            )));
        }
        Ok(Self { a, p })
    }

    /// Any `a` that is not a multiple of `p`. The product then contains
    /// finitely many factors with negative exponents; used for the
    /// duplication-ratio symmetry a -> np ± a.
    pub fn extended(a: Rational, p: Rational) -> Result<Self> {
        if !p.is_positive() {
            return Err(Error::Domain(format!("agile needs p > 0, got {p}")));
        }
        if (&a / &p).is_integer() {
            return Err(Error::Domain(format!(
                "a={a} is a multiple of p={p}: the product vanishes"
            )));
        }
        Ok(Self { a, p })
    }

    pub fn from_ints(a: i64, p: i64) -> Result<Self> {
        Self::new(Rational::from_int(a), Rational::from_int(p))
    }

    /// p/12 − a/2 + a²/(2p), the normalizing power of q.
    pub fn star_exponent(&self) -> Rational {
        let twelve = Rational::from_int(12);
        let two = Rational::from_int(2);
        &(&(&self.p / &twelve) - &(&self.a / &two)) + &(&(&self.a * &self.a) / &(&two * &self.p))
    }

    /// (a, p) as integers, when both are.
    pub fn as_ints(&self) -> Option<(i64, i64)> {
        Some((self.a.to_i64()?, self.p.to_i64()?))
    }
}

/// Π (1 − q^{e0 + k·step}) for k ≥ 0 until the exponent passes the
/// truncation point, plus one extra factor.
fn one_sided_product(nome: &Nome, start: &Rational, step: &Rational, acc: &mut Float) {
    let prec = nome.prec();
    let limit = nome.max_exponent();
    let mut term = nome.pow(start);
    let ratio = nome.pow(step);
    let mut exponent = start.to_f64();
    let step_f = step.to_f64();
    loop {
        let factor = Float::with_val(prec, 1u32 - &term);
        *acc *= factor;
        if exponent > limit {
            break;
        }
        term *= &ratio;
        exponent += step_f;
    }
}

/// [a,p;q] = Π_{n≥0}(1−q^{pn+a})(1−q^{pn+p−a}).
pub fn agile(spec: &AgileSpec, nome: &Nome) -> HPReal {
    let mut acc = Float::with_val(nome.prec(), 1);
    one_sided_product(nome, &spec.a, &spec.p, &mut acc);
    one_sided_product(nome, &(&spec.p - &spec.a), &spec.p, &mut acc);
    HPReal::new(acc, nome.ctx()).expect("finite product")
}

/// [a,p;q]* = q^{p/12 − a/2 + a²/(2p)}·[a,p;q].
pub fn agile_star(spec: &AgileSpec, nome: &Nome) -> HPReal {
    let v = agile(spec, nome).into_value() * nome.pow(&spec.star_exponent());
    HPReal::new(v, nome.ctx()).expect("finite product")
}

/// Π_{n≥1}(1 − q^{m·n}) with no q^{m/24} prefactor.
pub fn eta_paper(multiplier: &Rational, nome: &Nome) -> Result<HPReal> {
    if !multiplier.is_positive() {
        return Err(Error::Domain(format!(
            "eta multiplier must be positive, got {multiplier}"
        )));
    }
    let mut acc = Float::with_val(nome.prec(), 1);
    one_sided_product(nome, multiplier, multiplier, &mut acc);
    HPReal::new(acc, nome.ctx())
}

/// q·d/dq log Π(1−q^{mn}) = −Σ_{n≥1} mn·q^{mn}/(1−q^{mn}), termwise.
pub fn eta_log_derivative(multiplier: &Rational, nome: &Nome) -> Result<HPReal> {
    if !multiplier.is_positive() {
        return Err(Error::Domain(format!(
            "eta multiplier must be positive, got {multiplier}"
        )));
    }
    let prec = nome.prec();
    let limit = nome.max_exponent() + 10.0;
    let ratio = nome.pow(multiplier);
    let m = multiplier.to_float(prec);
    let mut term = ratio.clone();
    let mut sum = Float::with_val(prec, 0);
    let mut n = 1u32;
    loop {
        let denom = Float::with_val(prec, 1u32 - &term);
        sum += Float::with_val(prec, &term * n) / denom;
        if multiplier.to_f64() * f64::from(n) > limit {
            break;
        }
        term *= &ratio;
        n += 1;
    }
    HPReal::new(-(sum * m), nome.ctx())
}

/// τ*(a,p;q) = [a,p;q²]* / [a,p;q]*.
pub fn tau_star(spec: &AgileSpec, nome: &Nome) -> Result<HPReal> {
    let doubled = nome.power(&Rational::from_int(2))?;
    let num = agile_star(spec, &doubled);
    let den = agile_star(spec, nome);
    if den.value().is_zero() {
        return Err(Error::Singular("agile vanishes at this nome".into()));
    }
    HPReal::new(num.into_value() / den.value(), nome.ctx())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::{rat, PrecisionContext};
    use crate::qengine::make_nome;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(AgileSpec::from_ints(0, 5).is_err());
        assert!(AgileSpec::from_ints(5, 5).is_err());
        assert!(AgileSpec::from_ints(6, 5).is_err());
        assert!(AgileSpec::extended(rat(10, 1), rat(5, 1)).is_err());
        assert!(AgileSpec::extended(rat(7, 1), rat(5, 1)).is_ok());
    }

    #[test]
    fn star_exponents() {
        assert_eq!(
            AgileSpec::from_ints(1, 5).unwrap().star_exponent(),
            rat(1, 60)
        );
        assert_eq!(
            AgileSpec::from_ints(2, 5).unwrap().star_exponent(),
            rat(-11, 60)
        );
        assert_eq!(
            AgileSpec::from_ints(1, 4).unwrap().star_exponent(),
            rat(-1, 24)
        );
    }

    #[test]
    fn small_nome_limit_is_one() {
        let c = ctx(40);
        let nome = make_nome(&rat(400, 1), c).unwrap(); // q = e^{-20π} ~ 5e-28
        let v = agile(&AgileSpec::from_ints(1, 5).unwrap(), &nome);
        assert!((v.to_f64() - 1.0).abs() < 1e-26);
        let e = eta_paper(&rat(1, 1), &nome).unwrap();
        assert!((e.to_f64() - 1.0).abs() < 1e-26);
    }

    #[test]
    fn extended_spec_shifts_by_sign() {
        // [a+p,p]* = −[a,p]*
        let c = ctx(50);
        let nome = make_nome(&rat(2, 1), c).unwrap();
        let base = agile_star(&AgileSpec::from_ints(1, 5).unwrap(), &nome);
        let shifted = agile_star(&AgileSpec::extended(rat(6, 1), rat(5, 1)).unwrap(), &nome);
        let sum = HPReal::new(
            Float::with_val(nome.prec(), base.value() + shifted.value()),
            c,
        )
        .unwrap();
        assert!(sum.is_below_pow10(55));
    }
}
