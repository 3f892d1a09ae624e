use rug::Float;
use serde::{Deserialize, Serialize};

use super::period::{PeriodicCoeffs, Sequence};
use crate::error::{Error, Result};
use crate::hp::{pow_rational_float, FormalSeries, HPReal, Rational};
use crate::qengine::{
    agile, agile_qexpansion, eta_log_derivative, eta_paper, eta_qexpansion, theta_general,
    theta_log_derivative, AgileSpec, Nome, ThetaSpec,
};

/// One factor [a,p;x]^e of a finite agile product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductFactor {
    pub spec: AgileSpec,
    pub exponent: Rational,
}

/// η_paper(Tτ)^{eta_exponent}·Π ϑ(spec)^{e}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaRepresentation {
    pub eta_multiplier: Rational,
    pub eta_exponent: Rational,
    pub factors: Vec<(ThetaSpec, Rational)>,
}

fn require_catoptric(pc: &PeriodicCoeffs) -> Result<()> {
    if pc.catoptric {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "period {} sequence is not catoptric",
            pc.period
        )))
    }
}

/// Classes j ≤ ⌊(T−1)/2⌋ with their exponents a_j, plus the class T/2
/// for even T, whose agile [T/2,T] counts every factor twice.
fn classes(pc: &PeriodicCoeffs) -> Vec<(i64, Rational)> {
    let t = pc.period as i64;
    let mut out: Vec<(i64, Rational)> = (1..=(t - 1) / 2)
        .filter(|&j| !pc.value(j as usize).is_zero())
        .map(|j| (j, pc.value(j as usize).clone()))
        .collect();
    if let Some(m) = pc.middle() {
        if !m.is_zero() {
            out.push((t / 2, m * &Rational::new(1, 2).expect("2")));
        }
    }
    out
}

/// e^{−f(x)} = Π_j [j,T;x]^{a_j}.
pub fn represent_product(pc: &PeriodicCoeffs) -> Result<Vec<ProductFactor>> {
    require_catoptric(pc)?;
    let t = pc.period as i64;
    classes(pc)
        .into_iter()
        .map(|(j, exponent)| {
            Ok(ProductFactor {
                spec: AgileSpec::from_ints(j, t)?,
                exponent,
            })
        })
        .collect()
}

/// e^{−f(q)} = η_paper(Tτ)^{−Σa_j}·Π_j ϑ(T/2,(T−2j)/2;q)^{a_j}.
pub fn represent_theta(pc: &PeriodicCoeffs) -> Result<ThetaRepresentation> {
    require_catoptric(pc)?;
    let t = Rational::from_int(pc.period as i64);
    let mut eta_exponent = Rational::zero();
    let mut factors = Vec::new();
    for (j, e) in classes(pc) {
        eta_exponent -= &e;
        factors.push((ThetaSpec::for_agile(&Rational::from_int(j), &t)?, e));
    }
    Ok(ThetaRepresentation {
        eta_multiplier: t,
        eta_exponent,
        factors,
    })
}

fn pow_hp(x: &HPReal, e: &Rational) -> Result<Float> {
    pow_rational_float(x.value(), e)
}

pub fn evaluate_product(factors: &[ProductFactor], nome: &Nome) -> Result<HPReal> {
    let mut acc = Float::with_val(nome.prec(), 1);
    for f in factors {
        acc *= pow_hp(&agile(&f.spec, nome), &f.exponent)?;
    }
    HPReal::new(acc, nome.ctx())
}

pub fn evaluate_theta(rep: &ThetaRepresentation, nome: &Nome) -> Result<HPReal> {
    let mut acc = Float::with_val(nome.prec(), 1);
    if !rep.eta_exponent.is_zero() {
        acc *= pow_hp(&eta_paper(&rep.eta_multiplier, nome)?, &rep.eta_exponent)?;
    }
    for (spec, e) in &rep.factors {
        let v = theta_general(spec, nome);
        if v.value().cmp0() != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Domain("theta factor is not positive".into()));
        }
        acc *= pow_hp(&v, e)?;
    }
    HPReal::new(acc, nome.ctx())
}

/// Exact expansion of Π [a,p;x]^e to the given order.
pub fn product_qexpansion(factors: &[ProductFactor], order: usize) -> Result<FormalSeries> {
    let mut acc = FormalSeries::one(order);
    for f in factors {
        let s = agile_qexpansion(&f.spec, order)?;
        acc = &acc * &s.binomial_pow(&f.exponent)?;
    }
    Ok(acc)
}

/// Σ_{n≥1} n·X(n)·qⁿ/(1−qⁿ).
pub fn lambert_series(x: &dyn Sequence, nome: &Nome) -> Result<HPReal> {
    let prec = nome.prec();
    let limit = nome.max_exponent() + 10.0;
    let q = nome.q();
    let mut qn = Float::with_val(prec, q);
    let mut sum = Float::with_val(prec, 0);
    let mut n = 1u64;
    loop {
        let c = x.at(n);
        if !c.is_zero() {
            let w = c.to_float(prec) * n;
            let denom = Float::with_val(prec, 1u32 - &qn);
            sum += w * &qn / denom;
        }
        if n as f64 > limit {
            break;
        }
        qn *= q;
        n += 1;
    }
    HPReal::new(sum, nome.ctx())
}

/// −q·d/dq log of the theta representation, each series differentiated
/// termwise.
pub fn logderiv_representation(pc: &PeriodicCoeffs, nome: &Nome) -> Result<HPReal> {
    let rep = represent_theta(pc)?;
    let prec = nome.prec();
    let mut acc = Float::with_val(prec, 0);
    if !rep.eta_exponent.is_zero() {
        let d = eta_log_derivative(&rep.eta_multiplier, nome)?;
        acc += d.into_value() * rep.eta_exponent.to_float(prec);
    }
    for (spec, e) in &rep.factors {
        let d = theta_log_derivative(spec, nome)?;
        acc += d.into_value() * e.to_float(prec);
    }
    HPReal::new(-acc, nome.ctx())
}

/// Coefficientwise comparison of Π(1−qⁿ)^{(n/g)} with the
/// inclusion-exclusion eta quotient over the primes of g.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaQuotientCheck {
    pub g: u64,
    pub primes: Vec<u64>,
    pub order: usize,
    pub first_mismatch: Option<usize>,
}

impl EtaQuotientCheck {
    pub fn holds(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
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

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn conjecture2_etaquotient(g: u64, order: usize) -> Result<EtaQuotientCheck> {
    let root = (g as f64).sqrt().round() as u64;
    if g < 2 || root * root != g {
        return Err(Error::Domain(format!(
            "{g} is not a perfect square above 1"
        )));
    }
    // (n/g) for a square g is the indicator of gcd(n, g) = 1
    let mut lhs = FormalSeries::one(order);
    for n in 1..=order {
        if gcd(n as u64, g) == 1 {
            lhs.mul_one_minus_monomial(&Rational::one(), n);
        }
    }
    let primes = prime_factors(g);
    let mut rhs = FormalSeries::one(order);
    for mask in 0u32..(1 << primes.len()) {
        let mut m = 1usize;
        for (i, p) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                m *= *p as usize;
            }
        }
        let eta = eta_qexpansion(m, order)?;
        let factor = if mask.count_ones() % 2 == 0 {
            eta
        } else {
            eta.inverse()?
        };
        rhs = &rhs * &factor;
    }
    Ok(EtaQuotientCheck {
        g,
        primes,
        order,
        first_mismatch: lhs.first_mismatch(&rhs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::{rat, PrecisionContext};
    use crate::moebius::{taylor_from_x, JacobiCharacter};

    fn nome(r: i64, d: u32) -> Nome {
        Nome::new(&rat(r, 1), PrecisionContext::new(d).unwrap()).unwrap()
    }

    #[test]
    fn rrcf_product_factors() {
        let pc = PeriodicCoeffs::from_ints(&[1, -1, -1, 1, 0]).unwrap();
        let f = represent_product(&pc).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(
            (f[0].spec.as_ints(), f[0].exponent.clone()),
            (Some((1, 5)), rat(1, 1))
        );
        assert_eq!(
            (f[1].spec.as_ints(), f[1].exponent.clone()),
            (Some((2, 5)), rat(-1, 1))
        );
        let three = represent_product(&PeriodicCoeffs::from_ints(&[1, 1, 0]).unwrap()).unwrap();
        assert_eq!(three.len(), 1);
        assert!(represent_product(&PeriodicCoeffs::from_ints(&[1, -1, 0]).unwrap()).is_err());
    }

    #[test]
    fn product_matches_exp_of_taylor() {
        for vals in [
            vec![1, -1, -1, 1, 0],
            vec![1, 1, 0],
            vec![2, 0, 1, 0, 2, 0],
            vec![1, 3, 3, 1, 0],
        ] {
            let pc = PeriodicCoeffs::from_ints(&vals).unwrap();
            let order = 60;
            let x: Vec<Rational> = (1..=order as u64).map(|n| pc.at(n)).collect();
            let taylor = taylor_from_x(&x);
            let mut coeffs = vec![Rational::zero()];
            coeffs.extend(taylor.coeffs.iter().map(|c| -c));
            let direct = FormalSeries::new(coeffs, order).exp().unwrap();
            let prod = product_qexpansion(&represent_product(&pc).unwrap(), order).unwrap();
            assert_eq!(direct.first_mismatch(&prod), None, "{vals:?}");
        }
    }

    #[test]
    fn theta_and_product_agree() {
        let n = nome(2, 50);
        let pc = PeriodicCoeffs::from_ints(&[1, -1, -1, 1, 0]).unwrap();
        let a = evaluate_product(&represent_product(&pc).unwrap(), &n).unwrap();
        let b = evaluate_theta(&represent_theta(&pc).unwrap(), &n).unwrap();
        assert!(a.abs_diff(&b).is_below_pow10(45));
    }

    #[test]
    fn logderiv_equals_lambert() {
        let n = nome(1, 50);
        let chi = JacobiCharacter::new(5).unwrap();
        let pc = PeriodicCoeffs::from_character(&chi).unwrap();
        let l = lambert_series(&chi, &n).unwrap();
        let d = logderiv_representation(&pc, &n).unwrap();
        assert!(l.abs_diff(&d).is_below_pow10(45), "{l} vs {d}");
        let zero = PeriodicCoeffs::from_ints(&[0, 0, 0]).unwrap();
        assert!(logderiv_representation(&zero, &n)
            .unwrap()
            .value()
            .is_zero());
    }

    #[test]
    fn eta_quotients() {
        for g in [9, 25, 225] {
            assert!(conjecture2_etaquotient(g, 120).unwrap().holds(), "g={g}");
        }
        assert!(conjecture2_etaquotient(10, 20).is_err());
    }
}
