use serde::{Deserialize, Serialize};

use super::arith::JacobiCharacter;
use crate::error::{Error, Result};
use crate::hp::Rational;

/// An exact rational sequence X(1), X(2), ...
pub trait Sequence: Sync {
    fn at(&self, n: u64) -> Rational;
}

impl Sequence for JacobiCharacter {
    fn at(&self, n: u64) -> Rational {
        Rational::from_int(i64::from(self.value(n)))
    }
}

impl<F: Fn(u64) -> Rational + Sync> Sequence for F {
    fn at(&self, n: u64) -> Rational {
        self(n)
    }
}

/// One period a₁..a_T of a periodic sequence with a_T = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicCoeffs {
    pub period: usize,
    pub values: Vec<Rational>,
    pub catoptric: bool,
    #[serde(rename = "A")]
    pub a: Rational,
}

impl PeriodicCoeffs {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        let period = values.len();
        if period == 0 {
            return Err(Error::InsufficientData("empty period".into()));
        }
        if !values[period - 1].is_zero() {
            return Err(Error::Domain(format!(
                "a_T must vanish, got {}",
                values[period - 1]
            )));
        }
        let catoptric = (1..period).all(|j| values[j - 1] == values[period - j - 1]);
        let a = exponent_sum(&values);
        Ok(Self {
            period,
            values,
            catoptric,
            a,
        })
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Rational::from_int(v)).collect())
    }

    pub fn from_character(chi: &JacobiCharacter) -> Result<Self> {
        Self::new(chi.period_values())
    }

    /// a_j for 1 ≤ j ≤ T.
    pub fn value(&self, j: usize) -> &Rational {
        &self.values[j - 1]
    }

    /// For even T, the mirror-fixed class a_{T/2}.
    pub fn middle(&self) -> Option<&Rational> {
        self.period
            .is_multiple_of(2)
            .then(|| self.value(self.period / 2))
    }

    /// The exponent that makes q^E·e^{−f} a product of normalized agiles.
    /// Equal to A except for even T with a_{T/2} ≠ 0, where the class
    /// n ≡ T/2 contributes [T/2,T]^{a/2} with exponent −T/24 each.
    pub fn normalizing_exponent(&self) -> Rational {
        match self.middle() {
            Some(m) if !m.is_zero() => {
                let t = self.period as i64;
                &self.a + &(m * &Rational::new(-t, 48).expect("T > 0"))
            }
            _ => self.a.clone(),
        }
    }
}

impl Sequence for PeriodicCoeffs {
    fn at(&self, n: u64) -> Rational {
        let idx = ((n - 1) % self.period as u64) as usize;
        self.values[idx].clone()
    }
}

fn exponent_sum(values: &[Rational]) -> Rational {
    let t = values.len() as i64;
    let mut acc = Rational::zero();
    for j in 1..=((t - 1) / 2) {
        let w = &(&Rational::new(-j, 2).expect("2") + &Rational::new(j * j, 2 * t).expect("T > 0"))
            + &Rational::new(t, 12).expect("12");
        acc += &(&w * &values[j as usize - 1]);
    }
    acc
}

/// A = Σ_{j=1}^{⌊(T−1)/2⌋} (−j/2 + j²/(2T) + T/12)·a_j.
pub fn exponent_a(pc: &PeriodicCoeffs) -> Rational {
    exponent_sum(&pc.values)
}

/// Outcome of period detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Periodicity {
    Periodic(PeriodicCoeffs),
    /// X = c·δ_{n,1}: e^{−f} = (1−x)^c, no period with a_T = 0 exists.
    Linear {
        exponent: Rational,
    },
    NotPeriodic,
}

/// Smallest T ≤ max_period with X(k+T) = X(k) on the whole list and
/// a_T = 0. At least two full periods must be visible.
pub fn detect_period(x: &[Rational], max_period: usize) -> Result<Periodicity> {
    if x.is_empty() {
        return Err(Error::InsufficientData("empty sequence".into()));
    }
    if x.len() >= 2 && !x[0].is_zero() && x[1..].iter().all(Rational::is_zero) {
        return Ok(Periodicity::Linear {
            exponent: x[0].clone(),
        });
    }
    for t in 1..=max_period {
        if 2 * t > x.len() {
            return Err(Error::InsufficientData(format!(
                "{} terms cannot confirm a period up to {max_period}; need {}",
                x.len(),
                2 * max_period
            )));
        }
        if !x[t - 1].is_zero() {
            continue;
        }
        if (0..x.len() - t).all(|k| x[k + t] == x[k]) {
            return Ok(Periodicity::Periodic(PeriodicCoeffs::new(x[..t].to_vec())?));
        }
    }
    Ok(Periodicity::NotPeriodic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::rat;

    fn repeat(period: &[i64], len: usize) -> Vec<Rational> {
        (0..len)
            .map(|k| Rational::from_int(period[k % period.len()]))
            .collect()
    }

    #[test]
    fn examples_two_three() {
        let Periodicity::Periodic(pc) = detect_period(&repeat(&[1, 1, 0], 30), 10).unwrap() else {
            panic!("expected a period");
        };
        assert_eq!((pc.period, pc.catoptric), (3, true));
        assert_eq!(pc.a, rat(-1, 12));
        let Periodicity::Periodic(pc) = detect_period(&repeat(&[1, 1, 1, 1, 0], 30), 10).unwrap()
        else {
            panic!("expected a period");
        };
        assert_eq!(pc.period, 5);
        assert_eq!(exponent_a(&pc), rat(-1, 6));
    }

    #[test]
    fn character_mod_five() {
        let pc = PeriodicCoeffs::from_character(&JacobiCharacter::new(5).unwrap()).unwrap();
        assert!(pc.catoptric);
        assert_eq!(pc.a, rat(1, 5));
    }

    #[test]
    fn not_periodic_and_short() {
        let x: Vec<Rational> = (1..=40).map(Rational::from_int).collect();
        assert_eq!(detect_period(&x, 10).unwrap(), Periodicity::NotPeriodic);
        assert!(matches!(
            detect_period(&x[..10], 10),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn linear_case() {
        let mut x = vec![Rational::zero(); 20];
        x[0] = rat(2, 1);
        assert_eq!(
            detect_period(&x, 5).unwrap(),
            Periodicity::Linear {
                exponent: rat(2, 1)
            }
        );
    }

    #[test]
    fn non_catoptric_period() {
        let Periodicity::Periodic(pc) = detect_period(&repeat(&[1, -1, 0], 30), 5).unwrap() else {
            panic!("expected a period");
        };
        assert!(!pc.catoptric);
    }

    #[test]
    fn zero_values() {
        let pc = PeriodicCoeffs::from_ints(&[0, 0, 0, 0]).unwrap();
        assert!(exponent_a(&pc).is_zero());
        assert!(PeriodicCoeffs::from_ints(&[1, 1]).is_err());
    }
}
