use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::Rational;

/// μ(n): 0 unless n is squarefree, else (−1)^{number of prime factors}.
pub fn moebius_mu(n: u64) -> i8 {
    assert!(n >= 1, "moebius_mu is defined for n >= 1");
    let mut n = n;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Kronecker symbol (n/2).
fn kronecker_two(n: i64) -> i8 {
    match n.rem_euclid(8) {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// Jacobi symbol (n/m) for odd m ≥ 1.
fn jacobi_odd(n: i64, m: u64) -> i8 {
    let mut a = n.rem_euclid(m as i64) as u64;
    let mut m = m;
    let mut t = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if m % 8 == 3 || m % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            t = -t;
        }
        a %= m;
    }
    if m == 1 {
        t
    } else {
        0
    }
}

/// (n/G). For odd G this is the Jacobi symbol; a factor 2^m with m ≥ 2
/// contributes the Kronecker symbol (n/2)^m. G ≡ 2 (mod 4) is rejected.
pub fn jacobi_symbol(n: i64, g: u64) -> Result<i8> {
    if g == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let twos = g.trailing_zeros();
    if twos == 1 {
        return Err(Error::Domain(format!(
            "modulus {g} has exactly one factor of 2"
        )));
    }
    let odd = g >> twos;
    let mut v = jacobi_odd(n, odd);
    for _ in 0..twos {
        v *= kronecker_two(n);
    }
    Ok(v)
}

/// X(n) = (n/G), a completely multiplicative character of period G.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobiCharacter {
    pub modulus: u64,
}

impl JacobiCharacter {
    pub fn new(modulus: u64) -> Result<Self> {
        jacobi_symbol(1, modulus)?;
        Ok(Self { modulus })
    }

    pub fn value(&self, n: u64) -> i8 {
        jacobi_symbol(n as i64, self.modulus).expect("modulus validated")
    }

    /// One full period a₁..a_G.
    pub fn period_values(&self) -> Vec<Rational> {
        (1..=self.modulus)
            .map(|n| Rational::from_int(i64::from(self.value(n))))
            .collect()
    }
}

/// Taylor coefficients c₁..c_N of f (c₀ = 0), 1-based in the JSON form
/// {"coeffs": ["1/1", "1/2", ...]}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorInput {
    pub coeffs: Vec<Rational>,
}

impl TaylorInput {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InsufficientData(
                "at least one Taylor coefficient is needed".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let input: TaylorInput =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("Taylor input: {e}")))?;
        Self::new(input.coeffs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("rationals serialize")
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// c_n for 1 ≤ n ≤ N.
    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n - 1]
    }
}

/// X(n) = (1/n)·Σ_{d|n} μ(n/d)·d·c_d, for n = 1..N (returned 0-based).
pub fn extract_x(input: &TaylorInput) -> Vec<Rational> {
    (1..=input.len() as u64)
        .map(|n| {
            let mut acc = Rational::zero();
            for d in divisors(n) {
                let mu = moebius_mu(n / d);
                if mu == 0 {
                    continue;
                }
                let term =
                    input.coeff(d as usize) * &Rational::from_int((d as i64) * i64::from(mu));
                acc += &term;
            }
            &acc * &Rational::new(1, n as i64).expect("n > 0")
        })
        .collect()
}

/// c_n = (1/n)·Σ_{d|n} d·X(d): the Taylor coefficients of
/// f = −Σ X(n)·log(1−xⁿ).
pub fn taylor_from_x(x: &[Rational]) -> TaylorInput {
    let coeffs = (1..=x.len() as u64)
        .map(|n| {
            let mut acc = Rational::zero();
            for d in divisors(n) {
                acc += &(&x[d as usize - 1] * &Rational::from_int(d as i64));
            }
            &acc * &Rational::new(1, n as i64).expect("n > 0")
        })
        .collect();
    TaylorInput { coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_values() {
        assert_eq!([1, 3, 15, 12].map(moebius_mu), [1, -1, 1, 0]);
        assert_eq!(moebius_mu(30), -1);
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }

    #[test]
    fn jacobi_mod_five() {
        let v: Vec<i8> = (1..=5).map(|n| jacobi_symbol(n, 5).unwrap()).collect();
        assert_eq!(v, vec![1, -1, -1, 1, 0]);
        assert!(jacobi_symbol(3, 10).is_err());
        assert_eq!(jacobi_symbol(7, 1).unwrap(), 1);
    }

    #[test]
    fn jacobi_even_moduli() {
        let v: Vec<i8> = (1..=8).map(|n| jacobi_symbol(n, 8).unwrap()).collect();
        assert_eq!(v, vec![1, 0, -1, 0, -1, 0, 1, 0]);
        assert_eq!(jacobi_symbol(3, 4).unwrap(), 1);
        assert_eq!(jacobi_symbol(2, 4).unwrap(), 0);
    }

    #[test]
    fn log_one_minus_x() {
        let input =
            TaylorInput::new((1..=12).map(|n| Rational::new(1, n).unwrap()).collect()).unwrap();
        let x = extract_x(&input);
        assert_eq!(x[0], Rational::one());
        assert!(x[1..].iter().all(Rational::is_zero));
    }

    #[test]
    fn json_input() {
        let input = TaylorInput::from_json(r#"{"coeffs": ["1/1", "1/2", "1/3"]}"#).unwrap();
        assert_eq!(input.coeff(2), &Rational::new(1, 2).unwrap());
        assert!(TaylorInput::from_json(r#"{"coeffs": []}"#).is_err());
        assert!(TaylorInput::from_json(r#"{"coeffs": ["0.5"]}"#).is_err());
        let back = TaylorInput::from_json(&input.to_json()).unwrap();
        assert_eq!(back, input);
    }
}
