//! Exact rationals used for every parameter that the mathematics needs
//! exactly (agile parameters, nome parameters, periodic coefficients).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::{Float, Integer};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational number in lowest terms with positive denominator.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(rug::Rational);

impl Rational {
    pub fn new(num: impl Into<Integer>, den: impl Into<Integer>) -> Result<Self> {
        let den = den.into();
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Self(rug::Rational::from((num.into(), den))))
    }

    pub fn from_int(n: i64) -> Self {
        Self(rug::Rational::from(n))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn is_positive(&self) -> bool {
        self.0.cmp0() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.0.cmp0() == Ordering::Less
    }

    pub fn is_integer(&self) -> bool {
        *self.0.denom() == 1
    }

    /// The value as an `i64` when it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn to_float(&self, prec: u32) -> Float {
        Float::with_val(prec, &self.0)
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        Ok(Self(self.0.clone().recip()))
    }

    pub fn abs(&self) -> Self {
        Self(self.0.clone().abs())
    }

    pub fn floor(&self) -> Integer {
        self.0.clone().floor().into_numer_denom().0
    }

    pub fn pow(&self, e: u32) -> Self {
        use rug::ops::Pow;
        Self(rug::Rational::from((&self.0).pow(e)))
    }

    pub fn as_rug(&self) -> &rug::Rational {
        &self.0
    }

    pub fn into_rug(self) -> rug::Rational {
        self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Self::from_int(n.into())
    }
}

impl From<Integer> for Rational {
    fn from(n: Integer) -> Self {
        Self(rug::Rational::from(n))
    }
}

impl From<rug::Rational> for Rational {
    fn from(r: rug::Rational) -> Self {
        Self(r)
    }
}

/// Parses `n`, `-n` or `n/d`. Decimal notation is rejected: the callers of
/// this type need exact values.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.contains(['.', 'e', 'E']) {
            return Err(Error::Parse(format!(
                "'{s}' is not an exact rational (expected n or n/d)"
            )));
        }
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: Integer = num
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in '{s}'")))?;
        let den: Integer = den
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in '{s}'")))?;
        Self::new(num, den).map_err(|_| Error::Parse(format!("zero denominator in '{s}'")))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(rug::Rational::from($tr::$method(&self.0, &rhs.0)))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($tr::$method(self.0, rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($tr::$method(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

/// Panics on division by zero, like the primitive types.
impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        Rational(rug::Rational::from(&self.0 / &rhs.0))
    }
}

impl Div<Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(rug::Rational::from(-&self.0))
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

/// Shorthand used heavily in tests and parameter tables.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den).expect("nonzero denominator")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_normalizes() {
        let r: Rational = "6/-4".parse().unwrap();
        assert_eq!(r, rat(-3, 2));
        assert_eq!(r.denom(), &2);
        assert_eq!("7".parse::<Rational>().unwrap(), rat(7, 1));
        assert_eq!(rat(10, 5).to_string(), "2");
    }

    #[test]
    fn rejects_decimals_and_zero_denominator() {
        assert!("0.5".parse::<Rational>().is_err());
        assert!("1e3".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
    }

    #[test]
    fn serde_uses_fraction_strings() {
        let v = vec![rat(1, 2), rat(-3, 1)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["1/2","-3"]"#);
        let back: Vec<Rational> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn arithmetic() {
        let a = rat(1, 3);
        let b = rat(1, 6);
        assert_eq!(&a + &b, rat(1, 2));
        assert_eq!(&a - &b, rat(1, 6));
        assert_eq!(&a * &b, rat(1, 18));
        assert_eq!(&a / &b, rat(2, 1));
        assert_eq!(rat(-7, 2).floor(), -4);
        assert_eq!(rat(2, 3).pow(3), rat(8, 27));
    }
}
