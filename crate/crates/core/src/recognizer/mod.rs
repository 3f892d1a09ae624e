//! Algebraic-number recognition: integer relations among 1, x, …, x^d
//! found by LLL on a knapsack lattice, with a second evaluation at
//! doubled precision before a polynomial is accepted.

mod lattice;
mod pipeline;

use rug::{Float, Integer};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hp::real::{below_pow10, format_scientific};
use crate::hp::{HPReal, PrecisionContext};

pub use lattice::lattice_reduce;
pub use pipeline::{
    probe_q_function, q_closed_form_check, recognize_expression, Expression, NomeSource, QProbe,
};

/// Primitive integer polynomial c₀ + c₁x + … + c_d x^d with c_d > 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerPolynomial {
    coeffs: Vec<Integer>,
}

impl IntegerPolynomial {
    /// Normalizes: drops leading zeros, divides by the content and makes
    /// the leading coefficient positive.
    pub fn new(mut coeffs: Vec<Integer>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::Domain("zero polynomial".into()));
        }
        let mut g = Integer::new();
        for c in &coeffs {
            g.gcd_mut(c);
        }
        if coeffs.last().expect("nonempty").cmp0() == std::cmp::Ordering::Less {
            g = -g;
        }
        for c in &mut coeffs {
            *c /= &g;
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    /// max |c_i|
    pub fn height(&self) -> Integer {
        self.coeffs
            .iter()
            .map(|c| c.clone().abs())
            .max()
            .expect("nonempty")
    }

    pub fn eval(&self, x: &Float) -> Float {
        let prec = x.prec();
        let mut acc = Float::with_val(prec, 0);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Whether this polynomial divides `other` over ℚ.
    pub fn divides(&self, other: &IntegerPolynomial) -> bool {
        let mut rem: Vec<rug::Rational> = other.coeffs.iter().map(rug::Rational::from).collect();
        let d = self.degree();
        let lead = rug::Rational::from(&self.coeffs[d]);
        while rem.len() > d {
            let top = rem.len() - 1;
            let f = rug::Rational::from(&rem[top] / &lead);
            for (i, c) in self.coeffs.iter().enumerate() {
                rem[top - d + i] -= rug::Rational::from(&f * c);
            }
            rem.pop();
        }
        rem.iter().all(|c| *c == 0)
    }
}

impl std::fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let mag = c.clone().abs();
            let sign = if c.cmp0() == std::cmp::Ordering::Less {
                "-"
            } else {
                "+"
            };
            if first {
                if c.cmp0() == std::cmp::Ordering::Less {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let show_mag = mag != 1 || i == 0;
            match (i, show_mag) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "{mag}x")?,
                (1, false) => write!(f, "x")?,
                (_, true) => write!(f, "{mag}x^{i}")?,
                (_, false) => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntegerPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            match c.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntegerPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Coeff {
            Int(i64),
            Text(String),
        }
        let raw = Vec::<Coeff>::deserialize(d)?;
        let mut coeffs = Vec::with_capacity(raw.len());
        for c in raw {
            coeffs.push(match c {
                Coeff::Int(v) => Integer::from(v),
                Coeff::Text(t) => {
                    Integer::from_str_radix(&t, 10).map_err(serde::de::Error::custom)?
                }
            });
        }
        IntegerPolynomial::new(coeffs).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecognitionStatus {
    #[serde(rename = "recognized")]
    Recognized,
    /// No relation within the degree and height bounds.
    #[serde(rename = "refuted-at-bounds")]
    RefutedAtBounds,
    /// A candidate passed at working precision but could not be confirmed.
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl std::fmt::Display for RecognitionStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RecognitionStatus::Recognized => "recognized",
            RecognitionStatus::RefutedAtBounds => "refuted-at-bounds",
            RecognitionStatus::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognitionResult {
    pub poly: Option<IntegerPolynomial>,
    pub residual: String,
    pub verified_residual: String,
    pub status: RecognitionStatus,
    pub digits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl RecognitionResult {
    pub fn recognized(&self) -> bool {
        self.status == RecognitionStatus::Recognized
    }
}

/// Search bounds for [`recognize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_degree: usize,
    pub height_digits: u32,
}

impl Bounds {
    pub fn new(max_degree: usize, height_digits: u32) -> Result<Self> {
        if max_degree == 0 || height_digits == 0 {
            return Err(Error::Domain(
                "degree and height bounds must be positive".into(),
            ));
        }
        Ok(Self {
            max_degree,
            height_digits,
        })
    }

    /// Digits needed: max_degree·height_digits + 2·guard.
    pub fn digits_needed(&self, guard: u32) -> u32 {
        self.max_degree as u32 * self.height_digits + 2 * guard
    }
}

fn check_precision(bounds: Bounds, ctx: PrecisionContext) -> Result<()> {
    let needed = bounds.digits_needed(ctx.guard());
    if ctx.digits() < needed {
        return Err(Error::InsufficientPrecision {
            needed,
            have: ctx.digits(),
        });
    }
    Ok(())
}

fn first_tier_exponent(ctx: PrecisionContext, d: usize, h: u32) -> i64 {
    i64::from(ctx.digits()) - (d as i64) * i64::from(h) - i64::from(ctx.guard())
}

/// Candidate relation of degree ≤ d from the reduced knapsack lattice on
/// (1, x, …, x^d) with weight 10^{digits−guard}.
fn candidates(x: &Float, d: usize, ctx: PrecisionContext) -> Result<Vec<IntegerPolynomial>> {
    let prec = x.prec();
    let scale = Float::with_val(prec, Float::u_pow_u(10, ctx.digits() - ctx.guard()));
    let mut basis = Vec::with_capacity(d + 1);
    let mut pw = Float::with_val(prec, 1);
    for i in 0..=d {
        let mut row = vec![Integer::new(); d + 2];
        row[i] = Integer::from(1);
        let scaled = Float::with_val(prec, &pw * &scale);
        row[d + 1] = scaled
            .to_integer()
            .ok_or_else(|| Error::Domain("value is not finite".into()))?;
        basis.push(row);
        pw *= x;
    }
    let reduced = lattice_reduce(&basis)?;
    Ok(reduced
        .into_iter()
        .filter_map(|row| IntegerPolynomial::new(row[..=d].to_vec()).ok())
        .filter(|p| p.degree() >= 1)
        .collect())
}

fn within_height(p: &IntegerPolynomial, h: u32) -> bool {
    p.height() <= Integer::from(Integer::u_pow_u(10, h))
}

/// First candidate (ascending degree) whose residual at working precision
/// is below 10^{−(digits − d·height_digits − guard)}.
fn search(x: &HPReal, bounds: Bounds) -> Result<Option<(IntegerPolynomial, Float)>> {
    let ctx = x.ctx();
    for d in 1..=bounds.max_degree {
        let e = first_tier_exponent(ctx, d, bounds.height_digits);
        if e <= 0 {
            break;
        }
        for p in candidates(x.value(), d, ctx)? {
            if p.degree() != d || !within_height(&p, bounds.height_digits) {
                continue;
            }
            let res = p.eval(x.value()).abs();
            if below_pow10(&res, e as u32) {
                return Ok(Some((p, res)));
            }
        }
    }
    Ok(None)
}

fn show(x: &Float) -> String {
    if x.is_zero() {
        "0".into()
    } else {
        format_scientific(x, 3)
    }
}

/// Recognizes a value that can be recomputed at any precision: the search
/// runs at `ctx`, and a candidate is accepted only if its residual at
/// doubled precision is below 10^{−(2·digits − d·height_digits − guard)}.
pub fn recognize_with<F>(
    eval: F,
    bounds: Bounds,
    ctx: PrecisionContext,
) -> Result<RecognitionResult>
where
    F: Fn(PrecisionContext) -> Result<HPReal>,
{
    check_precision(bounds, ctx)?;
    let x = eval(ctx)?;
    let Some((poly, res)) = search(&x, bounds)? else {
        return Ok(RecognitionResult {
            poly: None,
            residual: String::new(),
            verified_residual: String::new(),
            status: RecognitionStatus::RefutedAtBounds,
            digits: ctx.digits(),
            provenance: None,
        });
    };
    let doubled = ctx.doubled();
    let x2 = eval(doubled)?;
    let vres = poly.eval(x2.value()).abs();
    let e = 2 * i64::from(ctx.digits())
        - poly.degree() as i64 * i64::from(bounds.height_digits)
        - i64::from(ctx.guard());
    let status = if e > 0 && below_pow10(&vres, e as u32) {
        RecognitionStatus::Recognized
    } else {
        RecognitionStatus::Inconclusive
    };
    Ok(RecognitionResult {
        poly: Some(poly),
        residual: show(&res),
        verified_residual: show(&vres),
        status,
        digits: ctx.digits(),
        provenance: None,
    })
}

/// Recognizes a fixed value. The value is taken as exact when it is
/// re-checked at doubled precision, so a rounded irrational input can at
/// best come back inconclusive; use [`recognize_with`] when the value can
/// be recomputed.
pub fn recognize(x: &HPReal, bounds: Bounds) -> Result<RecognitionResult> {
    let ctx = x.ctx();
    let value = x.value().clone();
    recognize_with(
        move |c: PrecisionContext| HPReal::new(Float::with_val(c.bits(), &value), c),
        bounds,
        ctx,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    #[test]
    fn normalization() {
        let p = IntegerPolynomial::from_i64(&[4, -2, -6, 0]).unwrap();
        assert_eq!(
            p.coeffs(),
            &[Integer::from(-2), Integer::from(1), Integer::from(3)][..]
        );
        assert_eq!(p.to_string(), "3x^2 + x - 2");
        assert!(IntegerPolynomial::from_i64(&[0, 0]).is_err());
    }

    #[test]
    fn divisibility() {
        let p = IntegerPolynomial::from_i64(&[-2, 0, 1]).unwrap();
        let q = IntegerPolynomial::from_i64(&[-2, 1, 1, 0, 0]).unwrap();
        let pq = IntegerPolynomial::from_i64(&[4, -2, -4, 1, 1]).unwrap();
        assert!(p.divides(&pq));
        assert!(!p.divides(&q));
    }

    #[test]
    fn square_root_two() {
        let r = recognize_with(
            |c| HPReal::new(Float::with_val(c.bits(), 2).sqrt(), c),
            Bounds::new(4, 5).unwrap(),
            ctx(60),
        )
        .unwrap();
        assert!(r.recognized(), "{r:?}");
        assert_eq!(
            r.poly.unwrap(),
            IntegerPolynomial::from_i64(&[-2, 0, 1]).unwrap()
        );
    }

    #[test]
    fn rational_value() {
        let c = ctx(60);
        let x = HPReal::parse_decimal("0.75", c).unwrap();
        let r = recognize(&x, Bounds::new(3, 5).unwrap()).unwrap();
        assert!(r.recognized());
        assert_eq!(
            r.poly.unwrap(),
            IntegerPolynomial::from_i64(&[-3, 4]).unwrap()
        );
    }

    #[test]
    fn precision_guard() {
        let c = ctx(60);
        let x = HPReal::from_i64(2, c);
        let err = recognize(&x, Bounds::new(10, 10).unwrap()).unwrap_err();
        assert_eq!(
            err,
            Error::InsufficientPrecision {
                needed: 140,
                have: 60
            }
        );
    }

    #[test]
    fn pi_is_not_recognized() {
        let r = recognize_with(
            |c| Ok(crate::hp::pi_const(c)),
            Bounds::new(4, 5).unwrap(),
            ctx(80),
        )
        .unwrap();
        assert!(!r.recognized());
    }

    #[test]
    fn json_shape() {
        let r = RecognitionResult {
            poly: Some(IntegerPolynomial::from_i64(&[-2, 0, 1]).unwrap()),
            residual: "1e-70".into(),
            verified_residual: "1e-140".into(),
            status: RecognitionStatus::Recognized,
            digits: 80,
            provenance: None,
        };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"poly":[-2,0,1],"residual":"1e-70","verified_residual":"1e-140","status":"recognized","digits":80}"#
        );
        let back: RecognitionResult = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
