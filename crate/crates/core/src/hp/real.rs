//! High-precision reals backed by MPFR.

use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use super::context::PrecisionContext;
use super::rational::Rational;
use crate::error::{Error, Result};

/// A finite MPFR value tagged with the context it was computed under.
#[derive(Clone, Debug, PartialEq)]
pub struct HPReal {
    value: Float,
    ctx: PrecisionContext,
}

impl HPReal {
    /// Wraps `value`, rounding it to the context's internal precision.
    /// NaN and infinities are errors, never values.
    pub fn new(value: Float, ctx: PrecisionContext) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain(format!("non-finite value {value}")));
        }
        let value = if value.prec() == ctx.bits() {
            value
        } else {
            Float::with_val(ctx.bits(), value)
        };
        Ok(Self { value, ctx })
    }

    pub fn from_rational(r: &Rational, ctx: PrecisionContext) -> Self {
        Self {
            value: r.to_float(ctx.bits()),
            ctx,
        }
    }

    pub fn from_i64(n: i64, ctx: PrecisionContext) -> Self {
        Self {
            value: Float::with_val(ctx.bits(), n),
            ctx,
        }
    }

    /// Parses a decimal literal, e.g. "1.41421356237".
    pub fn parse_decimal(s: &str, ctx: PrecisionContext) -> Result<Self> {
        let parsed = Float::parse(s.trim())
            .map_err(|e| Error::Parse(format!("'{s}' is not a decimal number: {e}")))?;
        Self::new(Float::with_val(ctx.bits(), parsed), ctx)
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn into_value(self) -> Float {
        self.value
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn abs_diff(&self, other: &HPReal) -> HPReal {
        let d = Float::with_val(self.ctx.bits(), &self.value - &other.value).abs();
        Self {
            value: d,
            ctx: self.ctx,
        }
    }

    /// Decimal rendering with `sig` significant digits.
    pub fn to_decimal(&self, sig: usize) -> String {
        format_decimal(&self.value, sig)
    }

    /// True when |self| < 10^-exp.
    pub fn is_below_pow10(&self, exp: u32) -> bool {
        below_pow10(&self.value, exp)
    }
}

impl fmt::Display for HPReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(self.ctx.digits() as usize))
    }
}

/// |x| < 10^-exp, decided with an exact comparison against the power of ten.
pub fn below_pow10(x: &Float, exp: u32) -> bool {
    if x.is_zero() {
        return true;
    }
    let prec = x.prec().max(64);
    let bound = Float::with_val(prec, Float::u_pow_u(10, exp)).recip();
    x.clone().abs() < bound
}

/// Fixed notation for moderate magnitudes, scientific otherwise.
pub fn format_decimal(x: &Float, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let sig = sig.max(1);
    let (neg, digits, exp) = x.to_sign_string_exp(10, Some(sig));
    let exp = exp.unwrap_or(0);
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if neg { "-" } else { "" };
    // value = 0.DIGITS * 10^exp
    if (-8..=40).contains(&exp) {
        let body = if exp <= 0 {
            format!("0.{}{}", "0".repeat((-exp) as usize), digits)
        } else {
            let e = exp as usize;
            if digits.len() <= e {
                format!("{}{}", digits, "0".repeat(e - digits.len()))
            } else {
                format!("{}.{}", &digits[..e], &digits[e..])
            }
        };
        format!("{sign}{body}")
    } else {
        let (head, tail) = digits.split_at(1);
        let tail = if tail.is_empty() {
            String::new()
        } else {
            format!(".{tail}")
        };
        format!("{sign}{head}{tail}e{}", exp - 1)
    }
}

/// Short scientific form used for residuals and tolerances, e.g. "3.2e-105".
pub fn format_scientific(x: &Float, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let (neg, digits, exp) = x.to_sign_string_exp(10, Some(sig.max(1)));
    let exp = exp.unwrap_or(0);
    let (head, tail) = digits.split_at(1);
    let tail = tail.trim_end_matches('0');
    let tail = if tail.is_empty() {
        String::new()
    } else {
        format!(".{tail}")
    };
    format!("{}{head}{tail}e{}", if neg { "-" } else { "" }, exp - 1)
}

/// Which elementary function [`elem`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElemFn {
    Exp,
    Log,
    PowRational,
    NthRoot,
}

/// π to the context precision.
pub fn pi_const(ctx: PrecisionContext) -> HPReal {
    HPReal {
        value: Float::with_val(ctx.bits(), Constant::Pi),
        ctx,
    }
}

/// Dispatches one elementary function. `extra` is the exponent for
/// `PowRational` and the (integer) root index for `NthRoot`.
pub fn elem(f: ElemFn, x: &HPReal, extra: Option<&Rational>) -> Result<HPReal> {
    match f {
        ElemFn::Exp => Ok(exp(x)),
        ElemFn::Log => log(x),
        ElemFn::PowRational => {
            let e = extra.ok_or_else(|| Error::Domain("pow_rational needs an exponent".into()))?;
            pow_rational(x, e)
        }
        ElemFn::NthRoot => {
            let n = extra
                .and_then(Rational::to_i64)
                .filter(|n| *n >= 1)
                .ok_or_else(|| Error::Domain("nth_root needs a positive integer index".into()))?;
            nth_root(x, n as u32)
        }
    }
}

pub fn exp(x: &HPReal) -> HPReal {
    HPReal {
        value: x.value.clone().exp(),
        ctx: x.ctx,
    }
}

pub fn log(x: &HPReal) -> Result<HPReal> {
    if x.value.cmp0() != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Domain(format!(
            "log of non-positive value {}",
            x.to_decimal(12)
        )));
    }
    Ok(HPReal {
        value: x.value.clone().ln(),
        ctx: x.ctx,
    })
}

/// x^e on the principal positive branch; x must be positive (or zero with
/// a positive exponent).
pub fn pow_rational(x: &HPReal, e: &Rational) -> Result<HPReal> {
    let value = pow_rational_float(&x.value, e)?;
    Ok(HPReal { value, ctx: x.ctx })
}

pub fn pow_rational_float(x: &Float, e: &Rational) -> Result<Float> {
    match x.cmp0() {
        Some(std::cmp::Ordering::Greater) => {}
        Some(std::cmp::Ordering::Equal) if e.is_positive() => {
            return Ok(Float::with_val(x.prec(), 0));
        }
        _ => {
            return Err(Error::Domain(format!(
                "pow_rational needs a positive base, got {}",
                format_scientific(x, 6)
            )))
        }
    }
    if let Some(n) = e.to_i64().filter(|n| n.unsigned_abs() <= 64) {
        return Ok(Float::with_val(x.prec(), x.pow(n as i32)));
    }
    let ex = e.to_float(x.prec());
    Ok(Float::exp(Float::with_val(x.prec(), x.ln_ref()) * ex))
}

/// Real n-th root. Odd roots of negative numbers are negative; even roots
/// of negative numbers are a domain error.
pub fn nth_root(x: &HPReal, n: u32) -> Result<HPReal> {
    if n == 0 {
        return Err(Error::Domain("0th root".into()));
    }
    if x.value.is_sign_negative() && !x.value.is_zero() && n.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "even root of negative value {}",
            x.to_decimal(12)
        )));
    }
    Ok(HPReal {
        value: x.value.clone().root(n),
        ctx: x.ctx,
    })
}
