use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest working precision accepted anywhere in the crate.
pub const MIN_DIGITS: u32 = 30;
/// Guard digits carried internally unless the caller says otherwise.
pub const DEFAULT_GUARD: u32 = 20;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision: `digits` user-visible decimal digits plus `guard`
/// digits of internal headroom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    digits: u32,
    guard: u32,
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_guard(digits, DEFAULT_GUARD)
    }

    pub fn with_guard(digits: u32, guard: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::Precision(format!(
                "{digits} digits requested, minimum is {MIN_DIGITS}"
            )));
        }
        Ok(Self { digits, guard })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// digits + guard, the precision every intermediate is carried at.
    pub fn internal_digits(&self) -> u32 {
        self.digits + self.guard
    }

    /// Binary precision for MPFR values.
    pub fn bits(&self) -> u32 {
        (f64::from(self.internal_digits()) * LOG2_10).ceil() as u32 + 16
    }

    /// Same guard, different visible digits.
    pub fn with_digits(&self, digits: u32) -> Result<Self> {
        Self::with_guard(digits, self.guard)
    }

    /// Context at twice the visible precision, used for re-verification.
    pub fn doubled(&self) -> Self {
        Self {
            digits: self.digits * 2,
            guard: self.guard,
        }
    }

    /// Exponent `e` such that series/products are truncated once terms drop
    /// below `10^-e`.
    pub fn truncation_exponent(&self) -> u32 {
        self.digits + self.guard
    }

    /// Default identity tolerance exponent, `digits - guard`.
    pub fn tolerance_exponent(&self) -> u32 {
        self.digits.saturating_sub(self.guard)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(29).is_err());
        assert!(PrecisionContext::new(30).is_ok());
    }

    #[test]
    fn bits_cover_internal_digits() {
        let ctx = PrecisionContext::new(100).unwrap();
        assert_eq!(ctx.internal_digits(), 120);
        assert!(f64::from(ctx.bits()) >= 120.0 * LOG2_10);
        assert_eq!(ctx.doubled().digits(), 200);
    }
}
