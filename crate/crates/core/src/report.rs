//! Machine-readable outcome of one identity check.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hp::real::{format_decimal, format_scientific};
use crate::hp::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Measured and reported, but not asserted.
    Recorded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub id: String,
    pub lhs: String,
    pub rhs: String,
    pub abs_difference: String,
    pub tolerance: String,
    pub verdict: Verdict,
    pub wall_time_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

const SHOWN_DIGITS: usize = 40;

fn pow10_neg(exp: u32, prec: u32) -> Float {
    Float::with_val(prec, Float::u_pow_u(10, exp)).recip()
}

impl IdentityReport {
    fn build(id: &str, lhs: &Float, rhs: &Float, diff: Float, tol_exp: u32) -> Self {
        let prec = lhs.prec().max(rhs.prec());
        let tol = pow10_neg(tol_exp, prec);
        let verdict = if diff.is_finite() && diff < tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            id: id.to_string(),
            lhs: format_decimal(lhs, SHOWN_DIGITS),
            rhs: format_decimal(rhs, SHOWN_DIGITS),
            abs_difference: format_scientific(&diff, 6),
            tolerance: format!("1e-{tol_exp}"),
            verdict,
            wall_time_ms: 0,
            note: None,
        }
    }

    /// Pass iff |lhs − rhs| < 10^−tol_exp.
    pub fn compare(id: &str, lhs: &Float, rhs: &Float, tol_exp: u32) -> Self {
        let prec = lhs.prec().max(rhs.prec());
        let diff = Float::with_val(prec, lhs - rhs).abs();
        Self::build(id, lhs, rhs, diff, tol_exp)
    }

    /// Pass iff |lhs − rhs|/|rhs| < 10^−tol_exp; the difference column
    /// then holds the relative difference.
    pub fn compare_relative(id: &str, lhs: &Float, rhs: &Float, tol_exp: u32) -> Self {
        let prec = lhs.prec().max(rhs.prec());
        let diff = Float::with_val(prec, lhs - rhs).abs() / Float::with_val(prec, rhs.abs_ref());
        Self::build(id, lhs, rhs, diff, tol_exp).with_note("relative difference")
    }

    /// A coefficientwise identity between two exact series.
    pub fn exact(id: &str, order: usize, first_mismatch: Option<usize>) -> Self {
        let shown = format!("series to order {order}");
        let (abs_difference, verdict) = match first_mismatch {
            None => ("0".to_string(), Verdict::Pass),
            Some(n) => (format!("mismatch at q^{n}"), Verdict::Fail),
        };
        Self {
            id: id.to_string(),
            lhs: shown.clone(),
            rhs: shown,
            abs_difference,
            tolerance: "0".into(),
            verdict,
            wall_time_ms: 0,
            note: None,
        }
    }

    /// Exact equality of two rationals.
    pub fn rational(id: &str, lhs: &Rational, rhs: &Rational) -> Self {
        let diff = (lhs - rhs).abs();
        Self {
            id: id.to_string(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            abs_difference: diff.to_string(),
            tolerance: "0".into(),
            verdict: if diff.is_zero() {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            wall_time_ms: 0,
            note: None,
        }
    }

    /// A check that could not be evaluated.
    pub fn error(id: &str, err: &Error, tol_exp: u32) -> Self {
        Self {
            id: id.to_string(),
            lhs: String::new(),
            rhs: String::new(),
            abs_difference: String::new(),
            tolerance: format!("1e-{tol_exp}"),
            verdict: Verdict::Fail,
            wall_time_ms: 0,
            note: Some(format!("error: {err}")),
        }
    }

    pub fn recorded(mut self) -> Self {
        self.verdict = Verdict::Recorded;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        self.note = Some(match self.note.take() {
            Some(old) => format!("{old}; {note}"),
            None => note,
        });
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let a = Float::with_val(200, 1);
        let b = Float::with_val(200, 1) + Float::with_val(200, 1e-60);
        assert!(IdentityReport::compare("x", &a, &b, 50).passed());
        assert!(!IdentityReport::compare("x", &a, &b, 70).passed());
        let r = IdentityReport::compare("x", &a, &b, 70).recorded();
        assert_eq!(r.verdict, Verdict::Recorded);
        assert!(IdentityReport::exact("s", 10, None).passed());
        assert!(!IdentityReport::exact("s", 10, Some(3)).passed());
    }
}
