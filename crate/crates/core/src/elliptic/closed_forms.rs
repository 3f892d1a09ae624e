//! Closed forms for Σ_{n∈ℤ} q^{n²+mn} in terms of k_r and K(k_r).

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use super::modulus_pair;
use crate::error::Result;
use crate::hp::{HPReal, Rational};
use crate::qengine::Nome;

/// How k₂₂ is read in the odd-m closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OddPowersumReading {
    /// k₂₂ = √(1 − k₂₁²): the form that matches the direct sum.
    Corrected,
    /// k₂₂ = √(1 − k₁₂²) as printed; kept for the record, does not match.
    AsPrinted,
}

/// Even m = 2m′: q^{−m′²}·√(2K/π).
/// Odd m: 2^{5/6}·q^{−m²/4}·(k₁₁k₁₂k₂₁)^{1/6}/k₂₂^{1/3}·√(K/π) with
/// k₁₁ = k_r, k₁₂ = k′_r, k₂₁ = (2 − k₁₁² − 2k₁₂)/k₁₁².
pub fn powersum_closed_form(m: i64, nome: &Nome, reading: OddPowersumReading) -> Result<HPReal> {
    let prec = nome.prec();
    let (k, kp) = modulus_pair(nome.r(), nome.ctx())?;
    let big_k = super::k_from_complement(&kp, prec);
    let pi = Float::with_val(prec, Constant::Pi);
    let value = if m.rem_euclid(2) == 0 {
        let half = m / 2;
        let shift = nome.pow(&Rational::from_int(-half * half));
        (Float::with_val(prec, &big_k * 2u32) / &pi).sqrt() * shift
    } else {
        // 2 − k² − 2k′ = (1 − k′)², so k₂₁ = (k/(1 + k′))² without cancellation
        let k21 = Float::with_val(prec, &k / Float::with_val(prec, 1u32 + &kp)).square();
        let k22 = match reading {
            OddPowersumReading::Corrected => super::complement(&k21, prec),
            OddPowersumReading::AsPrinted => super::complement(&kp, prec),
        };
        let prod = Float::with_val(prec, &k * &kp) * &k21;
        let sixth = prod.root(6);
        let cube = k22.root(3);
        let two56 = Float::with_val(prec, 2).pow(Float::with_val(prec, 5) / 6u32);
        let shift = nome.pow(&Rational::new(-(m * m), 4)?);
        let root_k = Float::with_val(prec, &big_k / &pi).sqrt();
        two56 * shift * sixth / cube * root_k
    };
    HPReal::new(value, nome.ctx())
}
