//! High-precision q-series toolkit: agiles (two-sided q-products), theta and
//! eta functions, elliptic singular moduli, the Rogers-Ramanujan continued
//! fraction, Moebius-periodic exponent sequences, and algebraic-number
//! recognition by lattice reduction.

pub mod elliptic;
pub mod error;
pub mod harness;
pub mod hp;
pub mod modular;
pub mod moebius;
pub mod qengine;
pub mod recognizer;
pub mod report;

pub use error::{Error, Result};
