//! Precision management, exact rationals, high-precision reals, quadrature
//! and the exact formal-series engine.

pub mod context;
pub mod quad;
pub mod rational;
pub mod real;
pub mod series;

pub use context::PrecisionContext;
pub use quad::{integrate, Bound, SubstitutionHint};
pub use rational::{rat, Rational};
pub use real::{
    elem, exp, log, nth_root, pi_const, pow_rational, pow_rational_float, ElemFn, HPReal,
};
pub use series::FormalSeries;
