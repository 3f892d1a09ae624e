//! Moebius inversion of Taylor coefficients, period detection, the
//! exponent A, and product/theta/Lambert representations of e^{−f}.

mod arith;
mod period;
mod represent;

pub use arith::{
    divisors, extract_x, jacobi_symbol, moebius_mu, taylor_from_x, JacobiCharacter, TaylorInput,
};
pub use period::{detect_period, exponent_a, PeriodicCoeffs, Periodicity, Sequence};
pub use represent::{
    conjecture2_etaquotient, evaluate_product, evaluate_theta, lambert_series,
    logderiv_representation, product_qexpansion, represent_product, represent_theta,
    EtaQuotientCheck, ProductFactor, ThetaRepresentation,
};
