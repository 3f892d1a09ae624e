use thiserror::Error;

/// Errors raised by the numeric and exact kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision error: {0}")]
    Precision(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("convergence error: {0}")]
    Convergence(String),
    #[error("order error: {0}")]
    Order(String),
    #[error("singular input: {0}")]
    Singular(String),
    #[error("branch error: {0}")]
    Branch(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("insufficient precision: need at least {needed} digits, have {have}")]
    InsufficientPrecision { needed: u32, have: u32 },
    #[error("degenerate lattice basis: {0}")]
    DegenerateBasis(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
