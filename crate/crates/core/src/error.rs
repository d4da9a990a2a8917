use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("parameters outside the duality regime: {0}")]
    RegimeViolation(String),
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
    #[error("did not converge: {0}")]
    Convergence(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
