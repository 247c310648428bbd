use thiserror::Error;

/// Errors raised by the quadrature and approximation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ridge direction must have at least one nonzero finite component")]
    ZeroDirection,

    #[error("grid size must be odd and at least 3, got {0}")]
    InvalidGridSize(usize),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("recurrence breakdown at degree {requested}: measure supports at most degree {achievable}")]
    Breakdown { requested: usize, achievable: usize },

    #[error("tridiagonal eigensolver failed to converge for eigenvalue {index}")]
    Convergence { index: usize },

    #[error("node {lambda} lies outside the support [{left}, {right}]")]
    OutOfSupport { lambda: f64, left: f64, right: f64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("hit-and-run rejected {attempts} consecutive step lengths on slice {lambda}")]
    RejectionCapExceeded { lambda: f64, attempts: usize },

    #[error("point outside the hypercube [-1, 1]^m (coordinate {index} = {value})")]
    DomainViolation { index: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
