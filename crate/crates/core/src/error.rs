//! Library-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty batch")]
    EmptyBatch,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value in {context} at coordinate {coordinate}")]
    NonFinite {
        context: &'static str,
        coordinate: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Config validation reports every violation, not just the first.
    #[error("invalid config:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("direction is not a descent direction")]
    NotDescentDirection,

    #[error("backtracking line search exceeded {halvings} halvings")]
    LineSearchStalled { halvings: u32 },

    #[error("invalid line-search bracket")]
    InvalidBracket,

    #[error("no descent along the search ray")]
    NoDescentAlongRay,

    #[error("matrix is not positive definite (factorization failed at pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("Hessian is not available for this objective")]
    HessianUnavailable,

    #[error("point is not a critical point (gradient norm {grad_norm:.3e})")]
    NotCriticalPoint { grad_norm: f64 },

    #[error("iteration limit {limit} reached without convergence")]
    MaxIterations { limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
