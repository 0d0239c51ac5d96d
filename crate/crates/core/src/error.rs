//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite component at index {index} in {context}")]
    NonFinite { context: &'static str, index: usize },

    #[error("{context}: expected a positive value, got {value}")]
    NonPositive { context: &'static str, value: f64 },

    #[error("batch statistics need at least 2 samples, got {got}")]
    TooFewSamples { got: usize },

    #[error("problem does not expose the `{capability}` capability required by {needed_by}")]
    MissingCapability {
        capability: &'static str,
        needed_by: &'static str,
    },

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("oracle solve did not reach tolerance {tol:e} within {max_iter} iterations (final gradient-mapping norm {achieved:e})")]
    OracleDidNotConverge {
        tol: f64,
        max_iter: usize,
        achieved: f64,
    },

    #[error("matrix is not positive definite (Cholesky failed at pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("analysis precondition unmet: {0}")]
    AnalysisPrecondition(String),

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
