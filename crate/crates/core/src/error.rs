use thiserror::Error;

use crate::linesearch::EvalCounters;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A caller violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input is well-formed but numerically degenerate (rank deficiency,
    /// loss of positive definiteness).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The backtracking loop exhausted its exponent budget. Carries the
    /// evaluations spent so far so callers can still account for them.
    #[error("line search found no acceptable step within {trials} trials")]
    LineSearchFailed {
        trials: usize,
        counters: EvalCounters,
    },
}
