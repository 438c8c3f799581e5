use thiserror::Error;

/// Errors raised by structure validation, solvers, relaxations and the
/// verification harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration limit {limit} exceeded")]
    LimitExceeded { limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point outside the support of the distribution: {0}")]
    OutOfSupport(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors caused by malformed caller input rather than a
    /// solver or numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidStructure(_)
                | Error::DimensionMismatch { .. }
                | Error::InvalidArgument(_)
                | Error::OutOfSupport(_)
                | Error::Unsupported(_)
                | Error::LimitExceeded { .. }
                | Error::Precondition(_)
        )
    }
}
