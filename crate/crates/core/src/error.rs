use thiserror::Error;

/// Errors raised by the distribution, stability and order routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request would exceed a hard size limit (joint tables, LP size, enumeration).
    #[error("capacity error: {what} supports at most {max}, got {got}")]
    Capacity {
        what: &'static str,
        max: usize,
        got: usize,
    },

    /// A root finder failed to reach the requested tolerance.
    #[error("solver did not converge after {iterations} iterations (last bracket [{lo}, {hi}])")]
    Solver { iterations: usize, lo: f64, hi: f64 },

    /// A floating point routine failed (eigen-solver, LP pivoting, ...).
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
