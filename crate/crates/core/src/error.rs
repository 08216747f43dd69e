use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("{op}: n = {n} exceeds the configured cap {cap}")]
    CapExceeded { op: &'static str, n: usize, cap: usize },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("promise violated: {0}")]
    PromiseViolated(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("linear program: {0}")]
    Lp(#[from] crate::lp::LpError),

    #[error("eigensolver did not converge after {iterations} iterations")]
    EigenNoConvergence { iterations: usize },

    #[error("no reduction plan: {0}")]
    NoPlan(String),

    #[error("certificate verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap_check(op: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded { op, n, cap })
    } else {
        Ok(())
    }
}
