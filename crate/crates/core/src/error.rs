use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, DksError>;

#[derive(Debug, Error)]
pub enum DksError {
    /// A malformed line in an edge-list file. `line` is 1-based.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Arguments outside an operation's domain (bad k, length mismatch, empty graph, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A non-finite value appeared in an iterate.
    #[error("numerical divergence at iteration {iteration}: {message}")]
    Numerical { iteration: usize, message: String },

    /// Exhaustive oracles refuse instances above their size limit.
    #[error("instance too large: {what} = {size} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("invalid graph cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl DksError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        DksError::Domain(msg.into())
    }
}

pub(crate) fn check_len(what: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(DksError::domain(format!(
            "{what} has length {got}, expected {expected}"
        )));
    }
    Ok(())
}
