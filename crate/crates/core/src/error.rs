use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed svmlight input. `line` is 1-based; 0 means the input as a whole.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("degenerate weights: total weight is zero")]
    DegenerateWeights,

    #[error("contract violation: {0}")]
    Contract(String),

    /// An internal cross-check disagreed with the exhaustive oracle.
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    /// Branch-and-bound ran out of nodes. `partial` is still a valid lower bound.
    #[error("bound computation exceeded its node budget (partial lower bound {partial})")]
    BoundTimeout { partial: u64 },

    #[error("KL divergence is infinite (q is 0 or 1 while p differs)")]
    InfiniteDivergence,

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn arg(message: impl Into<String>) -> Self {
        Error::Argument(message.into())
    }
}
