use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("leaf sets do not match: {0}")]
    LabelMismatch(String),

    #[error("{what}: n = {n} exceeds the limit of {limit}")]
    GuardExceeded {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("empty {0}")]
    Empty(&'static str),
}

impl Error {
    /// Short machine-readable code, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidTree(_) => "invalid_tree",
            Error::InvalidPermutation(_) => "invalid_permutation",
            Error::InvalidPartition(_) => "invalid_partition",
            Error::LabelMismatch(_) => "label_mismatch",
            Error::GuardExceeded { .. } => "guard_exceeded",
            Error::OutOfRange(_) => "out_of_range",
            Error::Empty(_) => "empty_input",
        }
    }
}

pub(crate) fn guard(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::GuardExceeded { what, n, limit })
    } else {
        Ok(())
    }
}
