use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported rank {rank}: convex roof requires rank <= 2 (third eigenvalue {third_eigenvalue:e})")]
    UnsupportedRank { rank: usize, third_eigenvalue: f64 },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn consistency(msg: impl Into<String>) -> Self {
        Error::InternalConsistency(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
