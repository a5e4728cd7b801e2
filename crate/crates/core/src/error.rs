use thiserror::Error;

use crate::scalar::ScalarError;

/// Crate-wide error. `Rejected` carries input-validation failures that name
/// the violated rule; `Resource` covers configured caps and budgets.
#[derive(Debug, Error)]
pub enum KmxError {
    #[error("rejected: {0}")]
    Rejected(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

impl KmxError {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            KmxError::Resource(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = KmxError> = std::result::Result<T, E>;
