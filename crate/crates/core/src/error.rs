use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Caller supplied data that violates a documented precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(BigInt),

    #[error("matrix has even determinant; no unique solution mod 2")]
    EvenDeterminant,

    #[error("form is not negative definite")]
    NotNegativeDefinite,

    #[error("search exceeded the limit of {0} node expansions")]
    SearchLimit(u64),

    /// An identity that must hold by construction failed. This points at a
    /// convention bug, never at bad user input.
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// True when the error reflects a broken internal identity rather than
    /// a rejected input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
