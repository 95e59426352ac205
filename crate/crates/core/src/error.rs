use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arithmetic error: {0}")]
    Arithmetic(String),

    #[error("resource limit exceeded: {what} (attempted {attempted}, limit {limit})")]
    Resource { what: String, attempted: u128, limit: u128 },

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("needs more depth: {0}")]
    NeedsMoreDepth(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn resource(what: impl Into<String>, attempted: u128, limit: u128) -> Self {
        Error::Resource { what: what.into(), attempted, limit }
    }
}
