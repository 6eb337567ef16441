use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid degree data: {field}: {reason}")]
    InvalidData { field: &'static str, reason: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("matrix construction failed: {0}")]
    Matrix(String),

    #[error("unknown catalog entry `{name}`; available: {available}")]
    UnknownCatalog { name: String, available: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidData { field, reason: reason.into() }
}

pub(crate) fn pre(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
