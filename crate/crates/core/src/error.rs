use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("retry limit exceeded while {0}")]
    RetryLimitExceeded(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("inconsistent response: {0}")]
    InconsistentResponse(String),
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("malformed data: {0}")]
    Malformed(String),
    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),
    #[error("connection failed: {0}")]
    ConnectionFailed(#[source] io::Error),
    #[error("server error {code}: {message}")]
    ServerError { code: u16, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
