use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0}")]
    InvalidField(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{what} has {count} elements, above the configured cap of {cap}")]
    SizeCap {
        what: String,
        count: String,
        cap: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A division that must be exact left a remainder. This is always a bug.
    #[error("inexact division in {0}")]
    InexactDivision(&'static str),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("definitions disagree: {0}")]
    Disagreement(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
