use thiserror::Error;

/// Errors produced by the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("value out of range: {0}")]
    Range(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("invalid tree: {0}")]
    Validation(String),
    #[error("invalid embedding: {0}")]
    Embedding(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("search budget exceeded: {0}")]
    Budget(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("bad argument: {0}")]
    Argument(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
