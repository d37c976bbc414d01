use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate observation for object `{object}` at time {time}")]
    Conflict { line: usize, object: String, time: String },

    #[error("line {line}: {message}")]
    Value { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("invalid cluster matrix: {0}")]
    Matrix(String),

    #[error("unsupported matrix kind: {0}")]
    Kind(String),

    #[error("block is not fully nested: {0}")]
    NotNested(String),

    #[error("object universe mismatch: {0}")]
    Universe(String),

    #[error("time range: {0}")]
    Range(String),

    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("fci store: {0}")]
    Store(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line() as usize).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse { line, message: format!("{other:?}") },
        }
    }
}
