use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid phantom spec: {0}")]
    Spec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("problem too large: {n} variables exceeds the limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("integrity error at line {line}: {message}")]
    Integrity { line: usize, message: String },

    #[error("training aborted: {0}")]
    Training(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
