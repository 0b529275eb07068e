use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data; `line` is 1-based and counts the header row.
    #[error("ingestion error at line {line}: {message}")]
    Ingestion { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown attribute: {0}")]
    Attribute(String),

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("measure error: {0}")]
    Measure(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("clustering error: {0}")]
    Clustering(String),

    #[error("rule induction error: {0}")]
    Induction(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
