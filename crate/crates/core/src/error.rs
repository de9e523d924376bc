use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("invalid code: {0}")]
    Validation(String),
    #[error("no writhe given for symbol {0}")]
    MissingWrithe(u32),
    #[error("move instance does not apply: {0}")]
    InvalidInstance(String),
    #[error("component index {index} out of range ({count} components)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("cochain size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("walk is not closed: {0}")]
    NotClosed(String),
    #[error("input too large: {0}")]
    TooLarge(String),
    #[error("operation is defined only for single-component words")]
    MultiComponent,
    #[error("word has no two-colorable realization")]
    NoTwoColorableRealization,
    #[error("cannot compare codes of different kinds ({0} vs {1})")]
    KindMismatch(String, String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
