use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("assignment has {got} bits, instance has {expected} variables")]
    Dimension { expected: usize, got: usize },

    #[error("variable {0} is not mapped into the target instance")]
    Unmapped(usize),

    #[error("unknown variable {0}")]
    UnknownVar(usize),

    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),

    #[error("coefficient overflow during {0}")]
    Overflow(&'static str),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("structural error: {0}")]
    Structure(String),

    #[error("enumeration refused: instance has {num_vars} variables, bound is {bound}")]
    EnumerationBound { num_vars: usize, bound: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
