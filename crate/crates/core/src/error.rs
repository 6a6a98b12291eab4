use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("grade mismatch: {0}")]
    Grade(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid representation: {0}")]
    Representation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("bar on edge {edge} does not have the required loop form")]
    LoopForm { edge: u32 },

    #[error("edge set of size {size} exceeds the enumeration guard of {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
