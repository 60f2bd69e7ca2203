use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input to a primitive operation.
    #[error("input error: {0}")]
    Input(String),
    /// Parameters violate a structural constraint.
    #[error("configuration error: {0}")]
    Config(String),
    /// An operation was called outside its precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
