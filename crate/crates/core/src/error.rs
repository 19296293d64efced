use thiserror::Error;

/// Errors raised while building, checking or solving instances.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid instance: {0}")]
    InvalidProblem(String),

    #[error("instance too large: t*N = {tn} exceeds the limit {limit}")]
    Guardrail { tn: usize, limit: usize },

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(usize, usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidProblem(msg.into())
}
