use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate lattice: |det| = {det:e} is below {threshold:e}")]
    DegenerateLattice { det: f64, threshold: f64 },

    #[error("insufficient points: need at least {needed}, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("pair budget exceeded: {pairs} pairs > budget {budget}; reduce the window")]
    BudgetExceeded { pairs: u128, budget: u128 },

    #[error("requires positive measure: {0}")]
    NonPositiveMeasure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate region: {0}")]
    DegenerateRegion(String),

    #[error("generator cannot be realized on a new window: {0}")]
    NotRealizable(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
