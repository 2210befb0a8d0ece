use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid set description: {0}")]
    InvalidSet(String),

    #[error("ellipsoid projection did not converge in {iterations} iterations (residual {residual:e})")]
    ProjectionNotConverged { iterations: usize, residual: f64 },

    #[error("odd dimension {0} cannot be split into two diagonal blocks")]
    OddDimension(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("circumcenter is rank deficient at iteration {iteration}")]
    RankDeficient { iteration: usize },

    #[error("degenerate support halfspaces: {0}")]
    DegenerateHalfspaces(String),

    #[error("no valid samples: {0}")]
    NoValidSamples(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(expected: usize, got: usize) -> Self {
        Error::DimensionMismatch { expected, got }
    }
}
