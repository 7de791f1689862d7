use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A nearest-nucleus or cell query was made against an empty point set.
    #[error("point set is empty")]
    EmptySet,

    /// No nucleus lies strictly ahead of the query point in the given direction.
    #[error("no nucleus lies ahead of the query point in the requested direction")]
    UnboundedDirection,

    /// The Voronoi cell is not bounded by the available nuclei and no clip window was given.
    #[error("Voronoi cell is unbounded within the available nuclei")]
    UnboundedCell,

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A computed quantity left its admissible range by more than rounding error.
    #[error("numerical inconsistency: {0}")]
    Inconsistent(String),

    /// Too few usable data points to complete an estimate.
    #[error("insufficient data: {usable} usable points, {required} required")]
    InsufficientData { usable: usize, required: usize },

    /// A Monte Carlo estimator could not gather enough accepted samples.
    #[error("degenerate estimator: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
