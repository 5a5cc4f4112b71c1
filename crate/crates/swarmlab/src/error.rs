use thiserror::Error;

/// Errors surfaced at the library boundary.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("lines are parallel, no intersection")]
    NoIntersection,
    #[error("degenerate average: velocity vectors cancel")]
    DegenerateAverage,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("robot {0} has no neighbours (isolated node)")]
    IsolatedNode(usize),
    #[error("no neighbours available for quantized delta")]
    NoNeighbours,
    #[error("heading {0} is not on the quantization grid")]
    OffGrid(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("eigen solver did not converge")]
    NumericalFailure,
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
