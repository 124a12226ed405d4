use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not a projector (max |P^2 - P| = {0:.3e})")]
    NotProjector(f64),

    #[error("basis is not orthonormal (max |B^dag B - I| = {0:.3e})")]
    NotOrthonormal(f64),

    #[error("members {0} and {1} are not orthogonal (overlap {2:.3e})")]
    NotOrthogonal(usize, usize, f64),

    #[error("total dimension {dim} exceeds the limit {limit}; pass the large flag to override")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("{members} members exceed the exhaustive partition budget of {budget}")]
    PartitionBudget { members: usize, budget: usize },

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
