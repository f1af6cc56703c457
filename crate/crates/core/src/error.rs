use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate point set: affine rank {rank} < dimension {dim}")]
    Degenerate { rank: usize, dim: usize },

    #[error("{what} did not converge (residual {residual:e})")]
    NumericalFailure { what: &'static str, residual: f64 },

    #[error("point is not strictly outside the ellipsoid (quadratic form {quadratic_form})")]
    NotExterior { quadratic_form: f64 },

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("PPT labeling is only exact for total dimension <= 6, got {dim_a}x{dim_b}")]
    UnsupportedLabeling { dim_a: usize, dim_b: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
