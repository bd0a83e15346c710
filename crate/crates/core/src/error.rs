use thiserror::Error;

/// Errors produced by the operator builders, checks and file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix of size {size} is not d^2 x d^2 for d = {d}")]
    NotBipartite { size: usize, d: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("support mismatch: expected {expected} generators, got {found}")]
    SupportMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("non-negligible imaginary part {0:e} in a real-valued trace")]
    ComplexTrace(f64),

    #[error("{0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable kind, used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "not_square",
            Error::ShapeMismatch { .. } => "shape_mismatch",
            Error::NotBipartite { .. } => "not_bipartite",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotDensityMatrix(_) => "not_density_matrix",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::SupportMismatch { .. } => "support_mismatch",
            Error::ComplexTrace(_) => "complex_trace",
            Error::Unsupported(_) => "unsupported",
            Error::Parse(_) => "parse",
            Error::CheckFailed(_) => "check_failed",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
