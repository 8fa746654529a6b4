use thiserror::Error;

/// Crate-wide error type. Variants are grouped into *usage* errors (bad
/// arguments, malformed input files) and *runtime* errors (numerical
/// failures on valid input); [`Error::is_usage`] tells the two apart so
/// callers can map them to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {dim}: must be in 1..={max}")]
    UnsupportedDimension { dim: usize, max: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("sigma {sigma} outside the table range [{min}, {max}]")]
    SigmaOutOfRange { sigma: f64, min: f64, max: f64 },

    #[error("empty input: {what}")]
    EmptyInput { what: &'static str },

    #[error("{what}: no convergence after {iters} iterations")]
    NoConvergence {
        what: &'static str,
        iters: usize,
        /// Last iterate, so callers can inspect or resume.
        last: Vec<f64>,
    },

    #[error("degenerate cluster {index}: no members / zero total weight")]
    DegenerateCluster { index: usize },

    #[error("training diverged in {what}: non-finite loss or gradient")]
    TrainingDiverged { what: &'static str },

    #[error("exhaustive matching supports at most {max} clusters, got {k}")]
    MatchingTooLarge { k: usize, max: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for caller mistakes (bad flags, malformed or missing inputs);
    /// false for runtime failures such as non-convergence or divergence.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::DimensionMismatch { .. }
            | Error::UnsupportedDimension { .. }
            | Error::NonFinite { .. }
            | Error::SigmaOutOfRange { .. }
            | Error::EmptyInput { .. }
            | Error::MatchingTooLarge { .. }
            | Error::Parse { .. }
            | Error::Usage(_)
            | Error::Json(_) => true,
            Error::NoConvergence { .. }
            | Error::DegenerateCluster { .. }
            | Error::TrainingDiverged { .. } => false,
            Error::Io(e) => e.kind() == std::io::ErrorKind::NotFound,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
