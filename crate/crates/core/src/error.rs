use thiserror::Error;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input (pattern strings, files).
    Parse,
    /// Arguments outside the mathematical domain of an operation.
    Domain,
    /// Work exceeds a configured size cap.
    Cap,
    /// An iterative routine failed to converge.
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid term pattern `{pattern}`: {reason}")]
    InvalidPattern { pattern: String, reason: String },

    #[error("expression has no terms")]
    EmptyTerms,

    #[error("party count mismatch: expected {expected}, found {found}")]
    PartyMismatch { expected: usize, found: usize },

    #[error("party index {index} out of range 1..={parties}")]
    PartyOutOfRange { index: usize, parties: usize },

    #[error("{parties} parties exceeds the cap of {cap}")]
    TooManyParties { parties: usize, cap: usize },

    #[error("expression is identically zero")]
    ZeroExpression,

    #[error("expression contains sub-correlation terms; operation requires full correlations")]
    NotHomogeneous,

    #[error("unknown built-in expression `{0}`")]
    UnknownBuiltin(String),

    #[error("{0}")]
    Domain(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("power iteration did not converge within {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("every sample had a vanishing block-{index} bound")]
    AllSamplesSkipped { index: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidPattern { .. } | Error::EmptyTerms | Error::Parse(_) | Error::UnknownBuiltin(_) => ErrorKind::Parse,
            Error::TooManyParties { .. } => ErrorKind::Cap,
            Error::NoConvergence { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Domain,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
