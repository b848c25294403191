use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum QmeError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max |m - m†| = {deviation:.3e}, tolerance {tolerance:.1e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e}, tolerance {tolerance:.1e})")]
    NotPositive { min_eigenvalue: f64, tolerance: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A domain invariant failed; `invariant` names it and `detail` carries the margin.
    #[error("invariant violated ({invariant}): {detail}")]
    InvariantViolation { invariant: String, detail: String },

    #[error("operator is zero and cannot be an effect: {0}")]
    ZeroEffect(String),

    #[error("bound undefined: {0}")]
    UndefinedBound(String),

    #[error("instrument does not measure the observable: {0}")]
    InstrumentMismatch(String),

    #[error("assignment is not surjective: {0}")]
    NotSurjective(String),

    #[error("label error: {0}")]
    Label(String),

    #[error("unknown check id `{0}`")]
    UnknownCheck(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl QmeError {
    pub(crate) fn invariant(invariant: impl Into<String>, detail: impl Into<String>) -> Self {
        QmeError::InvariantViolation {
            invariant: invariant.into(),
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = QmeError> = std::result::Result<T, E>;
