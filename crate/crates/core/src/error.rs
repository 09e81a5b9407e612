use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix data has {found} entries, expected {expected}")]
    BadEntryCount { expected: usize, found: usize },

    #[error("eigenvalue iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid probability map: {0}")]
    InvalidProbabilities(String),

    #[error("no coincidences survive on the {axis} axis")]
    NoSurvivingCoincidences { axis: char },

    #[error("basis does not express W (residual {residual:e})")]
    BasisDoesNotExpressW { residual: f64 },

    #[error("missing count record for setting {0}")]
    MissingSetting(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("incomplete tomography record, missing pairs: {0}")]
    IncompleteRecord(String),

    #[error("R has an eigenvalue {re:e}{im:+e}i outside the admissible region")]
    InvalidSpectrum { re: f64, im: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}
