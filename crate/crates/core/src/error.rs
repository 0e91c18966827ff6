use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("space mismatch: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("subsystem index {index} out of range for a space with {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("subsystem {index} has dimension {found}, expected {expected}")]
    SubsystemDimension {
        index: usize,
        found: usize,
        expected: &'static str,
    },

    #[error("ket is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("operator is not Hermitian: max deviation {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("{what} is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { what: String, min_eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error(
        "step {step:e} s is too large: RK4 local error estimate {estimate:e} exceeds {tolerance:e}; \
         suggested step {suggested:e} s"
    )]
    StepTooLarge {
        step: f64,
        estimate: f64,
        tolerance: f64,
        suggested: f64,
    },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("dense superoperator of dimension {dim} exceeds the limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("eigenvector matrix condition number {condition:e} exceeds {limit:e}")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("integration needs {steps} steps, more than the limit {limit}")]
    TooManySteps { steps: f64, limit: usize },

    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(err: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(err.to_string())
    }
}
