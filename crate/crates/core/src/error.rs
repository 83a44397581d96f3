use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuditError {
    #[error("matrix is not Hermitian (max |M - M^H| = {deviation:.3e}, tolerance {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("hard-pulse frame undefined: effective Rabi rate is zero")]
    DegenerateFrame,

    #[error("mixed initial state not supported here; decompose per pure component and combine linearly")]
    MixedState,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
}

pub type Result<T> = std::result::Result<T, QuditError>;
