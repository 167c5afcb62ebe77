use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mode {0} appears more than once")]
    RepeatedMode(usize),

    #[error("mode {mode} out of range for a {n_modes}-mode state")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("matrix is not symplectic (deviation {deviation:.3e})")]
    NotSymplectic { deviation: f64 },

    #[error("covariance matrix is singular")]
    SingularCovariance,

    #[error("state is not a pure graph state (purity {purity:.6})")]
    NotAGraphState { purity: f64 },

    #[error("invalid overlap specification: {0}")]
    InvalidSpec(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
