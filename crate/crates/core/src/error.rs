use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A distribution or transform parameter is outside its domain.
    #[error("parameter out of domain: {0}")]
    Parameter(String),

    /// A point lies on or outside the open set a transform is defined on.
    #[error("point outside domain: {0}")]
    Domain(String),

    /// A moment vector is not in the interior of the moment space.
    #[error("moment vector leaves the interior of the moment space at index {index}: {detail}")]
    MomentBoundary { index: usize, detail: String },

    /// A Toeplitz moment matrix is not positive definite.
    #[error(
        "trigonometric moments are not positive definite: principal minor {minor} is {value:e}"
    )]
    MomentValidity { minor: usize, value: f64 },

    /// A Hankel or Toeplitz system is too ill-conditioned to trust.
    #[error("ill-conditioned moment system at index {index} (condition estimate {condition:e})")]
    Conditioning { index: usize, condition: f64 },

    #[error("insufficient sample: need at least {needed} rows, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

pub(crate) fn domain_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
