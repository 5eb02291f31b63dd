use thiserror::Error;

/// Failures surfaced by the numerical routines.
///
/// The CLI maps every variant to exit code 1; flag errors never reach this type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("degenerate estimate: {0}")]
    Degenerate(String),
    #[error("matrix is not self-adjoint (asymmetry {0:e})")]
    NotSelfAdjoint(f64),
    #[error("spectral parameter lies inside the spectrum: {0}")]
    InsideSpectrum(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
