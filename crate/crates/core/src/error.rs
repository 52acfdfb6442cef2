use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function has a pole at x = {0}")]
    GammaPole(f64),
    #[error("gamma function overflows at x = {0}")]
    GammaOverflow(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series did not converge after {terms} terms (last term {last:e})")]
    NonConvergence { terms: usize, last: f64 },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate fit input: {0}")]
    DegenerateFit(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
