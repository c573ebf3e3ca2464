//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the geometry and solver routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a precondition (wrong size, non-positive
    /// tolerance, missing data, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A value lies outside the mathematical domain of the operation
    /// (parameter outside the curve's interval, point outside a box, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A curve that must be horizontal is not: the largest horizontality
    /// residual exceeds the threshold.
    #[error("curve is not horizontal: max residual {max_residual:.3e} exceeds threshold {threshold:.3e}")]
    NotHorizontal { max_residual: f64, threshold: f64 },

    /// A user-supplied curve evaluator failed at some parameter.
    #[error("curve evaluation failed at t = {t}: {message}")]
    Evaluation { t: f64, message: String },

    /// A curve or report file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Underlying I/O failure while reading or writing a file.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
