use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    Domain { field: String, reason: String },

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("z = {z} lies beyond the cached grid (z_max = {z_max}); rebuild with a larger range")]
    Extrapolation { z: f64, z_max: f64 },

    #[error("insufficient data: need at least {needed} terms, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate barrier at b = {b}: W'(b) = {w1}")]
    DegenerateBarrier { b: f64, w1: f64 },

    #[error("minimum of W' sits at the grid boundary x_max = {x_max}; rebuild with x_max >= {suggested}")]
    GridTooShort { x_max: f64, suggested: f64 },

    #[error("configuration error at `{path}`: {reason}")]
    Config { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Domain {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub(crate) fn ensure_positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(field, format!("must be finite and > 0, got {v}")))
    }
}

pub(crate) fn ensure_nonneg(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(field, format!("must be finite and >= 0, got {v}")))
    }
}
