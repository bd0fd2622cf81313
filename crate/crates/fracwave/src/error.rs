use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular evaluation: {0}")]
    Singularity(String),

    #[error("accuracy target not reached: {msg} (partial value {partial})")]
    Accuracy { msg: String, partial: Complex64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("unsupported dimension d = {0}: {1}")]
    UnsupportedDimension(usize, String),

    #[error("lattice resonance: {0}")]
    Resonance(String),

    #[error("wavenumber too small: estimated operator norm {norm:.4} >= 1 at k = {k}")]
    WavenumberTooSmall { k: f64, norm: f64 },

    #[error("residual check failed: relative residual {residual:.3e} exceeds {bound:.3e}")]
    Residual { residual: f64, bound: f64 },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("insufficient coverage: {0}")]
    Coverage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
