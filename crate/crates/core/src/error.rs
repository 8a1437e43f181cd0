use thiserror::Error;

/// Failures raised by the spectral kernels, model evaluation and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value {value} at index {index}")]
    InvalidField { index: usize, value: f64 },

    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("spectral coefficients violate Hermitian symmetry at mode {mode} (deviation {deviation:e})")]
    Asymmetry { mode: usize, deviation: f64 },

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("field mean {mean:e} exceeds tolerance {tolerance:e}")]
    MeanViolation { mean: f64, tolerance: f64 },

    #[error("vacuum: density minimum {min_rho:e} at or below threshold {threshold:e}")]
    Vacuum { min_rho: f64, threshold: f64 },

    #[error("quadrature for {what} did not converge (relative change {change:e})")]
    Accuracy { what: &'static str, change: f64 },

    #[error("state does not carry a {0} field")]
    MissingField(&'static str),

    #[error("no trajectory records")]
    EmptyRecords,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
