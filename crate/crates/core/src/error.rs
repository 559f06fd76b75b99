//! Error type shared across the crate.

use thiserror::Error;

/// Errors reported by matrix kernels, state constructors and certifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected side {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("invalid subsystem dimensions: {0}")]
    InvalidDims(String),

    #[error("invalid subsystem permutation")]
    InvalidPermutation,

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not a valid unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("not a valid density matrix: {0}")]
    NotDensity(String),

    #[error("state is not pure (Tr rho^2 = {purity})")]
    NotPure { purity: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size bound exceeded: side {got} > {max}")]
    SizeBound { max: usize, got: usize },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
