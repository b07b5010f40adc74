//! Dense complex linear algebra kernel.
//!
//! Everything is written against [`CMatrix`], a row-major `Complex64` matrix.
//! The factorizations are textbook dense methods sized for the laboratory
//! (dimensions up to a few hundred):
//!
//! - one-sided Jacobi SVD,
//! - Hessenberg reduction followed by shifted complex QR for general spectra,
//! - cyclic Jacobi for Hermitian eigenproblems,
//! - partial-pivot LU for linear solves,
//! - dual-ascent iteration (plus a small-dimension exhaustive oracle) for
//!   operator p-norms.

mod eig;
mod hermitian;
mod matrix;
mod pnorm;
mod qr;
mod solve;
mod svd;

use thiserror::Error;

pub use eig::{eigenvalues, Spectrum};
pub use hermitian::{hermitian_eig, hermitian_extreme_eig, HermitianEig};
pub use matrix::{inner, real_vec, vec_norm, vec_scale, vec_sub, CMatrix, ONE, ZERO};
pub use pnorm::{
    dual_unit_vector, lp_norm, operator_pnorm, operator_pnorm_with, EstimateOptions, PnormMode,
    EXACT_SMALL_COMPLEX_MAX, EXACT_SMALL_REAL_MAX,
};
pub use qr::{default_qr_tol, qr_orthonormalize};
pub use solve::{inverse, solve_linear};
pub use svd::{column_space, norm2, null_space, svd, SvdResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix must have at least one row")]
    Empty,
    #[error("data length mismatch: expected {expected}, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is singular to working precision (smallest pivot {smallest_pivot:.3e})")]
    Singular { smallest_pivot: f64 },
    #[error("solve residual {residual:.3e} exceeds the relative bound")]
    InaccurateSolve { residual: f64 },
    #[error("{algorithm} did not converge after {iterations} iterations")]
    NoConvergence {
        algorithm: &'static str,
        iterations: usize,
    },
    #[error("p must lie in (1, inf), got {p}")]
    InvalidExponent { p: f64 },
    #[error("exact p-norm oracle is limited to small dimensions, got {dim} ({field})")]
    TooLargeForExact { dim: usize, field: &'static str },
    #[error("tolerance must be nonnegative and finite, got {tol}")]
    InvalidTolerance { tol: f64 },
}
