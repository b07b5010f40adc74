use num_complex::Complex64;

use super::matrix::{vec_norm, CMatrix};
use super::LinalgError;

/// Default rank threshold for [`qr_orthonormalize`]: `1e-12 * d`.
pub fn default_qr_tol(dim: usize) -> f64 {
    1e-12 * dim as f64
}

/// Orthonormal basis for the span of `vectors` (each of length `dim`).
///
/// Modified Gram-Schmidt with one reorthogonalization pass. A vector whose
/// residual falls to `tol` times the largest input norm or below is dropped, so
/// the column count is the numerical rank. Empty input gives a `dim x 0`
/// matrix.
pub fn qr_orthonormalize(
    dim: usize,
    vectors: &[Vec<Complex64>],
    tol: Option<f64>,
) -> Result<CMatrix, LinalgError> {
    if dim == 0 {
        return Err(LinalgError::Empty);
    }
    if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
        return Err(LinalgError::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    let tol = tol.unwrap_or_else(|| default_qr_tol(dim));
    if !(tol >= 0.0) || !tol.is_finite() {
        return Err(LinalgError::InvalidTolerance { tol });
    }
    let scale = vectors.iter().map(|v| vec_norm(v)).fold(0.0, f64::max);
    let threshold = tol * scale;

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite { row: 0, col: basis.len() });
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let proj: Complex64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= proj * qi;
                }
            }
        }
        let nrm = vec_norm(&w);
        if nrm > threshold && nrm > 0.0 {
            basis.push(w.iter().map(|z| z / nrm).collect());
        }
        if basis.len() == dim {
            break;
        }
    }
    CMatrix::from_columns(dim, &basis)
}
