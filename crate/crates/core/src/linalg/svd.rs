use num_complex::Complex64;

use super::matrix::{vec_norm, CMatrix, ZERO};
use super::LinalgError;

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U diag(σ) V^H`.
///
/// For an `m x n` input, `U` is `m x k`, `V` is `n x k` with `k = min(m, n)`,
/// and `sigma` is non-increasing.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl SvdResult {
    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    /// Numerical rank: count of singular values above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.sigma.iter().filter(|&&s| s > tol).count()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let k = self.sigma.len();
        let us = CMatrix::from_fn(self.u.rows(), k, |i, j| self.u[(i, j)] * self.sigma[j]);
        &us * &self.v.adjoint()
    }
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
pub fn svd(a: &CMatrix) -> Result<SvdResult, LinalgError> {
    a.ensure_finite()?;
    if a.cols() == 0 {
        return Ok(SvdResult {
            u: CMatrix::zeros(a.rows(), 0),
            sigma: Vec::new(),
            v: CMatrix::zeros(0, 0),
        });
    }
    // Exact power-of-two scaling keeps Jacobi sums away from underflow.
    let m = a.max_abs();
    let k = if m > 0.0 { (m.log2().round() as i32).clamp(-1000, 1000) } else { 0 };
    let scaled = if k != 0 { a.scale_real(2f64.powi(-k)) } else { a.clone() };
    let mut out = if scaled.rows() >= scaled.cols() {
        jacobi_tall(&scaled)?
    } else {
        let t = jacobi_tall(&scaled.adjoint())?;
        SvdResult {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        }
    };
    if k != 0 {
        let f = 2f64.powi(k);
        out.sigma.iter_mut().for_each(|x| *x *= f);
    }
    Ok(out)
}

/// Operator 2-norm (largest singular value).
pub fn norm2(a: &CMatrix) -> f64 {
    if a.cols() == 0 {
        return 0.0;
    }
    match svd(a) {
        Ok(s) => s.sigma_max(),
        Err(_) => f64::NAN,
    }
}

fn rank_threshold(s: &SvdResult, rows: usize, cols: usize, tol: Option<f64>) -> f64 {
    tol.unwrap_or_else(|| f64::EPSILON * rows.max(cols) as f64 * s.sigma_max())
}

/// Orthonormal basis of the null space of a square or wide matrix.
///
/// Singular values at or below `tol` count as zero; the default threshold is
/// `eps * max(rows, cols) * σ_max`.
pub fn null_space(a: &CMatrix, tol: Option<f64>) -> Result<CMatrix, LinalgError> {
    let n = a.cols();
    // Pad to square so that V is a full basis of the domain.
    let padded = if a.rows() < n {
        CMatrix::from_fn(n, n, |i, j| if i < a.rows() { a[(i, j)] } else { ZERO })
    } else {
        a.clone()
    };
    let s = svd(&padded)?;
    let thr = rank_threshold(&s, a.rows(), n, tol);
    let rank = s.rank(thr);
    let idx: Vec<usize> = (rank..n).collect();
    Ok(s.v.select_columns(&idx))
}

/// Orthonormal basis of the column space.
pub fn column_space(a: &CMatrix, tol: Option<f64>) -> Result<CMatrix, LinalgError> {
    let s = svd(a)?;
    let thr = rank_threshold(&s, a.rows(), a.cols(), tol);
    let rank = s.rank(thr);
    Ok(s.u.column_range(0, rank))
}

fn jacobi_tall(a: &CMatrix) -> Result<SvdResult, LinalgError> {
    let m = a.rows();
    let n = a.cols();
    // Work column-major: cols[j] is the j-th column.
    let mut cols: Vec<Vec<Complex64>> = a.columns();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();

    let eps = f64::EPSILON;
    let orth_tol = eps * (m as f64).max(4.0);
    // Columns this small are rounding noise; rotating them never settles.
    let negligible = {
        let f: f64 = cols.iter().flatten().map(|z| z.norm_sqr()).sum();
        (eps * eps * f).max(f64::MIN_POSITIVE)
    };
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let g = gamma.norm();
                if g == 0.0 || g <= orth_tol * (alpha * beta).sqrt() || alpha.min(beta) <= negligible {
                    continue;
                }
                rotated = true;
                // Remove the phase of gamma from column q, then rotate in the real plane.
                let phase = (gamma / g).conj();
                for z in cols[q].iter_mut() {
                    *z *= phase;
                }
                for z in v[q].iter_mut() {
                    *z *= phase;
                }
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, p, q, c, s);
                rotate_pair(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            algorithm: "one-sided Jacobi SVD",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<(usize, f64)> = cols.iter().map(|c| vec_norm(c)).enumerate().collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let sigma_max = order.first().map_or(0.0, |o| o.1);
    let tiny = sigma_max * eps * (m.max(n) as f64);
    let mut sigma = Vec::with_capacity(n);
    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut v_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for (slot, &(j, s)) in order.iter().enumerate() {
        sigma.push(s);
        v_cols.push(v[j].clone());
        if s > tiny && s > 0.0 {
            u_cols.push(cols[j].iter().map(|z| z / s).collect());
        } else {
            u_cols.push(vec![ZERO; m]);
            deficient.push(slot);
        }
    }
    // Left vectors of (numerically) zero singular values are completed to an
    // orthonormal set; they do not affect the reconstruction.
    if !deficient.is_empty() {
        complete_orthonormal(&mut u_cols, &deficient, m);
    }

    Ok(SvdResult {
        u: CMatrix::from_columns(m, &u_cols)?,
        sigma,
        v: CMatrix::from_columns(n, &v_cols)?,
    })
}

fn rotate_pair(cols: &mut [Vec<Complex64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let cp = &mut lo[p];
    let cq = &mut hi[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let yq = *y;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

fn complete_orthonormal(cols: &mut [Vec<Complex64>], missing: &[usize], m: usize) {
    let mut candidate = 0usize;
    for &slot in missing {
        loop {
            assert!(candidate < m + cols.len(), "unable to complete orthonormal basis");
            let mut e = vec![ZERO; m];
            e[candidate % m] = Complex64::new(1.0, 0.0);
            candidate += 1;
            for _ in 0..2 {
                for (k, c) in cols.iter().enumerate() {
                    if k == slot || c.iter().all(|z| *z == ZERO) {
                        continue;
                    }
                    let proj: Complex64 = c.iter().zip(&e).map(|(a, b)| a.conj() * b).sum();
                    for (ei, ci) in e.iter_mut().zip(c) {
                        *ei -= proj * ci;
                    }
                }
            }
            let nrm = vec_norm(&e);
            if nrm > 1e-3 {
                cols[slot] = e.iter().map(|z| z / nrm).collect();
                break;
            }
        }
    }
}
