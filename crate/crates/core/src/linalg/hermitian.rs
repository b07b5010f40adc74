use num_complex::Complex64;

use super::matrix::{CMatrix, ONE, ZERO};
use super::LinalgError;

const MAX_SWEEPS: usize = 100;

/// Full eigendecomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    /// Columns are the unit eigenvectors matching `values`.
    pub vectors: CMatrix,
}

/// Cyclic complex Jacobi eigenvalue algorithm.
pub fn hermitian_eig(h: &CMatrix) -> Result<HermitianEig, LinalgError> {
    let n = h.ensure_square()?;
    h.ensure_finite()?;
    let scale = h.frobenius_norm();
    let defect = h.hermitian_defect();
    if defect > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(LinalgError::NotHermitian { defect });
    }
    let mut a = h.hermitian_part();
    let mut v = CMatrix::identity(n);

    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 0.5 * scale || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if g <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                // phase = e^{-iφ} where a_pq = |a_pq| e^{iφ}
                let phase = (apq / g).conj();
                let theta = (aqq - app) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                apply_rotation(&mut a, &mut v, p, q, c, s, phase);
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            algorithm: "Hermitian Jacobi",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<(usize, f64)> = (0..n).map(|i| (i, a[(i, i)].re)).collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    let idx: Vec<usize> = order.iter().map(|o| o.0).collect();
    Ok(HermitianEig {
        values: order.iter().map(|o| o.1).collect(),
        vectors: v.select_columns(&idx),
    })
}

/// `A <- G^H A G` and `V <- V G` where `G` mixes columns `p` and `q`:
/// `G e_p = c e_p - s e^{-iφ} e_q`, `G e_q = s e_p + c e^{-iφ} e_q`.
fn apply_rotation(
    a: &mut CMatrix,
    v: &mut CMatrix,
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    phase: Complex64,
) {
    let n = a.rows();
    for i in 0..n {
        let x = a[(i, p)];
        let y = a[(i, q)] * phase;
        a[(i, p)] = x * c - y * s;
        a[(i, q)] = x * s + y * c;
    }
    let phase_c = phase.conj();
    for j in 0..n {
        let x = a[(p, j)];
        let y = a[(q, j)] * phase_c;
        a[(p, j)] = x * c - y * s;
        a[(q, j)] = x * s + y * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for i in 0..n {
        let x = v[(i, p)];
        let y = v[(i, q)] * phase;
        v[(i, p)] = x * c - y * s;
        v[(i, q)] = x * s + y * c;
    }
}

/// Largest eigenvalue of a Hermitian matrix with a unit eigenvector.
pub fn hermitian_extreme_eig(h: &CMatrix) -> Result<(f64, Vec<Complex64>), LinalgError> {
    if h.rows() == 1 && h.cols() == 1 {
        h.ensure_finite()?;
        if h[(0, 0)].im.abs() > 1e-10 * h[(0, 0)].norm().max(f64::MIN_POSITIVE) {
            return Err(LinalgError::NotHermitian {
                defect: h[(0, 0)].im.abs(),
            });
        }
        return Ok((h[(0, 0)].re, vec![ONE]));
    }
    let e = hermitian_eig(h)?;
    Ok((e.values[0], e.vectors.column(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_unitary, seeded_rng};

    fn residual(h: &CMatrix, lam: f64, v: &[Complex64]) -> f64 {
        h.mul_vec(v)
            .iter()
            .zip(v)
            .map(|(x, y)| (x - y * lam).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn diagonal_top() {
        let h = CMatrix::diag_real(&[3.0, 1.0]);
        let (lam, v) = hermitian_extreme_eig(&h).unwrap();
        assert_eq!(lam, 3.0);
        assert!((v[0].norm() - 1.0).abs() < 1e-15 && v[1].norm() < 1e-15);
    }

    #[test]
    fn swap_matrix() {
        let h = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let (lam, v) = hermitian_extreme_eig(&h).unwrap();
        assert!((lam - 1.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // Up to a unimodular factor, v = (1, 1)/√2.
        assert!((v[0].norm() - r).abs() < 1e-14 && (v[1].norm() - r).abs() < 1e-14);
        assert!((v[0] - v[1]).norm() < 1e-14);
    }

    #[test]
    fn constructed_spectrum() {
        let mut rng = seeded_rng(3);
        let q = random_unitary(&mut rng, 7);
        let d = [2.5, -1.0, 0.3, 2.4999, 0.0, -3.0, 1.7];
        let h = &(&q * &CMatrix::diag_real(&d)) * &q.adjoint();
        let e = hermitian_eig(&h).unwrap();
        let mut want = d.to_vec();
        want.sort_by(|a, b| b.total_cmp(a));
        for (got, w) in e.values.iter().zip(&want) {
            assert!((got - w).abs() < 1e-10);
        }
        for k in 0..7 {
            assert!(residual(&h, e.values[k], &e.vectors.column(k)) < 1e-10);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&a), Err(LinalgError::NotHermitian { .. })));
    }
}
