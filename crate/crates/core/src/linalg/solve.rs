use num_complex::Complex64;

use super::matrix::CMatrix;
use super::LinalgError;

const RESIDUAL_BOUND: f64 = 1e-10;

/// Solves `A X = B` by LU with partial pivoting and one refinement step.
///
/// A pivot below `eps * n * max|A|` is reported as singular, carrying the
/// smallest pivot seen. The relative residual `‖AX − B‖ / (‖A‖‖X‖)` is checked
/// after solving; a result above `1e-10` is an error, never a silent answer.
pub fn solve_linear(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    let n = a.ensure_square()?;
    if b.rows() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: b.rows(),
        });
    }
    a.ensure_finite()?;
    b.ensure_finite()?;

    let lu = Lu::factor(a)?;
    let mut x = lu.solve(b);
    // One step of iterative refinement.
    let r = b - &(a * &x);
    let dx = lu.solve(&r);
    x = &x + &dx;

    let resid = (&(a * &x) - b).frobenius_norm();
    let denom = a.frobenius_norm() * x.frobenius_norm();
    let rel = if denom > 0.0 { resid / denom } else { resid };
    if !(rel <= RESIDUAL_BOUND) {
        return Err(LinalgError::InaccurateSolve { residual: rel });
    }
    Ok(x)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix, LinalgError> {
    let n = a.ensure_square()?;
    solve_linear(a, &CMatrix::identity(n))
}

struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(a: &CMatrix) -> Result<Self, LinalgError> {
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = f64::EPSILON * n as f64 * a.max_abs();
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= threshold || pmax == 0.0 {
                return Err(LinalgError::Singular {
                    smallest_pivot: pmax,
                });
            }
            if piv != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = tmp;
                }
                perm.swap(k, piv);
            }
            let d = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    fn solve(&self, b: &CMatrix) -> CMatrix {
        let n = self.lu.rows();
        let m = b.cols();
        let mut x = CMatrix::from_fn(n, m, |i, j| b[(self.perm[i], j)]);
        for col in 0..m {
            for i in 0..n {
                let mut s = x[(i, col)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, col)];
                for k in (i + 1)..n {
                    s -= self.lu[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = s / self.lu[(i, i)];
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, seeded_rng};

    #[test]
    fn identity_passthrough() {
        let mut rng = seeded_rng(1);
        let b = random_matrix(&mut rng, 4, 3);
        let x = solve_linear(&CMatrix::identity(4), &b).unwrap();
        assert!((&x - &b).frobenius_norm() < 1e-15);
    }

    #[test]
    fn diagonal_inverse() {
        let x = solve_linear(&CMatrix::diag_real(&[2.0, 4.0]), &CMatrix::identity(2)).unwrap();
        assert!((&x - &CMatrix::diag_real(&[0.5, 0.25])).frobenius_norm() < 1e-15);
    }

    #[test]
    fn resolvent_matches_neumann_series() {
        let mut rng = seeded_rng(9);
        let t = random_matrix(&mut rng, 5, 5).scale_real(0.1);
        let lambda = Complex64::new(0.6, 0.8);
        // |λ| = 1 and ‖T‖ is small, so Σ T^k / λ^{k+1} converges fast.
        let a = CMatrix::identity(5).scale(lambda).try_sub(&t).unwrap();
        let r = solve_linear(&a, &CMatrix::identity(5)).unwrap();
        let mut sum = CMatrix::zeros(5, 5);
        let mut term = CMatrix::identity(5).scale(1.0 / lambda);
        for _ in 0..200 {
            sum = &sum + &term;
            term = (&t * &term).scale(1.0 / lambda);
        }
        assert!((&r - &sum).max_abs() < 1e-6);
    }

    #[test]
    fn singular_reports_pivot() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        match solve_linear(&a, &CMatrix::identity(2)) {
            Err(LinalgError::Singular { smallest_pivot }) => assert!(smallest_pivot < 1e-12),
            other => panic!("expected singular error, got {other:?}"),
        }
    }
}
