use serde::{Deserialize, Serialize};

use super::{fix_split, LabError};
use crate::operators::{dr_operator, power_norm_gap};
use crate::projections::orth_projection;
use crate::spaces::{
    complement, friedrichs_number, intersect, principal_angles, Subspace, DEFAULT_INTERSECT_TOL,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrFixedSpace {
    /// `(M₁ ∩ M₂) ⊕ (M₁⊥ ∩ M₂⊥)`.
    pub predicted: Subspace,
    /// Kernel of `I − T` for the Douglas-Rachford operator.
    pub kernel: Subspace,
    /// Smallest principal cosine between the two (1 when both are zero).
    pub worst_cosine: f64,
}

/// The Douglas-Rachford fixed space predicted from the subspaces, checked
/// against the computed kernel of `I − T`.
///
/// Singular values of `I − T` for a principal angle `θ` equal `sin θ`, so the
/// kernel is taken at threshold `√(2 tol)` to match an intersection at cosine
/// `1 − tol`.
pub fn dr_fixed_space(m1: &Subspace, m2: &Subspace, tol: Option<f64>) -> Result<DrFixedSpace, LabError> {
    let tol = tol.unwrap_or(DEFAULT_INTERSECT_TOL);
    let d = m1.ambient_dim();
    let common = intersect(m1, m2, Some(tol))?;
    let perp = intersect(&complement(m1)?, &complement(m2)?, Some(tol))?;
    let mut vectors = common.basis().columns();
    vectors.extend(perp.basis().columns());
    let predicted = Subspace::from_spanning(d, &vectors)?;

    let t = dr_operator(&orth_projection(m1), &orth_projection(m2))?;
    let kernel = fix_split(t.matrix(), Some((2.0 * tol).sqrt()))?.fix;

    let worst_cosine = if predicted.is_zero() && kernel.is_zero() {
        1.0
    } else if predicted.dim() != kernel.dim() {
        0.0
    } else {
        principal_angles(&predicted, &kernel)?
            .last()
            .copied()
            .unwrap_or(0.0)
    };
    if predicted.dim() != kernel.dim() || worst_cosine < 1.0 - tol {
        return Err(LabError::FixedSpaceMismatch {
            predicted: predicted.dim(),
            kernel: kernel.dim(),
            worst_cosine,
        });
    }
    Ok(DrFixedSpace {
        predicted,
        kernel,
        worst_cosine,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrRateRow {
    pub n: usize,
    pub gap: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrRateReport {
    /// Friedrichs number `c(M₁, M₂)`.
    pub c: f64,
    pub rows: Vec<DrRateRow>,
    /// Largest `gap_n − cⁿ` (negative when the bound holds with room).
    pub max_violation: f64,
    pub first_failure: Option<DrRateRow>,
    pub passed: bool,
}

/// Checks `‖Tⁿ − P‖₂ ≤ c(M₁, M₂)ⁿ + 1e-10` for `n = 0..=N`, with `P` the
/// orthogonal projection onto the fixed space (and `0⁰ = 1`).
pub fn dr_rate_check(m1: &Subspace, m2: &Subspace, n: usize) -> Result<DrRateReport, LabError> {
    let fixed = dr_fixed_space(m1, m2, None)?;
    let c = friedrichs_number(m1, m2, None)?;
    let t = dr_operator(&orth_projection(m1), &orth_projection(m2))?;
    let p = fixed.predicted.projector();
    let gap = power_norm_gap(t.matrix(), Some(&p), n.max(1))?.values;
    let rows: Vec<DrRateRow> = gap
        .iter()
        .take(n + 1)
        .enumerate()
        .map(|(k, g)| DrRateRow {
            n: k,
            gap: *g,
            bound: c.powi(k as i32),
        })
        .collect();
    let max_violation = rows.iter().map(|r| r.gap - r.bound).fold(f64::NEG_INFINITY, f64::max);
    let first_failure = rows.iter().find(|r| r.gap > r.bound + 1e-10).cloned();
    Ok(DrRateReport {
        c,
        passed: first_failure.is_none(),
        rows,
        max_violation,
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_vec;
    use std::f64::consts::FRAC_PI_3;

    fn line(theta: f64) -> Subspace {
        Subspace::from_spanning(2, &[real_vec(&[theta.cos(), theta.sin()])]).unwrap()
    }

    #[test]
    fn fixed_space_examples() {
        let m = line(0.3);
        let f = dr_fixed_space(&m, &m, None).unwrap();
        assert_eq!(f.predicted.dim(), 2);

        let f = dr_fixed_space(&line(0.0), &line(0.7), None).unwrap();
        assert!(f.predicted.is_zero() && f.kernel.is_zero());

        let a = Subspace::coordinate(4, &[0, 1]).unwrap();
        let b = Subspace::coordinate(4, &[1, 2]).unwrap();
        let f = dr_fixed_space(&a, &b, None).unwrap();
        assert_eq!(f.predicted.dim(), 2);
        let want = Subspace::coordinate(4, &[1, 3]).unwrap();
        assert!(want.containment_residual(&f.kernel) < 1e-10);
    }

    #[test]
    fn rate_examples() {
        let r = dr_rate_check(&line(0.0), &line(FRAC_PI_3), 10).unwrap();
        assert!((r.c - 0.5).abs() < 1e-12);
        assert!((r.rows[10].gap - 9.765625e-4).abs() < 1e-12);
        assert!(r.passed);

        let m = line(0.2);
        let r = dr_rate_check(&m, &m, 5).unwrap();
        assert_eq!(r.c, 0.0);
        assert_eq!(r.rows[0].bound, 1.0);
        assert!(r.passed);
    }
}
