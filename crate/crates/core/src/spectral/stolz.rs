use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SpectralError;

/// Points this close to 1 are excluded from the Stolz ratio.
const AT_ONE: f64 = 1e-9;

/// `1, 1.25, …, 8`.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=28).map(|k| 1.0 + 0.25 * k as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StolzFit {
    pub epsilon: f64,
    pub alpha: f64,
    pub c: f64,
    /// `c ≥ c_min` at the reported `alpha`.
    pub passed: bool,
    /// Point attaining the minimum ratio at `alpha`.
    pub witness: Complex64,
    /// `(α, c(α))` over the whole grid.
    pub per_alpha: Vec<(f64, f64)>,
}

impl StolzFit {
    pub fn c_at(&self, alpha: f64) -> Option<f64> {
        self.per_alpha
            .iter()
            .find(|(a, _)| (a - alpha).abs() < 1e-12)
            .map(|(_, c)| *c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum StolzOutcome {
    Fit(StolzFit),
    /// No point in the window `0 < |λ − 1| ≤ ε`; every `α` passes.
    Vacuous,
}

/// `min (1 − |λ|) / |λ − 1|^α` over points with `0 < |λ − 1| ≤ ε`, with the
/// minimizing point.
pub fn stolz_constant(points: &[Complex64], epsilon: f64, alpha: f64) -> Option<(f64, Complex64)> {
    points
        .iter()
        .filter_map(|&z| {
            let d = (z - 1.0).norm();
            (d > AT_ONE && d <= epsilon).then(|| ((1.0 - z.norm()) / d.powf(alpha), z))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

/// The smallest `α` on the grid with `c(α) ≥ c_min`; if none passes, the `α`
/// with the largest `c(α)`, flagged as failed.
pub fn stolz_fit(
    points: &[Complex64],
    epsilon: f64,
    alpha_grid: &[f64],
    c_min: f64,
) -> Result<StolzOutcome, SpectralError> {
    if let Some(&z) = points.iter().find(|z| z.norm() > 1.0 + 1e-8) {
        return Err(SpectralError::OutsideDisk { point: z });
    }
    if !(epsilon > 0.0) {
        return Err(SpectralError::InvalidParameter { name: "epsilon", value: epsilon });
    }
    if let Some(&a) = alpha_grid.iter().find(|a| !(**a >= 1.0)) {
        return Err(SpectralError::InvalidParameter { name: "alpha", value: a });
    }
    if alpha_grid.is_empty() {
        return Err(SpectralError::TooFew { min: 1, got: 0 });
    }
    let mut per = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        match stolz_constant(points, epsilon, alpha) {
            Some((c, w)) => per.push((alpha, c, w)),
            None => return Ok(StolzOutcome::Vacuous),
        }
    }
    let per_alpha: Vec<(f64, f64)> = per.iter().map(|(a, c, _)| (*a, *c)).collect();
    let chosen = per
        .iter()
        .find(|(_, c, _)| *c >= c_min)
        .map(|x| (*x, true))
        .unwrap_or_else(|| {
            let best = per
                .iter()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .copied()
                .expect("grid is nonempty");
            (best, false)
        });
    let ((alpha, c, witness), passed) = chosen;
    Ok(StolzOutcome::Fit(StolzFit {
        epsilon,
        alpha,
        c,
        passed,
        witness,
        per_alpha,
    }))
}
