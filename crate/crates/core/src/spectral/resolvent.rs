use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hull::polygon_distance;
use super::numrange::NumericalRangeSample;
use super::SpectralError;
use crate::fit::{fit_line, LineFit};
use crate::linalg::{eigenvalues, norm2, solve_linear, CMatrix};

/// Angles closer than this to the spectrum (or to the hull) are skipped.
const HIT_TOL: f64 = 1e-12;

/// 200 geometrically spaced angles from `1e-4` to `π`.
pub fn default_theta_grid() -> Vec<f64> {
    let n = 200;
    let (lo, hi) = (1e-4f64.ln(), std::f64::consts::PI.ln());
    (0..n)
        .map(|k| (lo + (hi - lo) * k as f64 / (n - 1) as f64).exp().min(std::f64::consts::PI))
        .collect()
}

/// `‖(λI − T)⁻¹‖₂`.
pub fn resolvent_norm(t: &CMatrix, lambda: Complex64) -> Result<f64, SpectralError> {
    let n = t.ensure_square()?;
    let a = CMatrix::identity(n).scale(lambda).try_sub(t)?;
    Ok(norm2(&solve_linear(&a, &CMatrix::identity(n))?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedAngle {
    pub theta: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventProfile {
    /// Signed angles, ascending.
    pub angles: Vec<f64>,
    /// `‖R(e^{iθ}, T)‖` at `angles`.
    pub norms: Vec<f64>,
    pub skipped: Vec<SkippedAngle>,
    pub window: f64,
    /// Least-squares fit of `log‖R‖` against `−log|θ|` over `|θ| ≤ window`.
    pub fit: Option<LineFit>,
    /// Fitted exponent `α̂` (the slope).
    pub alpha: Option<f64>,
    /// Fitted constant `ĉ` in `‖R‖ ≈ ĉ |θ|^{−α̂}`.
    pub c: Option<f64>,
    /// Whether 1 is an eigenvalue (within `1e-8`); otherwise the profile is
    /// bounded near `θ = 0` and `α̂` is close to 0.
    pub one_in_spectrum: bool,
}

fn signed_grid(theta_grid: &[f64]) -> Result<Vec<f64>, SpectralError> {
    let mut angles = Vec::with_capacity(2 * theta_grid.len());
    for &th in theta_grid {
        if !(th > 0.0 && th <= std::f64::consts::PI) {
            return Err(SpectralError::InvalidParameter { name: "theta", value: th });
        }
        angles.push(th);
        if th < std::f64::consts::PI {
            angles.push(-th);
        }
    }
    angles.sort_by(f64::total_cmp);
    angles.dedup();
    Ok(angles)
}

/// Resolvent norms along `e^{±iθ}` and the exponent fit near `θ = 0`.
pub fn resolvent_profile(
    t: &CMatrix,
    theta_grid: &[f64],
    window: f64,
) -> Result<ResolventProfile, SpectralError> {
    t.ensure_square()?;
    if !(window > 0.0) {
        return Err(SpectralError::InvalidParameter { name: "window", value: window });
    }
    let spectrum = eigenvalues(t)?;
    let mut angles = Vec::new();
    let mut norms = Vec::new();
    let mut skipped = Vec::new();
    for theta in signed_grid(theta_grid)? {
        let lambda = Complex64::from_polar(1.0, theta);
        if spectrum.contains_near(lambda, HIT_TOL) {
            skipped.push(SkippedAngle {
                theta,
                reason: "grid point on the spectrum".into(),
            });
            continue;
        }
        match resolvent_norm(t, lambda) {
            Ok(r) => {
                angles.push(theta);
                norms.push(r);
            }
            Err(e) => skipped.push(SkippedAngle {
                theta,
                reason: e.to_string(),
            }),
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = angles
        .iter()
        .zip(&norms)
        .filter(|(th, _)| th.abs() <= window)
        .map(|(th, r)| (-th.abs().ln(), r.ln()))
        .unzip();
    let fit = fit_line(&xs, &ys);
    Ok(ResolventProfile {
        alpha: fit.map(|f| f.slope),
        c: fit.map(|f| f.intercept.exp()),
        fit,
        angles,
        norms,
        skipped,
        window,
        one_in_spectrum: spectrum.contains_near(Complex64::new(1.0, 0.0), 1e-8),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullBoundRow {
    pub theta: f64,
    pub resolvent: f64,
    pub distance: f64,
    /// `‖R‖ · dist`; the bound asks for at most `1 + slack`.
    pub ratio: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullBoundReport {
    pub rows: Vec<HullBoundRow>,
    pub skipped: Vec<SkippedAngle>,
    pub slack: f64,
    pub worst_ratio: f64,
    pub passed: bool,
}

/// Checks `‖R(e^{iθ}, T)‖ ≤ (1 + slack) / dist(e^{iθ}, hull)` on `±θ_grid`.
/// The default slack `1e-6 + m^{-2}` covers the gap between the sampled
/// (inner) hull and the closed numerical range.
pub fn hull_distance_bound_check(
    t: &CMatrix,
    sample: &NumericalRangeSample,
    theta_grid: &[f64],
    slack: Option<f64>,
) -> Result<HullBoundReport, SpectralError> {
    t.ensure_square()?;
    if sample.hull.is_empty() {
        return Err(SpectralError::EmptySample);
    }
    let m = sample.len().max(1) as f64;
    let slack = slack.unwrap_or(1e-6 + 1.0 / (m * m));
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for theta in signed_grid(theta_grid)? {
        let lambda = Complex64::from_polar(1.0, theta);
        let distance = polygon_distance(lambda, &sample.hull);
        if distance < HIT_TOL {
            skipped.push(SkippedAngle {
                theta,
                reason: "grid point on the sampled hull".into(),
            });
            continue;
        }
        let resolvent = match resolvent_norm(t, lambda) {
            Ok(r) => r,
            Err(e) => {
                skipped.push(SkippedAngle {
                    theta,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let ratio = resolvent * distance;
        rows.push(HullBoundRow {
            theta,
            resolvent,
            distance,
            ratio,
            ok: ratio <= 1.0 + slack,
        });
    }
    let worst_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(HullBoundReport {
        passed: rows.iter().all(|r| r.ok),
        rows,
        skipped,
        slack,
        worst_ratio,
    })
}
