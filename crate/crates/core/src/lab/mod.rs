//! Runnable experiments: the fixed-space splitting and limit projection, the
//! rate dichotomy, Douglas-Rachford fixed spaces and rates, the Halperin-type
//! inequality, certified slow orbits and superpolynomially fast vectors.

mod dr;
mod halperin;
mod slow;
mod superpoly;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fit::fit_line;
use crate::linalg::{eigenvalues, norm2, svd, CMatrix, LinalgError};
use crate::operators::{power_norm_gap, OperatorError};
use crate::projections::{oblique_projection, ProjectionError, ProjectionOp};
use crate::spaces::{SpacesError, Subspace};
use crate::spectral::SpectralError;

pub use dr::{dr_fixed_space, dr_rate_check, DrFixedSpace, DrRateReport, DrRateRow};
pub use halperin::{halperin_inequality_check, HalperinMode, HalperinReport};
pub use slow::{slow_instance, SlowInstance};
pub use superpoly::{superpoly_vectors, SuperpolyCurve, SuperpolyOptions, SuperpolyReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("fixed space and range of I - T are not complementary (smallest singular value {sigma_min:.3e}); eigenvalue 1 is defective")]
    DefectiveEigenvalueOne { sigma_min: f64 },
    #[error("T has spectrum on the unit circle away from 1 (modulus {modulus})")]
    PeripheralSpectrum { modulus: f64 },
    #[error("{what}: {value:.3e} exceeds {bound:.3e}")]
    InvariantViolated {
        what: &'static str,
        value: f64,
        bound: f64,
    },
    #[error("fixed space mismatch: predicted dim {predicted}, kernel dim {kernel}, worst cosine {worst_cosine}")]
    FixedSpaceMismatch {
        predicted: usize,
        kernel: usize,
        worst_cosine: f64,
    },
    #[error("invalid rates: {0}")]
    InvalidRates(String),
    #[error("certificate failed at n = {n}: |T^n x| = {norm} < r_n = {rate}")]
    CertificateFailed { n: usize, norm: f64, rate: f64 },
    #[error("(I - T)^k y vanished for {attempts} seeds")]
    VanishingVectors { attempts: usize },
    #[error("factor {index} is not a contraction (norm {norm})")]
    NonContraction { index: usize, norm: f64 },
    #[error("invalid argument: {0}")]
    BadArgument(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Spaces(#[from] SpacesError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `X = Fix T ⊕ Z` with `Z` the range of `I − T`, the projection `P_T` onto
/// `Fix T` along `Z`, and the spectral radius of `T` restricted to `Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDecomposition {
    pub fix: Subspace,
    pub z: Subspace,
    pub p_t: ProjectionOp,
    pub restriction_spectral_radius: f64,
}

/// Default rank threshold of [`fix_split`], relative to `max(1, ‖I − T‖)`.
pub const FIX_SPLIT_TOL: f64 = 1e-9;

pub fn fix_split(t: &CMatrix, tol: Option<f64>) -> Result<SplitDecomposition, LabError> {
    let d = t.ensure_square()?;
    let a = CMatrix::identity(d).try_sub(t)?;
    let dec = svd(&a)?;
    let thr = tol.unwrap_or(FIX_SPLIT_TOL) * dec.sigma_max().max(1.0);
    let rank = dec.rank(thr);
    let fix = Subspace::from_orthonormal(dec.v.column_range(rank, d))?;
    let z = Subspace::from_orthonormal(dec.u.column_range(0, rank))?;
    let p_t = match oblique_projection(&fix, &z) {
        Ok(p) => p,
        Err(ProjectionError::NotComplementary { sigma_min }) => {
            return Err(LabError::DefectiveEigenvalueOne { sigma_min })
        }
        Err(e) => return Err(e.into()),
    };
    let p = p_t.matrix();
    let scale = norm2(p).max(1.0) * norm2(t).max(1.0);
    for (what, m) in [
        ("|T P_T - P_T|", t.try_matmul(p)?.try_sub(p)?),
        ("|P_T T - P_T|", p.try_matmul(t)?.try_sub(p)?),
    ] {
        let v = norm2(&m);
        if v > 1e-8 * scale {
            return Err(LabError::InvariantViolated {
                what,
                value: v,
                bound: 1e-8 * scale,
            });
        }
    }
    let restriction_spectral_radius = if z.is_zero() {
        0.0
    } else {
        let zb = z.basis();
        let s = zb.adjoint().try_matmul(&t.try_matmul(zb)?)?;
        eigenvalues(&s)?.spectral_radius()
    };
    if restriction_spectral_radius >= 1.0 - 1e-10 {
        return Err(LabError::PeripheralSpectrum {
            modulus: restriction_spectral_radius,
        });
    }
    Ok(SplitDecomposition {
        fix,
        z,
        p_t,
        restriction_spectral_radius,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    /// Always `"exponential"`: in finite dimension `Ran(I − T)` is closed.
    pub regime: String,
    /// `‖Tⁿ − P_T‖₂` for `n = 0..=N`.
    pub gap: Vec<f64>,
    pub r: f64,
    pub c: f64,
    pub restriction_spectral_radius: f64,
    /// `|r − r(S)| ≤ 0.05`.
    pub r_agrees: bool,
    /// `gap_n ≤ C rⁿ + 1e-12` for every `n`.
    pub envelope_ok: bool,
    pub superpoly: Option<SuperpolyReport>,
}

/// Gap values at or below this are treated as converged when fitting `r`.
const GAP_FLOOR: f64 = 1e-11;
const ENVELOPE_SLACK: f64 = 1e-12;

/// Fits `(C, r)` with `gap_n ≤ C rⁿ`: `r` from the log-slope of the tail of
/// the curve above the noise floor, then `C = max_n (gap_n − 1e-12)⁺ / rⁿ`.
pub fn fit_envelope(gap: &[f64]) -> (f64, f64) {
    let floor = GAP_FLOOR * gap.first().copied().unwrap_or(1.0).max(1.0);
    let valid = gap.iter().skip(1).take_while(|g| **g > floor).count();
    let r = if valid == 0 {
        0.0
    } else if valid == 1 {
        gap[1] / gap[0].max(f64::MIN_POSITIVE)
    } else {
        let lo = 1 + valid / 2;
        let hi = valid;
        let (xs, ys): (Vec<f64>, Vec<f64>) = (lo.min(hi - 1)..=hi).map(|n| (n as f64, gap[n].ln())).unzip();
        fit_line(&xs, &ys).map_or(0.0, |f| f.slope.exp())
    };
    let c = gap
        .iter()
        .enumerate()
        .filter_map(|(n, g)| {
            let rn = r.powi(n as i32);
            let excess = (g - ENVELOPE_SLACK).max(0.0);
            if excess == 0.0 {
                None
            } else if rn > 0.0 {
                Some(excess / rn)
            } else {
                Some(f64::INFINITY)
            }
        })
        .fold(0.0, f64::max)
        // Round-trip through `/ rⁿ` then `× rⁿ` may lose an ulp.
        * (1.0 + 8.0 * f64::EPSILON);
    (c, r)
}

/// Rate report for `‖Tⁿ − P_T‖`: fitted `(C, r)` against `r(S)`, plus
/// optional superpolynomial curves.
pub fn dichotomy_report(
    t: &CMatrix,
    n: usize,
    tol: Option<f64>,
    superpoly: Option<&SuperpolyOptions>,
) -> Result<DichotomyReport, LabError> {
    let split = fix_split(t, tol)?;
    let gap = power_norm_gap(t, Some(split.p_t.matrix()), n)?.values;
    let (c, r) = fit_envelope(&gap);
    let envelope_ok = c.is_finite()
        && gap
            .iter()
            .enumerate()
            .all(|(k, g)| *g <= c * r.powi(k as i32) + ENVELOPE_SLACK);
    let sp = match superpoly {
        Some(opts) if !split.z.is_zero() => Some(superpoly_vectors(t, opts)?),
        _ => None,
    };
    Ok(DichotomyReport {
        regime: "exponential".into(),
        r_agrees: (r - split.restriction_spectral_radius).abs() <= 0.05,
        envelope_ok,
        restriction_spectral_radius: split.restriction_spectral_radius,
        gap,
        r,
        c,
        superpoly: sp,
    })
}
