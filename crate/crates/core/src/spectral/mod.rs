//! Spectral geometry of an operator: spectrum location, resolvent growth on
//! the unit circle, numerical ranges, Stolz-type fits and power-sequence
//! diagnostics.

mod hull;
mod numrange;
mod powers;
mod resolvent;
mod stolz;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{eigenvalues, CMatrix, LinalgError, Spectrum};
use crate::spaces::SpacesError;

pub use hull::{convex_hull, densify, polygon_distance, segment_distance};
pub use numrange::{
    numerical_range_hilbert, numerical_range_hilbert_refined, numerical_range_lp, NumericalRangeMethod, NumericalRangeSample,
};
pub use powers::{
    k_spectral_check, ritt_diagnostic, zn_beta, KSpectralReport, RittReport, ZnBeta, K_SPECTRAL,
};
pub use resolvent::{
    default_theta_grid, hull_distance_bound_check, resolvent_norm, resolvent_profile,
    HullBoundReport, HullBoundRow, ResolventProfile, SkippedAngle,
};
pub use stolz::{default_alpha_grid, stolz_constant, stolz_fit, StolzFit, StolzOutcome};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("at least {min} samples/angles required, got {got}")]
    TooFew { min: usize, got: usize },
    #[error("the point set is empty")]
    EmptySample,
    #[error("sample point {point} lies outside the closed unit disk")]
    OutsideDisk { point: Complex64 },
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Spaces(#[from] SpacesError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCheck {
    pub spectrum: Spectrum,
    /// Every eigenvalue has `|λ| ≤ 1 − tol` or `|λ − 1| ≤ tol`.
    pub peripheral_ok: bool,
    /// An eigenvalue breaking the condition, if any.
    pub offender: Option<Complex64>,
}

pub fn spectrum_check(t: &CMatrix, tol: f64) -> Result<SpectrumCheck, SpectralError> {
    let spectrum = eigenvalues(t)?;
    let offender = spectrum
        .eigenvalues
        .iter()
        .copied()
        .find(|z| !(z.norm() <= 1.0 - tol || (z - 1.0).norm() <= tol));
    Ok(SpectrumCheck {
        peripheral_ok: offender.is_none(),
        offender,
        spectrum,
    })
}
