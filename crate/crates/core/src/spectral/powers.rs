use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hull::densify;
use super::numrange::NumericalRangeSample;
use super::SpectralError;
use crate::fit::{fit_line, LineFit};
use crate::linalg::{norm2, CMatrix};

/// Constant in the K-spectral bound for the numerical range.
pub const K_SPECTRAL: f64 = 1.0 + std::f64::consts::SQRT_2;

/// Subdivisions per hull edge when evaluating sup norms on the boundary.
const EDGE_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RittReport {
    /// `n ‖Tⁿ(I − T)‖₂` for `n = 1..=N`.
    pub values: Vec<f64>,
    pub sup: f64,
    pub head_max: f64,
    pub tail_max: f64,
    /// Last-quartile max at most `1.05 ×` the first-quartile max.
    pub consistent: bool,
}

/// `n ‖Tⁿ(I − T)‖₂` for `n = 1..=N` with a boundedness flag.
pub fn ritt_diagnostic(t: &CMatrix, n: usize) -> Result<RittReport, SpectralError> {
    let d = t.ensure_square()?;
    if n < 10 {
        return Err(SpectralError::TooFew { min: 10, got: n });
    }
    let mut m = CMatrix::identity(d).try_sub(t)?;
    let mut values = Vec::with_capacity(n);
    for k in 1..=n {
        m = t.try_matmul(&m)?;
        values.push(k as f64 * norm2(&m));
    }
    let q = n / 4;
    let head_max = values[..q].iter().copied().fold(0.0, f64::max);
    let tail_max = values[n - q..].iter().copied().fold(0.0, f64::max);
    Ok(RittReport {
        sup: values.iter().copied().fold(0.0, f64::max),
        consistent: tail_max <= 1.05 * head_max,
        head_max,
        tail_max,
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZnBeta {
    /// `s_n = max_{λ ∈ Ω} |λⁿ(1 − λ)|` for `n = 1..=N`.
    pub s: Vec<f64>,
    /// Fit of `log s_n` against `log n` over `n ∈ [N/2, N]`; `β̂ = −slope`.
    pub fit: Option<LineFit>,
    pub beta: Option<f64>,
    /// `1/β̂`, the resolvent exponent this decay predicts.
    pub implied_alpha: Option<f64>,
}

/// Sup of `|λⁿ(1 − λ)|` over a finite point set and its decay exponent.
pub fn zn_beta(omega: &[Complex64], n: usize) -> Result<ZnBeta, SpectralError> {
    if omega.is_empty() {
        return Err(SpectralError::EmptySample);
    }
    if n < 10 {
        return Err(SpectralError::TooFew { min: 10, got: n });
    }
    if let Some(&z) = omega.iter().find(|z| z.norm() > 1.0 + 1e-8) {
        return Err(SpectralError::OutsideDisk { point: z });
    }
    let mut s = vec![0.0f64; n];
    for z in omega {
        let r = z.norm();
        let base = (1.0 - z).norm();
        if base == 0.0 {
            continue;
        }
        let mut pow = base;
        for v in s.iter_mut() {
            pow *= r;
            if pow > *v {
                *v = pow;
            }
            if pow == 0.0 {
                break;
            }
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = (n / 2..=n)
        .filter(|&k| s[k - 1] > 0.0)
        .map(|k| ((k as f64).ln(), s[k - 1].ln()))
        .unzip();
    let fit = fit_line(&xs, &ys);
    let beta = fit.map(|f| -f.slope);
    Ok(ZnBeta {
        s,
        fit,
        implied_alpha: beta.filter(|b| *b > 0.0).map(|b| 1.0 / b),
        beta,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSpectralRow {
    pub n: usize,
    /// `‖Tⁿ(I − T)‖₂`.
    pub lhs: f64,
    pub s_n: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSpectralReport {
    pub rows: Vec<KSpectralRow>,
    pub slack: f64,
    pub passed: bool,
    /// Largest `lhs / (K s_n)` over rows with `s_n > 0`.
    pub worst_ratio: f64,
}

/// Checks `‖Tⁿ(I − T)‖ ≤ K s_n (1 + slack) + 1e-8` with `K = 1 + √2` and
/// `s_n` taken over the sampled hull boundary (edges densified). The slack
/// defaults to `1e-6 + m^{-2}` as in the hull distance check.
pub fn k_spectral_check(
    t: &CMatrix,
    sample: &NumericalRangeSample,
    n: usize,
    slack: Option<f64>,
) -> Result<KSpectralReport, SpectralError> {
    let d = t.ensure_square()?;
    if sample.hull.is_empty() {
        return Err(SpectralError::EmptySample);
    }
    let m = sample.len().max(1) as f64;
    let slack = slack.unwrap_or(1e-6 + 1.0 / (m * m));
    let boundary = densify(&sample.hull, EDGE_POINTS);
    // Rounding can put densified points a hair outside the disk.
    let boundary: Vec<Complex64> = boundary
        .into_iter()
        .map(|z| if z.norm() > 1.0 { z / z.norm() } else { z })
        .collect();
    let s = zn_beta(&boundary, n.max(10))?.s;
    let mut m_pow = CMatrix::identity(d).try_sub(t)?;
    let mut rows = Vec::with_capacity(n);
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        m_pow = t.try_matmul(&m_pow)?;
        let lhs = norm2(&m_pow);
        let s_n = s[k - 1];
        let bound = K_SPECTRAL * s_n * (1.0 + slack) + 1e-8;
        if s_n > 0.0 {
            worst = worst.max(lhs / (K_SPECTRAL * s_n));
        }
        rows.push(KSpectralRow {
            n: k,
            lhs,
            s_n,
            bound,
            ok: lhs <= bound,
        });
    }
    Ok(KSpectralReport {
        passed: rows.iter().all(|r| r.ok),
        rows,
        slack,
        worst_ratio: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::numerical_range_hilbert;

    #[test]
    fn ritt_examples() {
        let r = ritt_diagnostic(&CMatrix::identity(3), 40).unwrap();
        assert!(r.values.iter().all(|v| *v == 0.0) && r.consistent);
        let r = ritt_diagnostic(&CMatrix::zeros(3, 3), 40).unwrap();
        assert!(r.values.iter().all(|v| *v == 0.0));

        let lam: f64 = 0.99;
        let r = ritt_diagnostic(&CMatrix::diag_real(&[lam]), 1000).unwrap();
        let oracle = (1..=1000)
            .map(|n| n as f64 * lam.powi(n) * (1.0 - lam))
            .fold(0.0, f64::max);
        assert!((r.sup - oracle).abs() < 1e-12);
        assert!((r.sup - 0.366).abs() < 1e-3);
        assert!(r.consistent);
    }

    #[test]
    fn zn_examples() {
        let z = zn_beta(&[Complex64::new(1.0, 0.0)], 20).unwrap();
        assert!(z.s.iter().all(|v| *v == 0.0) && z.beta.is_none());

        let omega: Vec<Complex64> = (0..=20000).map(|k| Complex64::new(k as f64 / 20000.0, 0.0)).collect();
        let z = zn_beta(&omega, 200).unwrap();
        for n in 1..=200 {
            let nf = n as f64;
            let exact = (nf * (nf / (nf + 1.0)).ln()).exp() / (nf + 1.0);
            assert!((z.s[n - 1] - exact).abs() < 1e-6);
        }
        assert!((z.beta.unwrap() - 1.0).abs() < 0.05);
        assert!(zn_beta(&[], 20).is_err());
    }

    #[test]
    fn k_spectral_examples() {
        let j = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let s = numerical_range_hilbert(&j, 720).unwrap();
        let r = k_spectral_check(&j, &s, 20, None).unwrap();
        assert!(r.passed);
        assert!((r.rows[0].lhs - 1.0).abs() < 1e-14);
        assert!((r.rows[0].s_n - 0.75).abs() < 1e-4);

        let id = CMatrix::identity(2);
        let s = numerical_range_hilbert(&id, 16).unwrap();
        let r = k_spectral_check(&id, &s, 20, None).unwrap();
        assert!(r.passed && r.rows.iter().all(|row| row.lhs == 0.0 && row.s_n == 0.0));

        let t = CMatrix::diag_real(&[0.3, 0.9, -0.5]);
        let s = numerical_range_hilbert(&t, 64).unwrap();
        let r = k_spectral_check(&t, &s, 50, None).unwrap();
        // Normal: the lhs is the max over the spectrum, already below s_n.
        assert!(r.rows.iter().all(|row| row.lhs <= row.s_n + 1e-14));
    }
}
