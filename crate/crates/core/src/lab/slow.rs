use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LabError;
use crate::linalg::{vec_norm, CMatrix, ONE, ZERO};
use crate::projections::orth_projection;
use crate::spaces::{pairing, Subspace};

/// A finite certified prefix of an arbitrarily slow MAP orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlowInstance {
    pub rates: Vec<f64>,
    /// Angle between the two lines of each planar block.
    pub angles: Vec<f64>,
    pub m1: Subspace,
    pub m2: Subspace,
    pub x: Vec<Complex64>,
    /// `‖Tⁿx‖` for `n = 0..=N`, from direct iteration with `T = P₂P₁`.
    pub norms: Vec<f64>,
    /// Unit functional normalizing `T^N x`.
    pub phi: Vec<Complex64>,
    /// `Re⟨Tⁿx, φ⟩` for `n = 0..=N`.
    pub weak_values: Vec<f64>,
    /// Largest `κ ≤ 1` with `Re⟨Tⁿx, φ⟩ ≥ κ r_n` for every `n` (0 if none).
    pub kappa: f64,
}

impl SlowInstance {
    pub fn dim(&self) -> usize {
        self.m1.ambient_dim()
    }

    /// `T = P₂ P₁`.
    pub fn operator(&self) -> Result<CMatrix, LabError> {
        Ok(self.m2.projector().try_matmul(&self.m1.projector())?)
    }
}

/// Builds `N + 1` planar blocks; block `n` holds the lines `e_{2n}` and
/// `cos θ_n e_{2n} + sin θ_n e_{2n+1}` with `cos θ_n = r_n^{1/(2n+1)}`. The
/// start vector is the sum of the first lines. `‖Tⁿx‖ ≥ r_n` is verified by
/// iterating the assembled operator before the instance is returned.
pub fn slow_instance(rates: &[f64]) -> Result<SlowInstance, LabError> {
    if rates.is_empty() {
        return Err(LabError::InvalidRates("no rates given".into()));
    }
    if let Some((n, r)) = rates.iter().enumerate().find(|(_, r)| !(**r > 0.0 && **r <= 1.0)) {
        return Err(LabError::InvalidRates(format!("r_{n} = {r} is outside (0, 1]")));
    }
    if let Some(n) = (1..rates.len()).find(|&n| rates[n] > rates[n - 1]) {
        return Err(LabError::InvalidRates(format!("r_{n} > r_{}", n - 1)));
    }
    let blocks = rates.len();
    let d = 2 * blocks;
    let angles: Vec<f64> = rates
        .iter()
        .enumerate()
        .map(|(n, r)| r.powf(1.0 / (2 * n + 1) as f64).min(1.0).acos())
        .collect();
    let mut v1 = Vec::with_capacity(blocks);
    let mut v2 = Vec::with_capacity(blocks);
    for (n, th) in angles.iter().enumerate() {
        let mut a = vec![ZERO; d];
        a[2 * n] = ONE;
        let mut b = vec![ZERO; d];
        b[2 * n] = Complex64::new(th.cos(), 0.0);
        b[2 * n + 1] = Complex64::new(th.sin(), 0.0);
        v1.push(a);
        v2.push(b);
    }
    let m1 = Subspace::from_orthonormal(CMatrix::from_columns(d, &v1)?)?;
    let m2 = Subspace::from_orthonormal(CMatrix::from_columns(d, &v2)?)?;
    let x: Vec<Complex64> = (0..d).map(|i| if i % 2 == 0 { ONE } else { ZERO }).collect();

    let t = orth_projection(&m2).matrix().try_matmul(orth_projection(&m1).matrix())?;
    let mut orbit = Vec::with_capacity(blocks);
    let mut y = x.clone();
    orbit.push(y.clone());
    for _ in 1..blocks {
        y = t.mul_vec(&y);
        orbit.push(y.clone());
    }
    let norms: Vec<f64> = orbit.iter().map(|v| vec_norm(v)).collect();
    if let Some(n) = (0..blocks).find(|&n| !(norms[n] >= rates[n])) {
        return Err(LabError::CertificateFailed {
            n,
            norm: norms[n],
            rate: rates[n],
        });
    }
    let last = orbit.last().expect("at least one rate");
    let nl = vec_norm(last);
    let phi: Vec<Complex64> = last.iter().map(|z| z.conj() / nl).collect();
    let weak_values: Vec<f64> = orbit.iter().map(|v| pairing(v, &phi).re).collect();
    let kappa = weak_values
        .iter()
        .zip(rates)
        .map(|(w, r)| w / r)
        .fold(1.0f64, f64::min)
        .max(0.0);
    Ok(SlowInstance {
        rates: rates.to_vec(),
        angles,
        m1,
        m2,
        x,
        norms,
        phi,
        weak_values,
        kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_rates() {
        let rates: Vec<f64> = (0..=8).map(|n| 0.5f64.powi(n)).collect();
        let s = slow_instance(&rates).unwrap();
        assert_eq!(s.dim(), 18);
        // Independent check with matrix powers.
        let t = s.operator().unwrap();
        for n in 0..=8 {
            let v = t.pow(n).mul_vec(&s.x);
            assert!(vec_norm(&v) >= rates[n]);
        }
        assert!(s.kappa > 0.0);
    }

    #[test]
    fn constant_rates_use_identical_lines() {
        let s = slow_instance(&[1.0, 1.0, 1.0]).unwrap();
        assert!(s.angles.iter().all(|a| *a == 0.0));
        assert!(s.norms.iter().all(|n| (n - 3f64.sqrt()).abs() < 1e-14));
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(slow_instance(&[]).is_err());
        assert!(slow_instance(&[0.5, 0.6]).is_err());
        assert!(slow_instance(&[1.0, 0.0]).is_err());
    }
}
