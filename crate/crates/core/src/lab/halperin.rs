use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LabError;
use crate::linalg::{
    lp_norm, norm2, operator_pnorm, vec_sub, CMatrix, PnormMode, EXACT_SMALL_COMPLEX_MAX,
};
use crate::random::{random_vector, seeded_rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum HalperinMode {
    Hilbert,
    Lp { p: f64 },
}

impl HalperinMode {
    fn p(&self) -> f64 {
        match self {
            HalperinMode::Hilbert => 2.0,
            HalperinMode::Lp { p } => *p,
        }
    }

    /// Power type of uniform convexity, `max(2, p)`.
    pub fn q(&self) -> f64 {
        self.p().max(2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalperinReport {
    pub q: f64,
    pub factors: usize,
    /// `1 / q^N`.
    pub exponent: f64,
    /// Max ratio over the first `samples` draws.
    pub c_hat: f64,
    /// Max ratio over `2 × samples` draws (the first half is the same stream).
    pub c_hat_doubled: f64,
    pub relative_change: f64,
    /// Doubling changed `Ĉ` by less than 20%.
    pub stable: bool,
    pub witness: Option<Vec<Complex64>>,
    pub used: usize,
    pub skipped: usize,
}

/// Samples `‖x − Tx‖ / (1 − ‖Tx‖)^{1/q^N}` over seeded unit vectors, with
/// `T = P_N ⋯ P_1`. Draws with `1 − ‖Tx‖ ≤ 1e-14` are skipped.
pub fn halperin_inequality_check(
    projections: &[CMatrix],
    mode: HalperinMode,
    samples: usize,
    seed: u64,
) -> Result<HalperinReport, LabError> {
    let first = projections
        .first()
        .ok_or_else(|| LabError::BadArgument("at least one projection is required".into()))?;
    let d = first.ensure_square()?;
    if samples == 0 {
        return Err(LabError::BadArgument("samples must be positive".into()));
    }
    let p = mode.p();
    for (index, m) in projections.iter().enumerate() {
        if m.ensure_square()? != d {
            return Err(LabError::BadArgument(format!("factor {index} has the wrong dimension")));
        }
        let (norm, bound) = match mode {
            HalperinMode::Hilbert => (norm2(m), 1.0 + 1e-10),
            HalperinMode::Lp { p } if d <= EXACT_SMALL_COMPLEX_MAX => {
                (operator_pnorm(m, p, PnormMode::ExactSmall)?, 1.0 + 1e-6)
            }
            HalperinMode::Lp { p } => (operator_pnorm(m, p, PnormMode::Estimate)?, 1.0 + 1e-6),
        };
        if norm > bound {
            return Err(LabError::NonContraction { index, norm });
        }
    }
    let mut t = CMatrix::identity(d);
    for m in projections {
        t = m.try_matmul(&t)?;
    }
    let q = mode.q();
    let exponent = 1.0 / q.powi(projections.len() as i32);

    let mut rng = seeded_rng(seed);
    let mut c_hat = 0.0f64;
    let mut c_hat_doubled = 0.0f64;
    let mut witness = None;
    let (mut used, mut skipped) = (0, 0);
    for k in 0..2 * samples {
        let v = random_vector(&mut rng, d);
        let nv = lp_norm(&v, p);
        if nv == 0.0 {
            skipped += 1;
            continue;
        }
        let x: Vec<Complex64> = v.iter().map(|z| z / nv).collect();
        let tx = t.mul_vec(&x);
        let gap = 1.0 - lp_norm(&tx, p);
        if gap <= 1e-14 {
            skipped += 1;
            continue;
        }
        used += 1;
        let ratio = lp_norm(&vec_sub(&x, &tx), p) / gap.powf(exponent);
        if ratio > c_hat_doubled {
            c_hat_doubled = ratio;
        }
        if k < samples && ratio > c_hat {
            c_hat = ratio;
            witness = Some(x);
        }
    }
    let relative_change = if c_hat > 0.0 {
        (c_hat_doubled - c_hat) / c_hat
    } else if c_hat_doubled > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(HalperinReport {
        q,
        factors: projections.len(),
        exponent,
        c_hat,
        c_hat_doubled,
        stable: c_hat.is_finite() && relative_change < 0.2,
        relative_change,
        witness,
        used,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::orth_projection;
    use crate::spaces::random_subspace;

    #[test]
    fn single_projection_pythagoras() {
        let mut rng = seeded_rng(3);
        let p = orth_projection(&random_subspace(&mut rng, 5, 2));
        let r = halperin_inequality_check(&[p.matrix().clone()], HalperinMode::Hilbert, 2000, 7).unwrap();
        assert!(r.c_hat <= 2f64.sqrt() + 1e-6);
        assert!(r.stable);
        assert_eq!(r.exponent, 0.5);
    }

    #[test]
    fn identity_is_vacuous() {
        let id = CMatrix::identity(3);
        let r = halperin_inequality_check(&[id.clone(), id], HalperinMode::Hilbert, 100, 1).unwrap();
        assert_eq!(r.c_hat, 0.0);
        assert_eq!(r.used, 0);
        assert!(r.stable);
    }

    #[test]
    fn rejects_expansive_factor() {
        let m = CMatrix::from_real_rows(&[&[1.0, 5.0], &[0.0, 0.0]]);
        assert!(matches!(
            halperin_inequality_check(&[m], HalperinMode::Hilbert, 10, 1),
            Err(LabError::NonContraction { .. })
        ));
    }
}
