use serde::{Deserialize, Serialize};

use super::{fix_split, LabError};
use crate::fit::fit_line;
use crate::linalg::{vec_norm, vec_sub, CMatrix};
use crate::random::{random_vector, seeded_rng};

const MAX_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpolyOptions {
    pub k_max: usize,
    pub n_max: usize,
    /// Inclusive `n` range for the log-log slope fit.
    pub window: (usize, usize),
    pub seed: u64,
}

impl Default for SuperpolyOptions {
    fn default() -> Self {
        Self {
            k_max: 3,
            n_max: 100,
            window: (10, 100),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperpolyCurve {
    pub k: usize,
    /// `‖Tⁿ x_k‖` for `n = 0..=n_max`, with `x_k = (I − T)^k y`.
    pub values: Vec<f64>,
    /// Log-log slope over the window; `None` when the curve vanishes there.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperpolyReport {
    pub curves: Vec<SuperpolyCurve>,
    /// Slopes never increase with `k` by more than 0.1.
    pub slopes_non_increasing: bool,
    pub seed_used: u64,
}

/// Decay curves of `Tⁿ (I − T)^k y` for `k = 1..=k_max` and a seeded `y`.
pub fn superpoly_vectors(t: &CMatrix, opts: &SuperpolyOptions) -> Result<SuperpolyReport, LabError> {
    let d = t.ensure_square()?;
    if opts.k_max < 2 {
        return Err(LabError::BadArgument("k_max must be at least 2".into()));
    }
    let (w0, w1) = opts.window;
    if w0 < 1 || w1 <= w0 || w1 > opts.n_max {
        return Err(LabError::BadArgument(format!(
            "window ({w0}, {w1}) must satisfy 1 <= lo < hi <= n_max"
        )));
    }
    fix_split(t, None)?;

    let mut chosen = None;
    for attempt in 0..MAX_ATTEMPTS {
        let seed = opts.seed.wrapping_add(attempt as u64);
        let mut rng = seeded_rng(seed);
        let y = random_vector(&mut rng, d);
        let scale = vec_norm(&y);
        let mut xs = Vec::with_capacity(opts.k_max);
        let mut x = y;
        for _ in 0..opts.k_max {
            x = vec_sub(&x, &t.mul_vec(&x));
            xs.push(x.clone());
        }
        if xs.iter().all(|v| vec_norm(v) > 1e-14 * scale) {
            chosen = Some((seed, xs));
            break;
        }
    }
    let Some((seed_used, xs)) = chosen else {
        return Err(LabError::VanishingVectors {
            attempts: MAX_ATTEMPTS,
        });
    };

    let curves: Vec<SuperpolyCurve> = xs
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut values = Vec::with_capacity(opts.n_max + 1);
            let mut v = x;
            values.push(vec_norm(&v));
            for _ in 0..opts.n_max {
                v = t.mul_vec(&v);
                values.push(vec_norm(&v));
            }
            let (lx, ly): (Vec<f64>, Vec<f64>) = (w0..=w1)
                .filter(|&n| values[n] > 0.0)
                .map(|n| ((n as f64).ln(), values[n].ln()))
                .unzip();
            SuperpolyCurve {
                k: i + 1,
                slope: fit_line(&lx, &ly).map(|f| f.slope),
                values,
            }
        })
        .collect();
    let slopes_non_increasing = curves.windows(2).all(|w| match (w[0].slope, w[1].slope) {
        (Some(a), Some(b)) => b <= a + 0.1,
        (_, None) => true,
        (None, Some(_)) => false,
    });
    Ok(SuperpolyReport {
        curves,
        slopes_non_increasing,
        seed_used,
    })
}
