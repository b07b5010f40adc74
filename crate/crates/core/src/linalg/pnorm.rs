//! Operator norms on finite-dimensional complex ℓ^p.
//!
//! `estimate` mode is the dual-ascent fixed-point iteration: with `x` on the
//! unit ℓ^p sphere, form `y = A x`, pull the norming functional of `y` back
//! through `A^H`, and move `x` to the ℓ^p vector normed by that functional.
//! Each step cannot decrease `‖Ax‖_p`, and the fixed points are stationary
//! points of the ratio, so the result is a lower bound; several deterministic
//! starts guard against poor local maxima.
//!
//! `exact-small` mode is an exhaustive oracle for tiny matrices: a grid over
//! every face `x_k = 1` of the complex unit polydisc, followed by a compass
//! search from the best grid cells.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::{CMatrix, ONE, ZERO};
use super::svd::norm2;
use super::LinalgError;

/// Largest `max(rows, cols)` accepted by the exact oracle.
pub const EXACT_SMALL_REAL_MAX: usize = 4;
pub const EXACT_SMALL_COMPLEX_MAX: usize = 4;

const GRID_BUDGET_PER_FACE: f64 = 4.0e5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnormMode {
    ExactSmall,
    Estimate,
}

#[derive(Debug, Clone, Copy)]
pub struct EstimateOptions {
    /// Number of starting vectors (at least 16 are always used).
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            starts: 16,
            seed: 0x5e_ed0f_9a7e,
            max_iter: 200,
        }
    }
}

pub fn lp_norm(v: &[Complex64], p: f64) -> f64 {
    let m = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    // Scale by the max entry to avoid overflow for large p.
    m * v.iter().map(|z| (z.norm() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// The unit vector of ℓ^{p'} that norms `y` in ℓ^p, written as the column
/// `w` with `Σ conj(w_i) y_i = ‖y‖_p` (so `w_i = |y_i|^{p-1} sgn(y_i) / ‖y‖_p^{p-1}`).
pub fn dual_unit_vector(y: &[Complex64], p: f64) -> Vec<Complex64> {
    let n = lp_norm(y, p);
    if n == 0.0 {
        return vec![ZERO; y.len()];
    }
    y.iter()
        .map(|z| {
            let r = z.norm();
            if r == 0.0 {
                ZERO
            } else {
                (z / r) * (r / n).powf(p - 1.0)
            }
        })
        .collect()
}

fn check_p(p: f64) -> Result<(), LinalgError> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(LinalgError::InvalidExponent { p });
    }
    Ok(())
}

/// `‖A‖_{p→p}` on complex ℓ^p. For `p = 2` both modes return `σ_max`.
pub fn operator_pnorm(a: &CMatrix, p: f64, mode: PnormMode) -> Result<f64, LinalgError> {
    operator_pnorm_with(a, p, mode, &EstimateOptions::default())
}

pub fn operator_pnorm_with(
    a: &CMatrix,
    p: f64,
    mode: PnormMode,
    opts: &EstimateOptions,
) -> Result<f64, LinalgError> {
    check_p(p)?;
    a.ensure_finite()?;
    if a.cols() == 0 {
        return Ok(0.0);
    }
    if p == 2.0 {
        return Ok(norm2(a));
    }
    match mode {
        PnormMode::Estimate => Ok(estimate(a, p, opts)),
        PnormMode::ExactSmall => {
            let dim = a.rows().max(a.cols());
            let (limit, field) = if a.is_real() {
                (EXACT_SMALL_REAL_MAX, "real")
            } else {
                (EXACT_SMALL_COMPLEX_MAX, "complex")
            };
            if dim > limit {
                return Err(LinalgError::TooLargeForExact { dim, field });
            }
            Ok(exact_small(a, p))
        }
    }
}

fn ratio(a: &CMatrix, x: &[Complex64], p: f64) -> f64 {
    let nx = lp_norm(x, p);
    if nx == 0.0 {
        return 0.0;
    }
    lp_norm(&a.mul_vec(x), p) / nx
}

fn estimate(a: &CMatrix, p: f64, opts: &EstimateOptions) -> f64 {
    let n = a.cols();
    let q = p / (p - 1.0);
    let ah = a.adjoint();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut starts: Vec<Vec<Complex64>> = Vec::new();
    starts.push(vec![ONE; n]);
    for k in 0..n {
        let mut e = vec![ZERO; n];
        e[k] = ONE;
        starts.push(e);
    }
    // Right singular vector: a good start, exact for p = 2.
    if let Ok(s) = super::svd::svd(a) {
        starts.push(s.v.column(0));
    }
    let wanted = opts.starts.max(16);
    while starts.len() < wanted {
        let v: Vec<Complex64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        starts.push(v);
    }

    let mut best = 0.0f64;
    for start in starts {
        let nx = lp_norm(&start, p);
        if nx == 0.0 {
            continue;
        }
        let mut x: Vec<Complex64> = start.iter().map(|z| z / nx).collect();
        let mut current = lp_norm(&a.mul_vec(&x), p);
        for _ in 0..opts.max_iter {
            let y = a.mul_vec(&x);
            let w = dual_unit_vector(&y, p);
            let z = ah.mul_vec(&w);
            let zq = lp_norm(&z, q);
            if zq == 0.0 {
                break;
            }
            let next = dual_unit_vector(&z, q);
            let next_val = lp_norm(&a.mul_vec(&next), p);
            if next_val <= current * (1.0 + 1e-15) {
                break;
            }
            x = next;
            current = next_val;
        }
        best = best.max(current);
    }
    best
}

fn exact_small(a: &CMatrix, p: f64) -> f64 {
    let n = a.cols();
    if n == 1 {
        return lp_norm(&a.column(0), p);
    }
    let params = 2 * (n - 1);
    // Odd so that zero, where another face begins, is a grid point.
    let per_axis = ((GRID_BUDGET_PER_FACE.powf(1.0 / params as f64).floor() as usize).clamp(5, 401) - 1) | 1;
    let axis: Vec<f64> = (0..per_axis)
        .map(|i| -1.0 + 2.0 * i as f64 / (per_axis - 1) as f64)
        .collect();
    let spacing = 2.0 / (per_axis - 1) as f64;

    // Best cells of each face, so one face cannot crowd out the others.
    const KEEP: usize = 8;
    let mut starts: Vec<(f64, usize, Vec<f64>)> = Vec::new();
    let mut idx = vec![0usize; params];
    for face in 0..n {
        let mut top: Vec<(f64, usize, Vec<f64>)> = Vec::new();
        idx.iter_mut().for_each(|i| *i = 0);
        loop {
            let theta: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
            let x = face_vector(n, face, &theta);
            let r = ratio(a, &x, p);
            if top.len() < KEEP || r > top[top.len() - 1].0 {
                top.push((r, face, theta));
                top.sort_by(|u, v| v.0.total_cmp(&u.0));
                top.truncate(KEEP);
            }
            // Odometer increment.
            let mut k = 0;
            loop {
                if k == params {
                    break;
                }
                idx[k] += 1;
                if idx[k] < per_axis {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == params {
                break;
            }
        }
        starts.extend(top);
    }

    let mut best = starts.iter().map(|t| t.0).fold(0.0, f64::max);
    for (r0, face, theta) in starts {
        let refined = compass_search(a, p, n, face, theta, r0, spacing);
        best = best.max(refined);
    }
    best
}

fn face_vector(n: usize, face: usize, theta: &[f64]) -> Vec<Complex64> {
    let mut x = Vec::with_capacity(n);
    let mut t = 0;
    for k in 0..n {
        if k == face {
            x.push(ONE);
        } else {
            x.push(Complex64::new(theta[t], theta[t + 1]));
            t += 2;
        }
    }
    x
}

fn compass_search(
    a: &CMatrix,
    p: f64,
    n: usize,
    face: usize,
    mut theta: Vec<f64>,
    mut value: f64,
    mut step: f64,
) -> f64 {
    while step > 1e-11 {
        let mut improved = false;
        for k in 0..theta.len() {
            for dir in [1.0, -1.0] {
                let mut trial = theta.clone();
                trial[k] += dir * step;
                // Never push an entry further past modulus one: beyond the
                // face the same directions are covered by another face.
                let pair = k - k % 2;
                let modulus = trial[pair].hypot(trial[pair + 1]);
                if modulus > 1.0 && modulus > theta[pair].hypot(theta[pair + 1]) {
                    continue;
                }
                let r = ratio(a, &face_vector(n, face, &trial), p);
                if r > value {
                    value = r;
                    theta = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    value
}
