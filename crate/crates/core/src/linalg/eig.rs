use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{CMatrix, ZERO};
use super::LinalgError;

const ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues of a square matrix, repeated by algebraic multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvalues sorted by real part, then imaginary part.
    pub fn sorted(&self) -> Vec<Complex64> {
        let mut v = self.eigenvalues.clone();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    /// Largest modulus among eigenvalues farther than `tol` from 1.
    pub fn radius_excluding_one(&self, tol: f64) -> f64 {
        self.eigenvalues
            .iter()
            .filter(|z| (*z - 1.0).norm() > tol)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn contains_near(&self, z: Complex64, tol: f64) -> bool {
        self.eigenvalues.iter().any(|w| (w - z).norm() <= tol)
    }
}

/// Eigenvalues of a general complex matrix.
///
/// Householder reduction to upper Hessenberg form, then single-shift complex
/// QR iteration with Wilkinson shifts, deflating from the bottom. Exceptional
/// shifts are taken every tenth iteration on a stalled block. Failure to
/// converge is reported as an error; no partial spectrum is returned.
pub fn eigenvalues(a: &CMatrix) -> Result<Spectrum, LinalgError> {
    let n = a.ensure_square()?;
    a.ensure_finite()?;
    let mut h = rows_of(a);
    hessenberg(&mut h);

    let eps = f64::EPSILON;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let mut hi = n.saturating_sub(1);
    let mut iter = 0usize;
    let mut total = 0usize;
    let budget = ITERATIONS_PER_EIGENVALUE * n.max(1);

    while hi > 0 {
        // Locate the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[lo][lo - 1].norm();
            let mut diag = h[lo - 1][lo - 1].norm() + h[lo][lo].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= eps * diag || sub <= eps * eps * scale {
                h[lo][lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > budget {
            return Err(LinalgError::NoConvergence {
                algorithm: "shifted QR eigenvalue iteration",
                iterations: total,
            });
        }

        let mu = if iter.is_multiple_of(10) {
            // Exceptional shift to break cycles.
            h[hi][hi] + Complex64::new(h[hi][hi - 1].norm() * 0.75, h[hi - 1][hi - 1].norm() * 0.25)
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };

        qr_step(&mut h, lo, hi, mu);
    }

    Ok(Spectrum {
        eigenvalues: (0..n).map(|i| h[i][i]).collect(),
    })
}

fn rows_of(a: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..a.rows()).map(|i| a.row(i).to_vec()).collect()
}

/// Eigenvalue of the trailing 2x2 block closer to its (2,2) entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` with `G [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let norm = na.hypot(nb);
    let phase = a / na;
    (na / norm, phase * b.conj() / norm)
}

/// One explicit shifted QR sweep `H - mu I = QR`, `H <- RQ + mu I` on the
/// active window `lo..=hi`.
fn qr_step(h: &mut [Vec<Complex64>], lo: usize, hi: usize, mu: Complex64) {
    for i in lo..=hi {
        h[i][i] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[k][k], h[k + 1][k]);
        for j in k..=hi {
            let x = h[k][j];
            let y = h[k + 1][j];
            h[k][j] = x * c + s * y;
            h[k + 1][j] = -s.conj() * x + y * c;
        }
        rots.push((c, s));
    }
    for (offset, &(c, s)) in rots.iter().enumerate() {
        let k = lo + offset;
        let top = (k + 1).min(hi);
        for row in h.iter_mut().take(top + 1).skip(lo) {
            let x = row[k];
            let y = row[k + 1];
            row[k] = x * c + y * s.conj();
            row[k + 1] = -x * s + y * c;
        }
    }
    for i in lo..=hi {
        h[i][i] += mu;
    }
}

/// In-place Householder reduction to upper Hessenberg form (similarity).
fn hessenberg(h: &mut [Vec<Complex64>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let alpha_norm: f64 = (k + 1..n).map(|i| h[i][k].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[k + 1][k];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // v = x + phase * |x| e_1, reflector H = I - 2 v v^H / (v^H v).
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[i][k]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // Left: rows k+1.., all columns.
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * h[k + 1 + t][j])
                .sum();
            let f = dot * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                h[k + 1 + t][j] -= vi * f;
            }
        }
        // Right: all rows, columns k+1..
        for row in h.iter_mut() {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| row[k + 1 + t] * vi)
                .sum();
            let f = dot * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                row[k + 1 + t] -= f * vi.conj();
            }
        }
        for row in h.iter_mut().skip(k + 2) {
            row[k] = ZERO;
        }
    }
}
