use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hull::convex_hull;
use super::SpectralError;
use crate::linalg::{hermitian_extreme_eig, inner, CMatrix};
use crate::random::{random_vector, seeded_rng};
use crate::spaces::{duality_map, pairing, LpSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NumericalRangeMethod {
    RotationBoundary,
    DualitySampling,
}

/// Points of the numerical range and the convex hull of those points. Both
/// methods give inner approximations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericalRangeSample {
    pub points: Vec<Complex64>,
    pub method: NumericalRangeMethod,
    /// Counter-clockwise extreme points.
    pub hull: Vec<Complex64>,
    /// Unit vectors producing `points` (rotation method only).
    #[serde(skip)]
    pub vectors: Vec<Vec<Complex64>>,
}

impl NumericalRangeSample {
    pub fn from_points(points: Vec<Complex64>, method: NumericalRangeMethod) -> Self {
        let hull = convex_hull(&points);
        Self {
            points,
            method,
            hull,
            vectors: Vec::new(),
        }
    }

    /// Number of sampled directions or vectors.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Rotation algorithm: for `ψ_j = 2πj/m`, the top eigenvector `x_j` of the
/// Hermitian part of `e^{iψ_j} T` gives the boundary point `⟨T x_j, x_j⟩`,
/// which maximizes `Re(e^{iψ_j} z)` over the numerical range.
pub fn numerical_range_hilbert(t: &CMatrix, m: usize) -> Result<NumericalRangeSample, SpectralError> {
    t.ensure_square()?;
    if m < 8 {
        return Err(SpectralError::TooFew { min: 8, got: m });
    }
    let mut points = Vec::with_capacity(m);
    let mut vectors = Vec::with_capacity(m);
    for j in 0..m {
        let psi = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let rotated = t.scale(Complex64::from_polar(1.0, psi));
        let h = rotated.hermitian_part();
        let (_, x) = hermitian_extreme_eig(&h)?;
        points.push(inner(&x, &t.mul_vec(&x)));
        vectors.push(x);
    }
    let mut sample = NumericalRangeSample::from_points(points, NumericalRangeMethod::RotationBoundary);
    sample.vectors = vectors;
    Ok(sample)
}

/// Cap on boundary points produced by [`numerical_range_hilbert_refined`].
const REFINE_MAX_POINTS: usize = 1 << 18;

struct Support {
    psi: f64,
    z: Complex64,
    h: f64,
    x: Vec<Complex64>,
}

fn support(t: &CMatrix, psi: f64) -> Result<Support, SpectralError> {
    let w = Complex64::from_polar(1.0, psi);
    let (_, x) = hermitian_extreme_eig(&t.scale(w).hermitian_part())?;
    let z = inner(&x, &t.mul_vec(&x));
    Ok(Support { psi, z, h: (w * z).re, x })
}

/// Distance from the chord `[a.z, b.z]` to the corner where the supporting
/// lines `Re(e^{iψ} z) = h` at `a` and `b` meet; the boundary between the two
/// points lies in that triangle.
fn outer_gap(a: &Support, b: &Support) -> f64 {
    let (ca, sa) = (a.psi.cos(), a.psi.sin());
    let (cb, sb) = (b.psi.cos(), b.psi.sin());
    let det = sa * cb - ca * sb;
    let chord = (a.z - b.z).norm();
    if det.abs() < 1e-14 {
        return chord;
    }
    // x cos ψ − y sin ψ = h for both lines.
    let x = (-a.h * sb + sa * b.h) / det;
    let y = (ca * b.h - cb * a.h) / det;
    super::hull::segment_distance(Complex64::new(x, y), a.z, b.z)
}

/// The rotation algorithm on `m` uniform angles, then bisection of every
/// angular gap whose outer corner lies farther than `gap_tol` from the chord.
/// On return the numerical range lies within `gap_tol` of the hull, up to
/// angular resolution `1e-9` and a cap of `2^18` points.
pub fn numerical_range_hilbert_refined(
    t: &CMatrix,
    m: usize,
    gap_tol: f64,
) -> Result<NumericalRangeSample, SpectralError> {
    t.ensure_square()?;
    if m < 8 {
        return Err(SpectralError::TooFew { min: 8, got: m });
    }
    if !(gap_tol > 0.0) {
        return Err(SpectralError::InvalidParameter { name: "gap_tol", value: gap_tol });
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut sup: Vec<Support> = (0..m)
        .map(|j| support(t, two_pi * j as f64 / m as f64))
        .collect::<Result<_, _>>()?;
    loop {
        let n = sup.len();
        let mut next = Vec::with_capacity(2 * n);
        let mut split = false;
        for (i, a) in sup.iter().enumerate() {
            let b = &sup[(i + 1) % n];
            let b_psi = if i + 1 == n { b.psi + two_pi } else { b.psi };
            let step = b_psi - a.psi;
            let wanted = step > 1e-9 && n + next.len() < REFINE_MAX_POINTS && outer_gap(a, b) > gap_tol;
            next.push(Some(i));
            if wanted {
                next.push(None);
                split = true;
            }
        }
        if !split {
            break;
        }
        let mut refined = Vec::with_capacity(next.len());
        let mut old: Vec<Option<Support>> = sup.into_iter().map(Some).collect();
        let psis: Vec<f64> = old.iter().map(|s| s.as_ref().map_or(0.0, |s| s.psi)).collect();
        for (k, slot) in next.iter().enumerate() {
            match slot {
                Some(i) => refined.push(old[*i].take().expect("each index once")),
                None => {
                    let i = next[k - 1].expect("midpoint follows an original point");
                    let lo = psis[i];
                    let hi = if i + 1 == psis.len() { two_pi } else { psis[i + 1] };
                    refined.push(support(t, 0.5 * (lo + hi))?);
                }
            }
        }
        sup = refined;
    }
    let (points, vectors): (Vec<Complex64>, Vec<Vec<Complex64>>) = sup.into_iter().map(|s| (s.z, s.x)).unzip();
    let mut sample = NumericalRangeSample::from_points(points, NumericalRangeMethod::RotationBoundary);
    sample.vectors = vectors;
    Ok(sample)
}

/// Samples `⟨T x, φ_x⟩` for seeded random complex unit vectors of `l^p`.
pub fn numerical_range_lp(
    t: &CMatrix,
    space: &LpSpace,
    count: usize,
    seed: u64,
) -> Result<NumericalRangeSample, SpectralError> {
    let d = t.ensure_square()?;
    if d != space.dim {
        return Err(crate::linalg::LinalgError::DimensionMismatch {
            expected: space.dim,
            got: d,
        }
        .into());
    }
    if count < 100 {
        return Err(SpectralError::TooFew { min: 100, got: count });
    }
    let mut rng = seeded_rng(seed);
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let v = random_vector(&mut rng, d);
        let n = space.norm(&v);
        if n == 0.0 {
            continue;
        }
        let x: Vec<Complex64> = v.iter().map(|z| z / n).collect();
        let phi = duality_map(space, &x)?;
        points.push(pairing(&t.mul_vec(&x), &phi));
    }
    Ok(NumericalRangeSample::from_points(points, NumericalRangeMethod::DualitySampling))
}
