//! Subspaces of `C^d` and finite-dimensional `l^p` spaces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{qr_orthonormalize, svd, CMatrix, LinalgError, ZERO};
use crate::random::{random_matrix, Rng};

/// Default cosine threshold for treating a principal angle as zero.
pub const DEFAULT_INTERSECT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpacesError {
    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("principal angles are undefined for the zero subspace")]
    ZeroSubspace,
    #[error("the duality map is undefined at the zero vector")]
    ZeroVector,
    #[error("vector length {got} does not match dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("basis is not orthonormal (Gram defect {defect:.3e})")]
    NotOrthonormal { defect: f64 },
    #[error("invalid l^p space: dim {dim}, p {p}")]
    InvalidSpace { dim: usize, p: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A subspace of `C^d` stored by an orthonormal basis (`d x r`, `r = 0` for
/// the zero subspace).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: CMatrix,
}

impl Subspace {
    /// Span of arbitrary vectors, orthonormalized at the default QR threshold.
    pub fn from_spanning(ambient_dim: usize, vectors: &[Vec<Complex64>]) -> Result<Self, SpacesError> {
        let basis = qr_orthonormalize(ambient_dim, vectors, None)?;
        Ok(Self { ambient_dim, basis })
    }

    /// Wraps a basis that is already orthonormal (checked to 1e-10).
    pub fn from_orthonormal(basis: CMatrix) -> Result<Self, SpacesError> {
        let defect = gram_defect(&basis);
        if defect > 1e-10 {
            return Err(SpacesError::NotOrthonormal { defect });
        }
        Ok(Self {
            ambient_dim: basis.rows(),
            basis,
        })
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: CMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: CMatrix::identity(ambient_dim),
        }
    }

    /// `span{e_i : i in idx}`.
    pub fn coordinate(ambient_dim: usize, idx: &[usize]) -> Result<Self, SpacesError> {
        let vectors: Vec<Vec<Complex64>> = idx
            .iter()
            .map(|&i| {
                let mut e = vec![ZERO; ambient_dim];
                if i < ambient_dim {
                    e[i] = Complex64::new(1.0, 0.0);
                }
                e
            })
            .collect();
        if let Some(&bad) = idx.iter().find(|&&i| i >= ambient_dim) {
            return Err(SpacesError::DimensionMismatch {
                expected: ambient_dim,
                got: bad + 1,
            });
        }
        Self::from_spanning(ambient_dim, &vectors)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Orthogonal projector `B B^H`.
    pub fn projector(&self) -> CMatrix {
        if self.is_zero() {
            return CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        }
        &self.basis * &self.basis.adjoint()
    }

    /// `‖v − P v‖` for the orthogonal projector onto this subspace.
    pub fn distance(&self, v: &[Complex64]) -> f64 {
        if self.is_zero() {
            return crate::linalg::vec_norm(v);
        }
        let coeffs = self.basis.adjoint().mul_vec(v);
        let pv = self.basis.mul_vec(&coeffs);
        crate::linalg::vec_norm(&crate::linalg::vec_sub(v, &pv))
    }

    /// Largest distance from a basis vector of `other` to this subspace.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        other
            .basis
            .columns()
            .iter()
            .map(|c| self.distance(c))
            .fold(0.0, f64::max)
    }

    /// The image `U S` under a unitary (or any isometry) `U`.
    pub fn transform(&self, u: &CMatrix) -> Result<Self, SpacesError> {
        if u.cols() != self.ambient_dim {
            return Err(SpacesError::AmbientMismatch {
                left: u.cols(),
                right: self.ambient_dim,
            });
        }
        if self.is_zero() {
            return Ok(Self::zero(u.rows()));
        }
        Self::from_orthonormal(u.try_matmul(&self.basis)?)
    }
}

fn gram_defect(q: &CMatrix) -> f64 {
    if q.cols() == 0 {
        return 0.0;
    }
    (&(&q.adjoint() * q) - &CMatrix::identity(q.cols())).frobenius_norm()
}

fn check_ambient(a: &Subspace, b: &Subspace) -> Result<(), SpacesError> {
    if a.ambient_dim != b.ambient_dim {
        return Err(SpacesError::AmbientMismatch {
            left: a.ambient_dim,
            right: b.ambient_dim,
        });
    }
    Ok(())
}

/// Random subspace of dimension `r`, spanned by Gaussian vectors.
pub fn random_subspace(rng: &mut Rng, ambient_dim: usize, r: usize) -> Subspace {
    if r == 0 {
        return Subspace::zero(ambient_dim);
    }
    loop {
        let g = random_matrix(rng, ambient_dim, r);
        if let Ok(s) = Subspace::from_spanning(ambient_dim, &g.columns()) {
            if s.dim() == r.min(ambient_dim) {
                return s;
            }
        }
    }
}

/// Orthogonal complement, from the left singular vectors of `I − B B^H`.
pub fn complement(s: &Subspace) -> Result<Subspace, SpacesError> {
    let d = s.ambient_dim;
    let r = s.dim();
    if r == 0 {
        return Ok(Subspace::full(d));
    }
    if r >= d {
        return Ok(Subspace::zero(d));
    }
    let m = CMatrix::identity(d).try_sub(&s.projector())?;
    let dec = svd(&m)?;
    Subspace::from_spanning(d, &dec.u.column_range(0, d - r).columns())
}

/// Cosines of the principal angles, non-increasing, clamped to `[0, 1]`.
pub fn principal_angles(a: &Subspace, b: &Subspace) -> Result<Vec<f64>, SpacesError> {
    check_ambient(a, b)?;
    if a.is_zero() || b.is_zero() {
        return Err(SpacesError::ZeroSubspace);
    }
    let g = a.basis.adjoint().try_matmul(&b.basis)?;
    Ok(svd(&g)?.sigma.iter().map(|s| s.clamp(0.0, 1.0)).collect())
}

/// Principal vectors of the pair: `(A U, cosines, B V)` from `A^H B = U Σ V^H`.
fn principal_vectors(a: &Subspace, b: &Subspace) -> Result<(CMatrix, Vec<f64>, CMatrix), SpacesError> {
    let g = a.basis.adjoint().try_matmul(&b.basis)?;
    let dec = svd(&g)?;
    let cos: Vec<f64> = dec.sigma.iter().map(|s| s.clamp(0.0, 1.0)).collect();
    Ok((a.basis.try_matmul(&dec.u)?, cos, b.basis.try_matmul(&dec.v)?))
}

/// `A ∩ B` as the span of principal vectors whose cosine is at least `1 − tol`.
pub fn intersect(a: &Subspace, b: &Subspace, tol: Option<f64>) -> Result<Subspace, SpacesError> {
    check_ambient(a, b)?;
    let tol = check_tol(tol)?;
    if a.is_zero() || b.is_zero() {
        return Ok(Subspace::zero(a.ambient_dim));
    }
    let (ua, cos, _) = principal_vectors(a, b)?;
    let k = cos.iter().filter(|&&c| c >= 1.0 - tol).count();
    if k == 0 {
        return Ok(Subspace::zero(a.ambient_dim));
    }
    Subspace::from_spanning(a.ambient_dim, &ua.column_range(0, k).columns())
}

/// Left fold of [`intersect`].
pub fn intersect_all(spaces: &[Subspace], tol: Option<f64>) -> Result<Subspace, SpacesError> {
    let mut iter = spaces.iter();
    let Some(first) = iter.next() else {
        return Err(SpacesError::ZeroSubspace);
    };
    let mut acc = first.clone();
    for s in iter {
        acc = intersect(&acc, s, tol)?;
    }
    Ok(acc)
}

fn check_tol(tol: Option<f64>) -> Result<f64, SpacesError> {
    let tol = tol.unwrap_or(DEFAULT_INTERSECT_TOL);
    if !(tol >= 0.0) || !tol.is_finite() {
        return Err(LinalgError::InvalidTolerance { tol }.into());
    }
    Ok(tol)
}

/// Both subspaces with their common part removed.
#[derive(Debug, Clone)]
pub struct Deflated {
    pub intersection: Subspace,
    pub a: Subspace,
    pub b: Subspace,
}

/// Removes `A ∩ B` from each side, keeping the orthogonal complement of the
/// intersection inside each space.
pub fn deflate(a: &Subspace, b: &Subspace, tol: Option<f64>) -> Result<Deflated, SpacesError> {
    check_ambient(a, b)?;
    let tol = check_tol(tol)?;
    let d = a.ambient_dim;
    let m = intersect(a, b, Some(tol))?;
    let strip = |s: &Subspace| -> Result<Subspace, SpacesError> {
        if m.is_zero() || s.is_zero() {
            return Ok(s.clone());
        }
        let keep = s.dim().saturating_sub(m.dim());
        if keep == 0 {
            return Ok(Subspace::zero(d));
        }
        // (I − P_M) B, then its leading left singular vectors.
        let residual = CMatrix::identity(d).try_sub(&m.projector())?.try_matmul(&s.basis)?;
        let dec = svd(&residual)?;
        Subspace::from_spanning(d, &dec.u.column_range(0, keep).columns())
    };
    Ok(Deflated {
        a: strip(a)?,
        b: strip(b)?,
        intersection: m,
    })
}

/// The Friedrichs number `c(A, B)`: the largest principal cosine after both
/// spaces are deflated by `A ∩ B`, or 0 when either deflated space is zero.
pub fn friedrichs_number(a: &Subspace, b: &Subspace, tol: Option<f64>) -> Result<f64, SpacesError> {
    let def = deflate(a, b, tol)?;
    if def.a.is_zero() || def.b.is_zero() {
        return Ok(0.0);
    }
    Ok(principal_angles(&def.a, &def.b)?[0])
}

/// Finite-dimensional complex `l^p`, `1 < p < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpSpace {
    pub dim: usize,
    pub p: f64,
}

impl LpSpace {
    pub fn new(dim: usize, p: f64) -> Result<Self, SpacesError> {
        if dim == 0 || !(p > 1.0) || !p.is_finite() {
            return Err(SpacesError::InvalidSpace { dim, p });
        }
        Ok(Self { dim, p })
    }

    pub fn hilbert(dim: usize) -> Result<Self, SpacesError> {
        Self::new(dim, 2.0)
    }

    /// Uniform convexity power type `max(2, p)`.
    pub fn q_convexity_exponent(&self) -> f64 {
        self.p.max(2.0)
    }

    /// Uniform smoothness power type `min(2, p)`.
    pub fn p_smoothness_exponent(&self) -> f64 {
        self.p.min(2.0)
    }

    pub fn conjugate_exponent(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn norm(&self, x: &[Complex64]) -> f64 {
        crate::linalg::lp_norm(x, self.p)
    }

    fn check_len(&self, x: &[Complex64]) -> Result<(), SpacesError> {
        if x.len() != self.dim {
            return Err(SpacesError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// Bilinear pairing `⟨x, φ⟩ = Σ x_i φ_i` between a vector and a functional.
pub fn pairing(x: &[Complex64], phi: &[Complex64]) -> Complex64 {
    x.iter().zip(phi).map(|(a, b)| a * b).sum()
}

/// The duality map `φ_x` with entries `‖x‖^{2−p} |x_i|^{p−2} conj(x_i)`,
/// so that `⟨x, φ_x⟩ = ‖x‖²` and `‖φ_x‖_{p'} = ‖x‖_p`.
pub fn duality_map(space: &LpSpace, x: &[Complex64]) -> Result<Vec<Complex64>, SpacesError> {
    space.check_len(x)?;
    let n = space.norm(x);
    if n == 0.0 {
        return Err(SpacesError::ZeroVector);
    }
    let p = space.p;
    Ok(x.iter()
        .map(|z| {
            let r = z.norm();
            if r == 0.0 {
                ZERO
            } else {
                // ‖x‖ (|x_i|/‖x‖)^{p−1} conj(x_i)/|x_i|, written to avoid overflow.
                z.conj() * (n * (r / n).powf(p - 1.0) / r)
            }
        })
        .collect())
}
