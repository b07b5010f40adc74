//! Projections: Hilbert orthogonal, oblique, and norm-one projections on
//! finite-dimensional `l^p`, with the type-D and type-U tests.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    inverse, lp_norm, norm2, operator_pnorm, svd, CMatrix, LinalgError, PnormMode, ZERO,
};
use crate::spaces::{duality_map, LpSpace, SpacesError, Subspace};

/// Relative idempotency tolerance: `‖P² − P‖ ≤ 1e-10 · max(1, ‖P‖²)`.
pub const IDEMPOTENT_TOL: f64 = 1e-10;
/// Default acceptance tolerance for `min g ≤ tol` in the type-D test.
pub const TYPE_D_TOL: f64 = 1e-8;
/// Allowed excess over 1 when certifying an `l^p` projection norm.
pub const LP_NORM_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("matrix is not idempotent (defect {defect:.3e})")]
    NotIdempotent { defect: f64 },
    #[error("range and kernel are not complementary (smallest singular value {sigma_min:.3e})")]
    NotComplementary { sigma_min: f64 },
    #[error("the projection is zero")]
    ZeroProjection,
    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("coordinate {index} appears in more than one block")]
    OverlappingBlocks { index: usize },
    #[error("coordinate {index} is outside dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("block {block}: vector has mass at coordinate {index} outside the block")]
    SupportOutsideBlock { block: usize, index: usize },
    #[error("block {block}: vector has l^p norm {norm}, expected 1")]
    NonUnitVector { block: usize, norm: f64 },
    #[error("expected {expected} block vectors, got {got}")]
    BlockCount { expected: usize, got: usize },
    #[error("projection norm {norm} exceeds 1 ({method})")]
    NormExceedsOne { norm: f64, method: &'static str },
    #[error(transparent)]
    Spaces(#[from] SpacesError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProjectionKind {
    HilbertOrthogonal,
    /// Condition number of the stacked `[range | kernel]` basis.
    Oblique { condition: f64 },
    LpConditionalExpectation { p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionOp {
    matrix: CMatrix,
    kind: ProjectionKind,
    range_dim: usize,
}

impl ProjectionOp {
    /// Wraps an idempotent square matrix.
    pub fn from_matrix(matrix: CMatrix, kind: ProjectionKind) -> Result<Self, ProjectionError> {
        let defect = idempotency_defect(&matrix)?;
        let scale = norm2(&matrix).powi(2).max(1.0);
        if defect > IDEMPOTENT_TOL * scale {
            return Err(ProjectionError::NotIdempotent { defect });
        }
        let sv = svd(&matrix)?;
        let thr = f64::EPSILON * matrix.rows() as f64 * sv.sigma_max().max(1.0) * 16.0;
        let range_dim = sv.rank(thr);
        Ok(Self {
            matrix,
            kind,
            range_dim,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> ProjectionKind {
        self.kind
    }

    pub fn range_dim(&self) -> usize {
        self.range_dim
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.range_dim == 0
    }

    /// `I − P`, the complementary projection.
    pub fn complementary(&self) -> ProjectionOp {
        let n = self.dim();
        ProjectionOp {
            matrix: &CMatrix::identity(n) - &self.matrix,
            kind: self.kind,
            range_dim: n - self.range_dim,
        }
    }
}

/// `‖P² − P‖₂`.
pub fn idempotency_defect(p: &CMatrix) -> Result<f64, ProjectionError> {
    p.ensure_square()?;
    Ok(norm2(&p.try_matmul(p)?.try_sub(p)?))
}

/// `B B^H` for an orthonormal basis `B` of `s`.
pub fn orth_projection(s: &Subspace) -> ProjectionOp {
    ProjectionOp {
        matrix: s.projector(),
        kind: ProjectionKind::HilbertOrthogonal,
        range_dim: s.dim(),
    }
}

/// The projection onto `range` along `kernel`.
pub fn oblique_projection(range: &Subspace, kernel: &Subspace) -> Result<ProjectionOp, ProjectionError> {
    let d = range.ambient_dim();
    if kernel.ambient_dim() != d {
        return Err(ProjectionError::AmbientMismatch {
            left: d,
            right: kernel.ambient_dim(),
        });
    }
    let r = range.dim();
    if r + kernel.dim() != d {
        return Err(ProjectionError::NotComplementary { sigma_min: 0.0 });
    }
    if r == 0 {
        return Ok(ProjectionOp {
            matrix: CMatrix::zeros(d, d),
            kind: ProjectionKind::Oblique { condition: 1.0 },
            range_dim: 0,
        });
    }
    if r == d {
        return Ok(ProjectionOp {
            matrix: CMatrix::identity(d),
            kind: ProjectionKind::Oblique { condition: 1.0 },
            range_dim: d,
        });
    }
    let w = range.basis().hstack(kernel.basis())?;
    let sv = svd(&w)?;
    let sigma_min = sv.sigma_min();
    if sigma_min <= 1e-10 * sv.sigma_max() {
        return Err(ProjectionError::NotComplementary { sigma_min });
    }
    let condition = sv.sigma_max() / sigma_min;
    let winv = inverse(&w)?;
    // x = R a + K b with (a; b) = W⁻¹ x, and P x = R a.
    let top = CMatrix::from_fn(r, d, |i, j| winv[(i, j)]);
    let matrix = range.basis().try_matmul(&top)?;
    Ok(ProjectionOp {
        matrix,
        kind: ProjectionKind::Oblique { condition },
        range_dim: r,
    })
}

/// `‖A − r I‖₂`.
pub fn shift_norm(a: &CMatrix, r: f64) -> f64 {
    norm2(&a.shift(Complex64::new(r, 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeD {
    pub r: f64,
    /// `g(r) = ‖A − rI‖ − (1 − r)` at the returned `r`.
    pub g: f64,
}

/// Minimizes the convex function `g(r) = ‖A − rI‖ − (1 − r)` over `[0, 1]`
/// by ternary search, preferring `r = 1/2` when it is within `1e-12` of the
/// minimum. Returns the minimizer when `min g ≤ tol`.
pub fn type_d_search(a: &CMatrix, tol: f64) -> Result<Option<TypeD>, ProjectionError> {
    a.ensure_square()?;
    let g = |r: f64| shift_norm(a, r) - (1.0 - r);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-10 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if g(m1) <= g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    // Stay strictly inside (0, 1).
    let r_star = (0.5 * (lo + hi)).clamp(1e-12, 1.0 - 1e-12);
    let g_star = g(r_star);
    let g_half = g(0.5);
    let best = if g_half <= g_star + 1e-12 {
        TypeD { r: 0.5, g: g_half }
    } else {
        TypeD { r: r_star, g: g_star }
    };
    Ok((best.g <= tol).then_some(best))
}

/// The type-D test `‖P − rI‖ ≤ 1 − r` for a nonzero projection.
pub fn type_d_radius(p: &ProjectionOp, tol: f64) -> Result<Option<TypeD>, ProjectionError> {
    if p.is_zero() {
        return Err(ProjectionError::ZeroProjection);
    }
    type_d_search(&p.matrix, tol)
}

/// The type-U test `‖P − I/2‖ ≤ 1/2 + tol`.
pub fn is_type_u(p: &ProjectionOp, tol: f64) -> bool {
    shift_norm(&p.matrix, 0.5) <= 0.5 + tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    ExactSmall,
    Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpPartitionProjection {
    pub space: LpSpace,
    pub blocks: Vec<Vec<usize>>,
    pub vectors: Vec<Vec<Complex64>>,
    pub matrix: CMatrix,
    /// Certified `‖P‖_{p→p}` and the method that produced it.
    pub norm: f64,
    pub norm_method: NormMethod,
}

impl LpPartitionProjection {
    pub fn projection(&self) -> ProjectionOp {
        ProjectionOp {
            matrix: self.matrix.clone(),
            kind: ProjectionKind::LpConditionalExpectation { p: self.space.p },
            range_dim: self.blocks.len(),
        }
    }
}

/// `P x = Σ_b ⟨x, φ_{u_b}⟩ u_b` for disjoint blocks and unit vectors `u_b`
/// supported on their blocks. The norm is certified to be at most
/// `1 + 1e-6`, exactly for `dim ≤ 4` and by estimation otherwise.
pub fn lp_partition_projection(
    space: &LpSpace,
    blocks: &[Vec<usize>],
    unit_vectors: &[Vec<Complex64>],
) -> Result<LpPartitionProjection, ProjectionError> {
    let d = space.dim;
    if blocks.len() != unit_vectors.len() {
        return Err(ProjectionError::BlockCount {
            expected: blocks.len(),
            got: unit_vectors.len(),
        });
    }
    let mut seen = vec![false; d];
    for block in blocks {
        for &i in block {
            if i >= d {
                return Err(ProjectionError::IndexOutOfRange { index: i, dim: d });
            }
            if seen[i] {
                return Err(ProjectionError::OverlappingBlocks { index: i });
            }
            seen[i] = true;
        }
    }
    let mut matrix = CMatrix::zeros(d, d);
    for (b, (block, u)) in blocks.iter().zip(unit_vectors).enumerate() {
        if u.len() != d {
            return Err(SpacesError::DimensionMismatch {
                expected: d,
                got: u.len(),
            }
            .into());
        }
        if let Some(i) = (0..d).find(|i| !block.contains(i) && u[*i] != ZERO) {
            return Err(ProjectionError::SupportOutsideBlock { block: b, index: i });
        }
        let norm = lp_norm(u, space.p);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(ProjectionError::NonUnitVector { block: b, norm });
        }
        let phi = duality_map(space, u)?;
        for i in block {
            for j in block {
                matrix[(*i, *j)] += u[*i] * phi[*j];
            }
        }
    }
    let (norm, norm_method) = if blocks.is_empty() {
        (0.0, NormMethod::ExactSmall)
    } else if d <= crate::linalg::EXACT_SMALL_COMPLEX_MAX {
        (operator_pnorm(&matrix, space.p, PnormMode::ExactSmall)?, NormMethod::ExactSmall)
    } else {
        (operator_pnorm(&matrix, space.p, PnormMode::Estimate)?, NormMethod::Estimate)
    };
    if norm > 1.0 + LP_NORM_SLACK {
        let method = match norm_method {
            NormMethod::ExactSmall => "exact-small",
            NormMethod::Estimate => "estimate",
        };
        return Err(ProjectionError::NormExceedsOne { norm, method });
    }
    Ok(LpPartitionProjection {
        space: *space,
        blocks: blocks.to_vec(),
        vectors: unit_vectors.to_vec(),
        matrix,
        norm,
        norm_method,
    })
}
