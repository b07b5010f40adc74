//! Projection-method operators as symbolic recipes with a materialized matrix,
//! plus orbit and power-gap sweeps.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    lp_norm, norm2, operator_pnorm_with, vec_norm, vec_sub, CMatrix, EstimateOptions, LinalgError,
    PnormMode,
};
use crate::projections::{is_type_u, shift_norm, ProjectionOp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("at least one factor is required")]
    NoFactors,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("weights must be nonnegative and sum to 1 (sum {sum}, min {min})")]
    BadWeights { sum: f64, min: f64 },
    #[error("unknown factor name '{0}'")]
    UnknownFactor(String),
    #[error("duplicate factor name '{0}'")]
    DuplicateFactor(String),
    #[error("a product term has no factors")]
    EmptyProduct,
    #[error("iteration count must be at least 1")]
    NoIterations,
    #[error("{what}: {value:.3e} exceeds {bound:.3e}")]
    InvariantViolated {
        what: &'static str,
        value: f64,
        bound: f64,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub name: String,
    pub matrix: CMatrix,
}

/// `weight × (product of factors)`, factors listed in application order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductTerm {
    pub weight: f64,
    pub factors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub label: String,
    pub factors: Vec<Factor>,
    pub terms: Vec<ProductTerm>,
    matrix: CMatrix,
}

impl OperatorSpec {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Re-evaluates the symbolic expression.
    pub fn evaluate(&self) -> Result<CMatrix, OperatorError> {
        evaluate(&self.factors, &self.terms, self.dim())
    }

    /// A bare matrix as a one-factor operator.
    pub fn from_matrix(name: &str, matrix: CMatrix) -> Result<Self, OperatorError> {
        matrix.ensure_square()?;
        matrix.ensure_finite()?;
        convex_combination(
            name,
            vec![Factor {
                name: name.to_string(),
                matrix,
            }],
            vec![ProductTerm {
                weight: 1.0,
                factors: vec![name.to_string()],
            }],
        )
    }

    /// Which named factors appear in some product term.
    pub fn factors_used(&self) -> Vec<String> {
        let mut used: Vec<String> = self.terms.iter().flat_map(|t| t.factors.iter().cloned()).collect();
        used.sort();
        used.dedup();
        used
    }
}

fn evaluate(factors: &[Factor], terms: &[ProductTerm], dim: usize) -> Result<CMatrix, OperatorError> {
    let table: BTreeMap<&str, &CMatrix> = factors.iter().map(|f| (f.name.as_str(), &f.matrix)).collect();
    let mut total = CMatrix::zeros(dim, dim);
    for term in terms {
        if term.factors.is_empty() {
            return Err(OperatorError::EmptyProduct);
        }
        let mut prod = CMatrix::identity(dim);
        for name in &term.factors {
            let f = table
                .get(name.as_str())
                .ok_or_else(|| OperatorError::UnknownFactor(name.clone()))?;
            prod = f.try_matmul(&prod)?;
        }
        total = total.try_add(&prod.scale_real(term.weight))?;
    }
    Ok(total)
}

/// `Σ w_i Π(term_i)` over a table of named factors.
pub fn convex_combination(
    label: &str,
    factors: Vec<Factor>,
    terms: Vec<ProductTerm>,
) -> Result<OperatorSpec, OperatorError> {
    let first = factors.first().ok_or(OperatorError::NoFactors)?;
    let dim = first.matrix.ensure_square()?;
    let mut names: Vec<&str> = Vec::new();
    for f in &factors {
        let n = f.matrix.ensure_square()?;
        if n != dim {
            return Err(OperatorError::DimensionMismatch { expected: dim, got: n });
        }
        if names.contains(&f.name.as_str()) {
            return Err(OperatorError::DuplicateFactor(f.name.clone()));
        }
        names.push(&f.name);
    }
    if terms.is_empty() {
        return Err(OperatorError::BadWeights { sum: 0.0, min: 0.0 });
    }
    let sum: f64 = terms.iter().map(|t| t.weight).sum();
    let min = terms.iter().map(|t| t.weight).fold(f64::INFINITY, f64::min);
    if !(min >= 0.0) || !((sum - 1.0).abs() <= 1e-12) {
        return Err(OperatorError::BadWeights { sum, min });
    }
    let matrix = evaluate(&factors, &terms, dim)?;
    Ok(OperatorSpec {
        label: label.to_string(),
        factors,
        terms,
        matrix,
    })
}

fn check_dims(ps: &[&ProjectionOp]) -> Result<usize, OperatorError> {
    let first = ps.first().ok_or(OperatorError::NoFactors)?;
    let dim = first.dim();
    for p in ps {
        if p.dim() != dim {
            return Err(OperatorError::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
    }
    Ok(dim)
}

/// `T = P_N ⋯ P_1`, with `P_1` applied first. Factors are named `P1, P2, …`.
pub fn map_operator(projections: &[ProjectionOp]) -> Result<OperatorSpec, OperatorError> {
    let refs: Vec<&ProjectionOp> = projections.iter().collect();
    check_dims(&refs)?;
    let factors: Vec<Factor> = projections
        .iter()
        .enumerate()
        .map(|(k, p)| Factor {
            name: format!("P{}", k + 1),
            matrix: p.matrix().clone(),
        })
        .collect();
    let names = factors.iter().map(|f| f.name.clone()).collect();
    convex_combination(
        "map",
        factors,
        vec![ProductTerm {
            weight: 1.0,
            factors: names,
        }],
    )
}

/// The matrix `P_k P_l + (I − P_k)(I − P_l)`, checked against `(I + Q_k Q_l)/2`.
pub fn dr_matrix(pk: &ProjectionOp, pl: &ProjectionOp) -> Result<CMatrix, OperatorError> {
    let d = check_dims(&[pk, pl])?;
    let id = CMatrix::identity(d);
    let a = pk.matrix();
    let b = pl.matrix();
    let t = a.try_matmul(b)?.try_add(&id.try_sub(a)?.try_matmul(&id.try_sub(b)?)?)?;
    let qk = a.scale_real(2.0).try_sub(&id)?;
    let ql = b.scale_real(2.0).try_sub(&id)?;
    let reflected = id.try_add(&qk.try_matmul(&ql)?)?.scale_real(0.5);
    let defect = t.try_sub(&reflected)?.max_abs();
    let bound = 1e-12 * (a.max_abs() * b.max_abs()).max(1.0) * d as f64;
    if defect > bound {
        return Err(OperatorError::InvariantViolated {
            what: "reflection form of the Douglas-Rachford operator",
            value: defect,
            bound,
        });
    }
    Ok(t)
}

/// `T_kl = P_k P_l + (I − P_k)(I − P_l)`. For type-U inputs the bound
/// `‖T_kl − I/2‖ ≤ 1/2` is verified (to `1e-8`).
pub fn dr_generalized(pk: &ProjectionOp, pl: &ProjectionOp) -> Result<OperatorSpec, OperatorError> {
    let t = dr_matrix(pk, pl)?;
    if is_type_u(pk, 1e-10) && is_type_u(pl, 1e-10) {
        let v = shift_norm(&t, 0.5);
        if v > 0.5 + 1e-8 {
            return Err(OperatorError::InvariantViolated {
                what: "type-U bound on the Douglas-Rachford operator",
                value: v,
                bound: 0.5 + 1e-8,
            });
        }
    }
    let mut spec = OperatorSpec::from_matrix("T_k_l", t)?;
    spec.label = "dr-generalized".to_string();
    Ok(spec)
}

/// `T = P₂P₁ + (I − P₂)(I − P₁)`.
pub fn dr_operator(p1: &ProjectionOp, p2: &ProjectionOp) -> Result<OperatorSpec, OperatorError> {
    let t = dr_matrix(p2, p1)?;
    let mut spec = OperatorSpec::from_matrix("T_2_1", t)?;
    spec.label = "dr".to_string();
    Ok(spec)
}

/// Named Douglas-Rachford factor `T_k_l` for use in [`convex_combination`].
pub fn dr_factor(k: usize, l: usize, pk: &ProjectionOp, pl: &ProjectionOp) -> Result<Factor, OperatorError> {
    Ok(Factor {
        name: format!("T_{k}_{l}"),
        matrix: dr_matrix(pk, pl)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "norm", rename_all = "kebab-case")]
pub enum NormUsed {
    Euclidean,
    /// Exact vector `l^p` norm.
    Lp { p: f64 },
    /// Operator `l^p` norm from the dual-ascent estimator (a lower bound).
    LpEstimate { p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    /// `values[n]` for `n = 0..=N`.
    pub values: Vec<f64>,
    pub norm: NormUsed,
}

impl OrbitTrace {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_operator(t: &CMatrix, p_t: Option<&CMatrix>, n: usize) -> Result<usize, OperatorError> {
    let d = t.ensure_square()?;
    if n == 0 {
        return Err(OperatorError::NoIterations);
    }
    if let Some(p) = p_t {
        let pd = p.ensure_square()?;
        if pd != d {
            return Err(OperatorError::DimensionMismatch { expected: d, got: pd });
        }
    }
    Ok(d)
}

fn orbit_with(
    t: &CMatrix,
    x: &[Complex64],
    p_t: Option<&CMatrix>,
    n: usize,
    norm: impl Fn(&[Complex64]) -> f64,
) -> Result<Vec<f64>, OperatorError> {
    let d = check_operator(t, p_t, n)?;
    if x.len() != d {
        return Err(OperatorError::DimensionMismatch { expected: d, got: x.len() });
    }
    let limit = match p_t {
        Some(p) => p.mul_vec(x),
        None => vec![Complex64::new(0.0, 0.0); d],
    };
    let mut values = Vec::with_capacity(n + 1);
    let mut y = x.to_vec();
    values.push(norm(&vec_sub(&y, &limit)));
    for _ in 0..n {
        y = t.mul_vec(&y);
        values.push(norm(&vec_sub(&y, &limit)));
    }
    Ok(values)
}

/// `‖Tⁿx − P_T x‖₂` for `n = 0..=N`, by repeated matrix-vector products.
/// `p_t = None` stands for the zero projection.
pub fn orbit(t: &CMatrix, x: &[Complex64], p_t: Option<&CMatrix>, n: usize) -> Result<OrbitTrace, OperatorError> {
    Ok(OrbitTrace {
        values: orbit_with(t, x, p_t, n, vec_norm)?,
        norm: NormUsed::Euclidean,
    })
}

/// As [`orbit`], measured in the `l^p` norm.
pub fn orbit_lp(
    t: &CMatrix,
    x: &[Complex64],
    p_t: Option<&CMatrix>,
    n: usize,
    p: f64,
) -> Result<OrbitTrace, OperatorError> {
    Ok(OrbitTrace {
        values: orbit_with(t, x, p_t, n, |v| lp_norm(v, p))?,
        norm: NormUsed::Lp { p },
    })
}

/// Sequential powers `T⁰, T¹, …, T^N` (every intermediate index is kept).
pub fn powers(t: &CMatrix, n: usize) -> Result<Vec<CMatrix>, OperatorError> {
    let d = t.ensure_square()?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(CMatrix::identity(d));
    for k in 0..n {
        let next = t.try_matmul(&out[k])?;
        out.push(next);
    }
    Ok(out)
}

fn gap_with(
    t: &CMatrix,
    p_t: Option<&CMatrix>,
    n: usize,
    mut norm: impl FnMut(&CMatrix) -> Result<f64, OperatorError>,
) -> Result<Vec<f64>, OperatorError> {
    let d = check_operator(t, p_t, n)?;
    let limit = p_t.cloned().unwrap_or_else(|| CMatrix::zeros(d, d));
    let mut values = Vec::with_capacity(n + 1);
    let mut power = CMatrix::identity(d);
    values.push(norm(&power.try_sub(&limit)?)?);
    for _ in 0..n {
        power = t.try_matmul(&power)?;
        values.push(norm(&power.try_sub(&limit)?)?);
    }
    Ok(values)
}

/// `‖Tⁿ − P_T‖₂` for `n = 0..=N`.
pub fn power_norm_gap(t: &CMatrix, p_t: Option<&CMatrix>, n: usize) -> Result<OrbitTrace, OperatorError> {
    Ok(OrbitTrace {
        values: gap_with(t, p_t, n, |m| Ok(norm2(m)))?,
        norm: NormUsed::Euclidean,
    })
}

/// `‖Tⁿ − P_T‖_{p→p}` from the estimator; each value is a lower bound.
pub fn power_norm_gap_lp(
    t: &CMatrix,
    p_t: Option<&CMatrix>,
    n: usize,
    p: f64,
    opts: &EstimateOptions,
) -> Result<OrbitTrace, OperatorError> {
    Ok(OrbitTrace {
        values: gap_with(t, p_t, n, |m| Ok(operator_pnorm_with(m, p, PnormMode::Estimate, opts)?))?,
        norm: NormUsed::LpEstimate { p },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_vec;
    use crate::projections::orth_projection;
    use crate::spaces::Subspace;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn line(theta: f64) -> ProjectionOp {
        orth_projection(&Subspace::from_spanning(2, &[real_vec(&[theta.cos(), theta.sin()])]).unwrap())
    }

    #[test]
    fn map_examples() {
        let p = line(0.3);
        let t = map_operator(std::slice::from_ref(&p)).unwrap();
        assert!((t.matrix() - p.matrix()).max_abs() < 1e-15);

        let t = map_operator(&[line(0.0), line(FRAC_PI_3)]).unwrap();
        let want = CMatrix::from_real_rows(&[&[0.25, 0.0], &[3f64.sqrt() / 4.0, 0.0]]);
        assert!((t.matrix() - &want).max_abs() < 1e-15);
        assert_eq!(t.factors_used(), vec!["P1".to_string(), "P2".to_string()]);

        let t = map_operator(&[line(0.0), line(FRAC_PI_2)]).unwrap();
        assert!(t.matrix().max_abs() < 1e-16);
    }

    #[test]
    fn dr_examples() {
        let p = line(0.7);
        let t = dr_operator(&p, &p).unwrap();
        assert!((t.matrix() - &CMatrix::identity(2)).max_abs() < 1e-15);

        let theta = 0.4;
        let t = dr_operator(&line(0.0), &line(theta)).unwrap();
        let (c, s) = ((2.0 * theta).cos(), (2.0 * theta).sin());
        let want = CMatrix::from_real_rows(&[&[0.5 + 0.5 * c, -0.5 * s], &[0.5 * s, 0.5 + 0.5 * c]]);
        assert!((t.matrix() - &want).max_abs() < 1e-15);

        let t = dr_operator(&orth_projection(&Subspace::full(2)), &orth_projection(&Subspace::zero(2))).unwrap();
        assert!(t.matrix().max_abs() < 1e-16);
    }

    #[test]
    fn convex_examples() {
        let p = line(0.2);
        let q = line(1.1);
        let t12 = dr_factor(1, 2, &p, &q).unwrap();
        let t21 = dr_factor(2, 1, &q, &p).unwrap();
        let spec = convex_combination(
            "convex",
            vec![t12, t21],
            vec![
                ProductTerm { weight: 0.5, factors: vec!["T_1_2".into()] },
                ProductTerm { weight: 0.5, factors: vec!["T_2_1".into()] },
            ],
        )
        .unwrap();
        assert!(shift_norm(spec.matrix(), 0.5) <= 0.5 + 1e-8);

        let a = CMatrix::diag_real(&[1.0, 0.0, 1.0]);
        let b = CMatrix::diag_real(&[1.0, 1.0, 0.0]);
        let spec = convex_combination(
            "convex",
            vec![Factor { name: "A".into(), matrix: a }, Factor { name: "B".into(), matrix: b }],
            vec![
                ProductTerm { weight: 0.3, factors: vec!["A".into()] },
                ProductTerm { weight: 0.7, factors: vec!["A".into(), "B".into()] },
            ],
        )
        .unwrap();
        let want = CMatrix::diag_real(&[1.0, 0.0, 0.3]);
        assert!((spec.matrix() - &want).max_abs() < 1e-15);

        let bad = convex_combination(
            "convex",
            vec![Factor { name: "A".into(), matrix: CMatrix::identity(2) }],
            vec![ProductTerm { weight: 0.9, factors: vec!["A".into()] }],
        );
        assert!(matches!(bad, Err(OperatorError::BadWeights { .. })));
    }

    #[test]
    fn orbit_examples() {
        let x = real_vec(&[3.0, 4.0]);
        let o = orbit(&CMatrix::zeros(2, 2), &x, None, 3).unwrap();
        assert_eq!(o.values, vec![5.0, 0.0, 0.0, 0.0]);
        let id = CMatrix::identity(2);
        let o = orbit(&id, &x, Some(&id), 3).unwrap();
        assert!(o.values.iter().all(|v| *v == 0.0));

        let t = dr_operator(&line(0.0), &line(FRAC_PI_3)).unwrap();
        let o = orbit(t.matrix(), &real_vec(&[1.0, 0.0]), None, 20).unwrap();
        for (n, v) in o.values.iter().enumerate() {
            assert!((v - 0.5f64.powi(n as i32)).abs() < 1e-14);
        }
    }

    #[test]
    fn gap_examples() {
        let p = line(0.4);
        let g = power_norm_gap(p.matrix(), Some(p.matrix()), 5).unwrap();
        assert!(g.values[1..].iter().all(|v| *v < 1e-15));

        let t = dr_operator(&line(0.0), &line(FRAC_PI_3)).unwrap();
        let g = power_norm_gap(t.matrix(), None, 30).unwrap();
        for (n, v) in g.values.iter().enumerate() {
            assert!((v - 0.5f64.powi(n as i32)).abs() < 1e-12);
        }

        let t = map_operator(&[line(0.0), line(FRAC_PI_4)]).unwrap();
        let g = power_norm_gap(t.matrix(), None, 40).unwrap();
        assert!(g.values.windows(2).skip(1).all(|w| w[1] < w[0]));
        assert!((g.values[40] / g.values[39] - 0.5).abs() < 1e-6);
        assert_eq!(g.len(), 41);
    }
}
