//! Materializes subspaces, projections and the operator from a config.

use num_complex::Complex64;
use pdlab::linalg::{lp_norm, CMatrix};
use pdlab::operators::{convex_combination, dr_factor, dr_operator, map_operator, Factor, OperatorSpec, ProductTerm};
use pdlab::projections::{lp_partition_projection, orth_projection, ProjectionOp};
use pdlab::random::{random_vector, seeded_rng, Rng};
use pdlab::spaces::{random_subspace, LpSpace, Subspace};
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::config::{
    ComplexPair, ExperimentConfig, LpProjectionConfig, LpProjectionsConfig, OperatorConfig, SpaceConfig,
    SubspacesConfig,
};
use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct Instance {
    pub space: LpSpace,
    /// Hilbert mode only.
    pub subspaces: Vec<Subspace>,
    pub projections: Vec<ProjectionOp>,
    pub operator: OperatorSpec,
    /// Projection indices in the order the Halperin product applies them.
    pub product_order: Vec<usize>,
}

impl Instance {
    pub fn is_hilbert(&self) -> bool {
        self.space.p == 2.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.operator.matrix()
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    /// The subspace pair a Douglas-Rachford analysis uses.
    pub fn dr_pair(&self, cfg: &ExperimentConfig) -> Option<(&Subspace, &Subspace)> {
        let [a, b] = match cfg.operator {
            OperatorConfig::Dr { pair } => pair.unwrap_or([0, 1]),
            _ => [0, 1],
        };
        Some((self.subspaces.get(a)?, self.subspaces.get(b)?))
    }

    pub fn product_matrices(&self) -> Vec<CMatrix> {
        self.product_order
            .iter()
            .map(|&k| self.projections[k].matrix().clone())
            .collect()
    }
}

fn complex(v: &[ComplexPair]) -> Vec<Complex64> {
    v.iter().map(|z| Complex64::new(z[0], z[1])).collect()
}

fn build_subspaces(cfg: &SubspacesConfig, d: usize, rng: &mut Rng) -> Result<Vec<Subspace>, CliError> {
    match cfg {
        SubspacesConfig::Random { random } => Ok((0..random.count)
            .map(|k| {
                let r = match &random.dims {
                    Some(dims) => dims[k],
                    None if d >= 2 => rng.random_range(1..d),
                    None => 1,
                };
                random_subspace(rng, d, r)
            })
            .collect()),
        SubspacesConfig::Explicit(list) => list
            .iter()
            .enumerate()
            .map(|(i, vectors)| {
                let vs: Vec<Vec<Complex64>> = vectors.iter().map(|v| complex(v)).collect();
                Subspace::from_spanning(d, &vs).map_err(|e| CliError::config(format!("subspaces[{i}]"), e.to_string()))
            })
            .collect(),
    }
}

fn random_partition(d: usize, rng: &mut Rng) -> LpProjectionConfig {
    let mut idx: Vec<usize> = (0..d).collect();
    idx.shuffle(rng);
    let used = rng.random_range(1..=d);
    let mut rest = &idx[..used];
    let mut blocks = Vec::new();
    while !rest.is_empty() {
        let k = rng.random_range(1..=rest.len());
        blocks.push(rest[..k].to_vec());
        rest = &rest[k..];
    }
    LpProjectionConfig { blocks, vectors: None }
}

fn build_lp_projection(
    space: &LpSpace,
    cfg: &LpProjectionConfig,
    rng: &mut Rng,
    field: &str,
) -> Result<ProjectionOp, CliError> {
    let d = space.dim;
    let mut units = Vec::with_capacity(cfg.blocks.len());
    for (b, block) in cfg.blocks.iter().enumerate() {
        let local = match &cfg.vectors {
            Some(v) => complex(&v[b]),
            None => loop {
                let v = random_vector(rng, block.len());
                if lp_norm(&v, space.p) > 0.0 {
                    break v;
                }
            },
        };
        let n = lp_norm(&local, space.p);
        let mut u = vec![Complex64::new(0.0, 0.0); d];
        for (i, &k) in block.iter().enumerate() {
            u[k] = local[i] / n;
        }
        units.push(u);
    }
    let lp = lp_partition_projection(space, &cfg.blocks, &units).map_err(|e| CliError::config(field, e.to_string()))?;
    Ok(lp.projection())
}

fn build_operator(op: &OperatorConfig, projections: &[ProjectionOp]) -> Result<(OperatorSpec, Vec<usize>), String> {
    let all: Vec<usize> = (0..projections.len()).collect();
    match op {
        OperatorConfig::Map { order } => {
            let order = order.clone().unwrap_or(all);
            let ps: Vec<ProjectionOp> = order.iter().map(|&k| projections[k].clone()).collect();
            Ok((map_operator(&ps).map_err(|e| e.to_string())?, order))
        }
        OperatorConfig::Dr { pair } => {
            let [a, b] = pair.unwrap_or([0, 1]);
            let spec = dr_operator(&projections[a], &projections[b]).map_err(|e| e.to_string())?;
            Ok((spec, vec![a, b]))
        }
        OperatorConfig::Convex { terms } => {
            let factors: Vec<Factor> = projections
                .iter()
                .enumerate()
                .map(|(k, p)| Factor {
                    name: format!("P{}", k + 1),
                    matrix: p.matrix().clone(),
                })
                .collect();
            let terms = terms
                .iter()
                .map(|t| ProductTerm {
                    weight: t.weight,
                    factors: t.product.iter().map(|k| format!("P{}", k + 1)).collect(),
                })
                .collect();
            let spec = convex_combination("convex", factors, terms).map_err(|e| e.to_string())?;
            Ok((spec, all))
        }
        OperatorConfig::DrGeneralized { terms } => {
            let mut pairs: Vec<[usize; 2]> = terms.iter().flat_map(|t| t.product.iter().copied()).collect();
            pairs.sort();
            pairs.dedup();
            let factors = pairs
                .iter()
                .map(|&[k, l]| dr_factor(k + 1, l + 1, &projections[k], &projections[l]))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            let terms = terms
                .iter()
                .map(|t| ProductTerm {
                    weight: t.weight,
                    factors: t.product.iter().map(|[k, l]| format!("T_{}_{}", k + 1, l + 1)).collect(),
                })
                .collect();
            let spec = convex_combination("dr-generalized", factors, terms).map_err(|e| e.to_string())?;
            Ok((spec, all))
        }
    }
}

/// Builds the instance; all randomness comes from `seed`.
pub fn build_instance(cfg: &ExperimentConfig, seed: u64) -> Result<Instance, CliError> {
    let mut rng = seeded_rng(seed);
    let d = cfg.space.dim();
    let (space, subspaces, projections) = match &cfg.space {
        SpaceConfig::Hilbert { .. } => {
            let space = LpSpace::hilbert(d).map_err(|e| CliError::config("space", e.to_string()))?;
            let sub_cfg = cfg
                .subspaces
                .as_ref()
                .ok_or_else(|| CliError::config("subspaces", "required for a hilbert space"))?;
            let subspaces = build_subspaces(sub_cfg, d, &mut rng)?;
            let projections = subspaces.iter().map(orth_projection).collect();
            (space, subspaces, projections)
        }
        SpaceConfig::Lp { p, .. } => {
            let space = LpSpace::new(d, *p).map_err(|e| CliError::config("space", e.to_string()))?;
            let lp_cfg = cfg
                .lp_projections
                .as_ref()
                .ok_or_else(|| CliError::config("lp_projections", "required for an lp space"))?;
            let list: Vec<LpProjectionConfig> = match lp_cfg {
                LpProjectionsConfig::Random { random } => (0..random.count).map(|_| random_partition(d, &mut rng)).collect(),
                LpProjectionsConfig::Explicit(list) => list.clone(),
            };
            let projections = list
                .iter()
                .enumerate()
                .map(|(i, c)| build_lp_projection(&space, c, &mut rng, &format!("lp_projections[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            (space, Vec::new(), projections)
        }
    };
    let (operator, product_order) =
        build_operator(&cfg.operator, &projections).map_err(|m| CliError::config("operator", m))?;
    Ok(Instance {
        space,
        subspaces,
        projections,
        operator,
        product_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(json: serde_json::Value) -> ExperimentConfig {
        ExperimentConfig::from_json(&json.to_string()).unwrap()
    }

    #[test]
    fn dr_lines_operator() {
        let c = cfg(serde_json::json!({
            "space": {"kind": "hilbert", "dim": 2},
            "subspaces": [[[[1, 0], [0, 0]]], [[[0.5, 0], [0.75f64.sqrt(), 0]]]],
            "operator": {"kind": "dr"},
            "analyses": ["dr-rate"]
        }));
        let inst = build_instance(&c, 0).unwrap();
        // T = ½(I + R(2θ)) with θ = π/3.
        let t = inst.matrix();
        assert!((t[(0, 0)].re - 0.25).abs() < 1e-12);
        assert!((t[(1, 0)].re - 0.75f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((t[(0, 1)].re + 0.75f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn random_instances_are_seeded() {
        let c = cfg(serde_json::json!({
            "space": {"kind": "hilbert", "dim": 5},
            "subspaces": {"random": {"count": 3}},
            "operator": {"kind": "map"},
            "analyses": ["ritt"]
        }));
        let a = build_instance(&c, 9).unwrap();
        let b = build_instance(&c, 9).unwrap();
        let other = build_instance(&c, 10).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert_ne!(a.matrix(), other.matrix());
        assert_eq!(a.product_order, vec![0, 1, 2]);
    }

    #[test]
    fn convex_and_generalized_dr() {
        let c = cfg(serde_json::json!({
            "space": {"kind": "hilbert", "dim": 3},
            "subspaces": {"random": {"count": 2, "dims": [1, 2]}},
            "operator": {"kind": "dr-generalized", "terms": [
                {"weight": 0.5, "product": [[0, 1]]}, {"weight": 0.5, "product": [[1, 0]]}]},
            "analyses": ["ritt"]
        }));
        let inst = build_instance(&c, 3).unwrap();
        let expected = &inst.operator.factors[0].matrix.scale_real(0.5) + &inst.operator.factors[1].matrix.scale_real(0.5);
        assert!((inst.matrix() - &expected).max_abs() < 1e-14);
    }

    #[test]
    fn lp_random_projections() {
        let c = cfg(serde_json::json!({
            "space": {"kind": "lp", "dim": 4, "p": 3.0},
            "lp_projections": {"random": {"count": 2}},
            "operator": {"kind": "map"},
            "analyses": ["halperin"]
        }));
        let inst = build_instance(&c, 1).unwrap();
        assert!(!inst.is_hilbert());
        assert_eq!(inst.projections.len(), 2);
        assert!(inst.subspaces.is_empty());
    }
}
