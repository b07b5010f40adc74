//! Experiment configuration: one JSON document, complex numbers as `[re, im]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Weights of a convex combination must sum to one within this.
pub const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalysisKind {
    Dichotomy,
    Numrange,
    Resolvent,
    Ritt,
    Stolz,
    Kspectral,
    Halperin,
    DrRate,
    Slow,
    Superpoly,
}

impl AnalysisKind {
    pub const ALL: [AnalysisKind; 10] = [
        Self::Dichotomy,
        Self::Numrange,
        Self::Resolvent,
        Self::Ritt,
        Self::Stolz,
        Self::Kspectral,
        Self::Halperin,
        Self::DrRate,
        Self::Slow,
        Self::Superpoly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Dichotomy => "dichotomy",
            Self::Numrange => "numrange",
            Self::Resolvent => "resolvent",
            Self::Ritt => "ritt",
            Self::Stolz => "stolz",
            Self::Kspectral => "kspectral",
            Self::Halperin => "halperin",
            Self::DrRate => "dr-rate",
            Self::Slow => "slow",
            Self::Superpoly => "superpoly",
        }
    }

    /// File stem for this analysis's outputs.
    pub fn stem(self) -> &'static str {
        match self {
            Self::DrRate => "dr_rate",
            other => other.name(),
        }
    }

    /// Whether the analysis reads the numerical range sample.
    pub fn needs_numerical_range(self) -> bool {
        matches!(self, Self::Numrange | Self::Resolvent | Self::Stolz | Self::Kspectral)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpaceConfig {
    Hilbert { dim: usize },
    Lp { dim: usize, p: f64 },
}

impl SpaceConfig {
    pub fn dim(&self) -> usize {
        match self {
            Self::Hilbert { dim } | Self::Lp { dim, .. } => *dim,
        }
    }

    pub fn is_hilbert(&self) -> bool {
        matches!(self, Self::Hilbert { .. })
    }
}

pub type ComplexPair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSubspaces {
    pub count: usize,
    /// One dimension per subspace; drawn from `1..dim` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubspacesConfig {
    Random { random: RandomSubspaces },
    /// Spanning vectors per subspace, orthonormalized on load.
    Explicit(Vec<Vec<Vec<ComplexPair>>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpProjectionConfig {
    /// Disjoint coordinate blocks.
    pub blocks: Vec<Vec<usize>>,
    /// One vector per block, entries on the block's coordinates in order;
    /// normalized in `l^p`. Seeded random vectors when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<ComplexPair>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomLpProjections {
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LpProjectionsConfig {
    Random { random: RandomLpProjections },
    Explicit(Vec<LpProjectionConfig>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexTerm {
    pub weight: f64,
    /// Projection indices in application order.
    pub product: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrTerm {
    pub weight: f64,
    /// `[k, l]` pairs naming `T_kl = P_k P_l + (I − P_k)(I − P_l)`, in
    /// application order.
    pub product: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OperatorConfig {
    /// `P_{order[last]} ⋯ P_{order[0]}`; all projections in order by default.
    Map {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<Vec<usize>>,
    },
    /// `P₂P₁ + (I − P₂)(I − P₁)` for `pair = [1, 2]`; `[0, 1]` by default.
    Dr {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pair: Option<[usize; 2]>,
    },
    DrGeneralized { terms: Vec<DrTerm> },
    Convex { terms: Vec<ConvexTerm> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Numerical rank threshold; the linear algebra default when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<f64>,
    pub resolvent_window: f64,
    pub stolz_epsilon: f64,
    pub stolz_c_min: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hull_slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kspectral_slack: Option<f64>,
    /// Worst principal-angle cosine accepted by the DR fixed-space match.
    pub fixed_space: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: None,
            resolvent_window: 0.1,
            stolz_epsilon: 0.5,
            stolz_c_min: 1e-3,
            hull_slack: None,
            kspectral_slack: None,
            fixed_space: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SlowConfig {
    Explicit { rates: Vec<f64> },
    /// `r_n = (n + 1)^{−power}` for `n = 0..=n`.
    Power { power: f64, n: usize },
    /// `r_n = ratioⁿ`.
    Geometric { ratio: f64, n: usize },
}

impl Default for SlowConfig {
    fn default() -> Self {
        Self::Power { power: 0.5, n: 200 }
    }
}

impl SlowConfig {
    pub fn rates(&self) -> Vec<f64> {
        match self {
            Self::Explicit { rates } => rates.clone(),
            Self::Power { power, n } => (0..=*n).map(|k| (k as f64 + 1.0).powf(-power)).collect(),
            Self::Geometric { ratio, n } => (0..=*n).map(|k| ratio.powi(k as i32)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuperpolyConfig {
    pub k_max: usize,
    pub window: (usize, usize),
}

impl Default for SuperpolyConfig {
    fn default() -> Self {
        Self {
            k_max: 3,
            window: (10, 100),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
    pub csv: bool,
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: "pdlab-out".into(),
            csv: true,
            svg: false,
        }
    }
}

fn default_iterations() -> usize {
    200
}

fn default_theta_grid() -> usize {
    360
}

fn default_lp_samples() -> usize {
    2000
}

fn default_halperin_samples() -> usize {
    10_000
}

fn default_resolvent_angles() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub space: SpaceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspaces: Option<SubspacesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp_projections: Option<LpProjectionsConfig>,
    pub operator: OperatorConfig,
    pub analyses: Vec<AnalysisKind>,
    /// Power count `N` for gap curves, Ritt, K-spectral and superpoly.
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    /// Rotation angles `m` for the Hilbert numerical range.
    #[serde(default = "default_theta_grid")]
    pub theta_grid: usize,
    /// Uniform angles in `(0, π]` for the hull-distance resolvent bound.
    #[serde(default = "default_resolvent_angles")]
    pub resolvent_angles: usize,
    /// Duality samples for the `l^p` numerical range.
    #[serde(default = "default_lp_samples")]
    pub lp_samples: usize,
    #[serde(default = "default_halperin_samples")]
    pub halperin_samples: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub slow: SlowConfig,
    #[serde(default)]
    pub superpoly: SuperpolyConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::config(if path == "." { "(root)".into() } else { path }, e.inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Read {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    /// Number of projections the config declares (before building them).
    pub fn projection_count(&self) -> usize {
        match (&self.subspaces, &self.lp_projections) {
            (Some(SubspacesConfig::Random { random }), _) => random.count,
            (Some(SubspacesConfig::Explicit(v)), _) => v.len(),
            (None, Some(LpProjectionsConfig::Random { random })) => random.count,
            (None, Some(LpProjectionsConfig::Explicit(v))) => v.len(),
            (None, None) => 0,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let d = self.space.dim();
        if d == 0 {
            return Err(CliError::config("space.dim", "must be at least 1"));
        }
        if let SpaceConfig::Lp { p, .. } = self.space {
            if !(p > 1.0 && p.is_finite()) {
                return Err(CliError::config("space.p", format!("must be a finite number > 1, got {p}")));
            }
        }
        match (&self.space, &self.subspaces, &self.lp_projections) {
            (SpaceConfig::Hilbert { .. }, Some(s), None) => validate_subspaces(s, d)?,
            (SpaceConfig::Hilbert { .. }, _, Some(_)) => {
                return Err(CliError::config("lp_projections", "only valid with space.kind = lp"))
            }
            (SpaceConfig::Hilbert { .. }, None, None) => {
                return Err(CliError::config("subspaces", "required for a hilbert space"))
            }
            (SpaceConfig::Lp { .. }, Some(_), _) => {
                return Err(CliError::config(
                    "subspaces",
                    "only valid with space.kind = hilbert; use lp_projections",
                ))
            }
            (SpaceConfig::Lp { .. }, None, Some(l)) => validate_lp(l, d)?,
            (SpaceConfig::Lp { .. }, None, None) => {
                return Err(CliError::config("lp_projections", "required for an lp space"))
            }
        }
        let count = self.projection_count();
        if count == 0 {
            return Err(CliError::config("subspaces", "at least one projection is required"));
        }
        validate_operator(&self.operator, count)?;
        if self.analyses.is_empty() {
            return Err(CliError::config("analyses", "list at least one analysis"));
        }
        for (i, a) in self.analyses.iter().enumerate() {
            if self.analyses[..i].contains(a) {
                return Err(CliError::config(format!("analyses[{i}]"), format!("`{}` listed twice", a.name())));
            }
            let hilbert_only = matches!(a, AnalysisKind::Kspectral | AnalysisKind::DrRate);
            if hilbert_only && !self.space.is_hilbert() {
                return Err(CliError::config(
                    format!("analyses[{i}]"),
                    format!("`{}` needs space.kind = hilbert", a.name()),
                ));
            }
            if *a == AnalysisKind::DrRate && count < 2 {
                return Err(CliError::config(format!("analyses[{i}]"), "`dr-rate` needs two subspaces"));
            }
        }
        if self.iterations == 0 {
            return Err(CliError::config("iterations", "must be at least 1"));
        }
        if self.theta_grid < 8 {
            return Err(CliError::config("theta_grid", "must be at least 8"));
        }
        if self.resolvent_angles == 0 {
            return Err(CliError::config("resolvent_angles", "must be at least 1"));
        }
        if self.lp_samples < 100 {
            return Err(CliError::config("lp_samples", "must be at least 100"));
        }
        if self.halperin_samples == 0 {
            return Err(CliError::config("halperin_samples", "must be at least 1"));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.resolvent_window", t.resolvent_window),
            ("tolerances.stolz_epsilon", t.stolz_epsilon),
            ("tolerances.stolz_c_min", t.stolz_c_min),
            ("tolerances.fixed_space", t.fixed_space),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::config(name, format!("must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("tolerances.rank", t.rank),
            ("tolerances.hull_slack", t.hull_slack),
            ("tolerances.kspectral_slack", t.kspectral_slack),
        ] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(CliError::config(name, format!("must be nonnegative, got {v}")));
                }
            }
        }
        let sp = &self.superpoly;
        if sp.k_max < 2 {
            return Err(CliError::config("superpoly.k_max", "must be at least 2"));
        }
        if sp.window.0 == 0 || sp.window.0 >= sp.window.1 {
            return Err(CliError::config("superpoly.window", "needs 1 ≤ start < end"));
        }
        if self.analyses.contains(&AnalysisKind::Slow) {
            validate_rates(&self.slow.rates()).map_err(|m| CliError::config("slow", m))?;
        }
        Ok(())
    }
}

fn validate_subspaces(s: &SubspacesConfig, d: usize) -> Result<(), CliError> {
    match s {
        SubspacesConfig::Random { random } => {
            if random.count == 0 {
                return Err(CliError::config("subspaces.random.count", "must be at least 1"));
            }
            if let Some(dims) = &random.dims {
                if dims.len() != random.count {
                    return Err(CliError::config(
                        "subspaces.random.dims",
                        format!("{} entries for count {}", dims.len(), random.count),
                    ));
                }
                if let Some((i, r)) = dims.iter().enumerate().find(|(_, r)| **r > d) {
                    return Err(CliError::config(
                        format!("subspaces.random.dims[{i}]"),
                        format!("{r} exceeds space.dim = {d}"),
                    ));
                }
            }
        }
        SubspacesConfig::Explicit(list) => {
            for (i, vectors) in list.iter().enumerate() {
                for (j, v) in vectors.iter().enumerate() {
                    if v.len() != d {
                        return Err(CliError::config(
                            format!("subspaces[{i}][{j}]"),
                            format!("{} entries, expected space.dim = {d}", v.len()),
                        ));
                    }
                    if v.iter().flatten().any(|x| !x.is_finite()) {
                        return Err(CliError::config(format!("subspaces[{i}][{j}]"), "non-finite entry"));
                    }
                }
            }
        }
    }
    Ok(())
}

fn validate_lp(l: &LpProjectionsConfig, d: usize) -> Result<(), CliError> {
    match l {
        LpProjectionsConfig::Random { random } => {
            if random.count == 0 {
                return Err(CliError::config("lp_projections.random.count", "must be at least 1"));
            }
        }
        LpProjectionsConfig::Explicit(list) => {
            for (i, proj) in list.iter().enumerate() {
                let mut seen = vec![false; d];
                for (b, block) in proj.blocks.iter().enumerate() {
                    let field = format!("lp_projections[{i}].blocks[{b}]");
                    if block.is_empty() {
                        return Err(CliError::config(field, "empty block"));
                    }
                    for &k in block {
                        if k >= d {
                            return Err(CliError::config(field, format!("index {k} out of range for dim {d}")));
                        }
                        if seen[k] {
                            return Err(CliError::config(field, format!("index {k} appears in two blocks")));
                        }
                        seen[k] = true;
                    }
                }
                if let Some(vectors) = &proj.vectors {
                    if vectors.len() != proj.blocks.len() {
                        return Err(CliError::config(
                            format!("lp_projections[{i}].vectors"),
                            format!("{} vectors for {} blocks", vectors.len(), proj.blocks.len()),
                        ));
                    }
                    for (b, v) in vectors.iter().enumerate() {
                        let field = format!("lp_projections[{i}].vectors[{b}]");
                        if v.len() != proj.blocks[b].len() {
                            return Err(CliError::config(field, "length must match its block"));
                        }
                        if v.iter().flatten().any(|x| !x.is_finite()) || v.iter().all(|z| z[0] == 0.0 && z[1] == 0.0) {
                            return Err(CliError::config(field, "needs finite entries, not all zero"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_index(field: String, k: usize, count: usize) -> Result<(), CliError> {
    if k >= count {
        return Err(CliError::config(field, format!("projection index {k} out of range (have {count})")));
    }
    Ok(())
}

fn check_weights<'a>(weights: impl Iterator<Item = &'a f64>) -> Result<(), CliError> {
    let mut sum = 0.0;
    for (i, &w) in weights.enumerate() {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(CliError::config(
                format!("operator.terms[{i}].weight"),
                format!("must be nonnegative, got {w}"),
            ));
        }
        sum += w;
    }
    if (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(CliError::config("operator.terms", format!("weights sum to {sum}, expected 1")));
    }
    Ok(())
}

fn validate_operator(op: &OperatorConfig, count: usize) -> Result<(), CliError> {
    match op {
        OperatorConfig::Map { order } => {
            if let Some(order) = order {
                if order.is_empty() {
                    return Err(CliError::config("operator.order", "must not be empty"));
                }
                for (i, &k) in order.iter().enumerate() {
                    check_index(format!("operator.order[{i}]"), k, count)?;
                }
            }
        }
        OperatorConfig::Dr { pair } => {
            let [a, b] = pair.unwrap_or([0, 1]);
            if pair.is_none() && count < 2 {
                return Err(CliError::config("operator", "dr needs two projections"));
            }
            check_index("operator.pair[0]".into(), a, count)?;
            check_index("operator.pair[1]".into(), b, count)?;
        }
        OperatorConfig::DrGeneralized { terms } => {
            if terms.is_empty() {
                return Err(CliError::config("operator.terms", "must not be empty"));
            }
            check_weights(terms.iter().map(|t| &t.weight))?;
            for (i, t) in terms.iter().enumerate() {
                if t.product.is_empty() {
                    return Err(CliError::config(format!("operator.terms[{i}].product"), "must not be empty"));
                }
                for (j, [k, l]) in t.product.iter().enumerate() {
                    check_index(format!("operator.terms[{i}].product[{j}][0]"), *k, count)?;
                    check_index(format!("operator.terms[{i}].product[{j}][1]"), *l, count)?;
                }
            }
        }
        OperatorConfig::Convex { terms } => {
            if terms.is_empty() {
                return Err(CliError::config("operator.terms", "must not be empty"));
            }
            check_weights(terms.iter().map(|t| &t.weight))?;
            for (i, t) in terms.iter().enumerate() {
                if t.product.is_empty() {
                    return Err(CliError::config(format!("operator.terms[{i}].product"), "must not be empty"));
                }
                for (j, &k) in t.product.iter().enumerate() {
                    check_index(format!("operator.terms[{i}].product[{j}]"), k, count)?;
                }
            }
        }
    }
    Ok(())
}

/// Rates must be nonempty, in `(0, 1]` and non-increasing.
pub fn validate_rates(rates: &[f64]) -> Result<(), String> {
    if rates.is_empty() {
        return Err("no rates given".into());
    }
    if let Some((n, r)) = rates.iter().enumerate().find(|(_, r)| !(**r > 0.0 && **r <= 1.0)) {
        return Err(format!("rate r_{n} = {r} is outside (0, 1]"));
    }
    if let Some(n) = (1..rates.len()).find(|&n| rates[n] > rates[n - 1]) {
        return Err(format!("rates increase at n = {n} ({} > {})", rates[n], rates[n - 1]));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> serde_json::Value {
        serde_json::json!({
            "seed": 1,
            "space": {"kind": "hilbert", "dim": 2},
            "subspaces": [[[[1, 0], [0, 0]]], [[[0.5, 0], [0.75f64.sqrt(), 0]]]],
            "operator": {"kind": "dr"},
            "analyses": ["dr-rate"]
        })
    }

    fn parse(v: &serde_json::Value) -> Result<ExperimentConfig, CliError> {
        ExperimentConfig::from_json(&v.to_string())
    }

    fn field_of(err: CliError) -> String {
        match err {
            CliError::Config { field, .. } => field,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = parse(&base()).unwrap();
        assert_eq!(cfg.iterations, 200);
        assert_eq!(cfg.theta_grid, 360);
        assert_eq!(cfg.analyses, vec![AnalysisKind::DrRate]);
        assert!(cfg.output.csv && !cfg.output.svg);
    }

    #[test]
    fn unknown_analysis_names_its_position() {
        let mut v = base();
        v["analyses"] = serde_json::json!(["ritt", "spectra"]);
        assert_eq!(field_of(parse(&v).unwrap_err()), "analyses[1]");
    }

    #[test]
    fn weights_must_sum_to_one() {
        let mut v = base();
        v["operator"] = serde_json::json!({"kind": "convex", "terms": [
            {"weight": 0.4, "product": [0]}, {"weight": 0.5, "product": [1, 0]}]});
        let err = parse(&v).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("operator.terms"), "{err}");
    }

    #[test]
    fn vector_length_must_match_dim() {
        let mut v = base();
        v["subspaces"] = serde_json::json!([[[[1, 0], [0, 0], [0, 0]]]]);
        assert_eq!(field_of(parse(&v).unwrap_err()), "subspaces[0][0]");
    }

    #[test]
    fn lp_analyses_and_fields_are_checked() {
        let mut v = base();
        v["space"] = serde_json::json!({"kind": "lp", "dim": 2, "p": 3.0});
        assert_eq!(field_of(parse(&v).unwrap_err()), "subspaces");
        v.as_object_mut().unwrap().remove("subspaces");
        v["lp_projections"] = serde_json::json!([{"blocks": [[0, 1]]}, {"blocks": [[0], [1]]}]);
        assert_eq!(field_of(parse(&v).unwrap_err()), "analyses[0]");
        v["analyses"] = serde_json::json!(["halperin"]);
        assert!(parse(&v).is_ok());
    }

    #[test]
    fn rate_validation() {
        assert!(validate_rates(&[1.0, 0.5, 0.5]).is_ok());
        assert!(validate_rates(&[]).is_err());
        assert!(validate_rates(&[0.5, 0.6]).is_err());
        assert!(validate_rates(&[1.5]).is_err());
        assert!(validate_rates(&[0.0]).is_err());
    }

    #[test]
    fn slow_law_rates() {
        let r = SlowConfig::Power { power: 0.5, n: 3 }.rates();
        assert_eq!(r.len(), 4);
        assert!((r[3] - 0.5).abs() < 1e-15);
        let g = SlowConfig::Geometric { ratio: 0.5, n: 8 }.rates();
        assert_eq!(g[8], 2f64.powi(-8));
    }
}
