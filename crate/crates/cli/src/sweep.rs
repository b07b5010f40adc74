//! `pdlab sweep`: one parameter over a range, one CSV row of headline
//! scalars per value.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use pdlab::lab::{dichotomy_report, halperin_inequality_check, HalperinMode};
use pdlab::spaces::friedrichs_number;
use pdlab::spectral::{default_theta_grid, densify, resolvent_profile, zn_beta};
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{derived_seed, numerical_range, AnalysisResult};
use crate::config::{
    AnalysisKind, ExperimentConfig, LpProjectionsConfig, SpaceConfig, SubspacesConfig,
};
use crate::error::CliError;
use crate::instance::Instance;
use crate::output::{ensure_dir, write_file, Cell, Table};
use crate::run::{execute, failed_names, with_pool, TOOL, VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    /// Angle between two lines spanned in the first two coordinates.
    #[value(alias = "θ")]
    Theta,
    Dim,
    P,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::Theta => "theta",
            Self::Dim => "dim",
            Self::P => "p",
        }
    }
}

/// Evenly spaced values; a range that does not increase is an error.
pub fn sweep_values(param: SweepParam, from: f64, to: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    if !from.is_finite() || !to.is_finite() {
        return Err(CliError::Usage("--from and --to must be finite".into()));
    }
    if steps > 1 && to <= from {
        return Err(CliError::Usage(format!(
            "non-monotone range: --from {from} must be below --to {to}"
        )));
    }
    let mut values: Vec<f64> = if steps == 1 {
        vec![from]
    } else {
        (0..steps)
            .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    if param == SweepParam::Dim {
        values.iter_mut().for_each(|v| *v = v.round());
        if values[0] < 1.0 {
            return Err(CliError::Usage("dim values must be at least 1".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Usage(
                "non-monotone range: rounded dim values repeat; use fewer steps".into(),
            ));
        }
    }
    Ok(values)
}

/// The base config with the swept parameter set to `value`.
pub fn apply(base: &ExperimentConfig, param: SweepParam, value: f64) -> Result<ExperimentConfig, CliError> {
    let mut cfg = base.clone();
    match param {
        SweepParam::Theta => {
            let d = match cfg.space {
                SpaceConfig::Hilbert { dim } if dim >= 2 => dim,
                _ => return Err(CliError::config("space", "theta sweep needs a hilbert space of dim >= 2")),
            };
            let mut e1 = vec![[0.0, 0.0]; d];
            e1[0] = [1.0, 0.0];
            let mut line = vec![[0.0, 0.0]; d];
            line[0] = [value.cos(), 0.0];
            line[1] = [value.sin(), 0.0];
            cfg.subspaces = Some(SubspacesConfig::Explicit(vec![vec![e1], vec![line]]));
        }
        SweepParam::Dim => {
            let d = value as usize;
            if matches!(cfg.subspaces, Some(SubspacesConfig::Explicit(_)))
                || matches!(cfg.lp_projections, Some(LpProjectionsConfig::Explicit(_)))
            {
                return Err(CliError::config("subspaces", "a dim sweep needs randomly drawn projections"));
            }
            cfg.space = match cfg.space {
                SpaceConfig::Hilbert { .. } => SpaceConfig::Hilbert { dim: d },
                SpaceConfig::Lp { p, .. } => SpaceConfig::Lp { dim: d, p },
            };
        }
        SweepParam::P => {
            cfg.space = match cfg.space {
                SpaceConfig::Lp { dim, .. } => SpaceConfig::Lp { dim, p: value },
                SpaceConfig::Hilbert { .. } => {
                    return Err(CliError::config("space.kind", "a p sweep needs an lp space"))
                }
            };
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Headline scalars; `None` where a quantity does not apply or a fit failed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Headline {
    /// Friedrichs number of the first subspace pair (Hilbert only).
    pub c: Option<f64>,
    /// Fitted rate of `‖Tⁿ − P_T‖₂`.
    pub r: Option<f64>,
    /// Resolvent exponent near 1.
    pub alpha: Option<f64>,
    /// Decay exponent of `sup_W |λⁿ(1 − λ)|` over the numerical range sample.
    pub beta: Option<f64>,
    /// Halperin constant estimate.
    pub c_hat: Option<f64>,
}

pub fn headline(cfg: &ExperimentConfig, inst: &Instance, seed: u64) -> Result<Headline, CliError> {
    let t = inst.matrix();
    let err = |e: &dyn std::fmt::Display| CliError::compute("sweep", e);
    let c = match inst.dr_pair(cfg) {
        Some((a, b)) if inst.is_hilbert() => Some(friedrichs_number(a, b, cfg.tolerances.rank).map_err(|e| err(&e))?),
        _ => None,
    };
    let r = Some(dichotomy_report(t, cfg.iterations, cfg.tolerances.rank, None).map_err(|e| err(&e))?.r);
    let alpha = resolvent_profile(t, &default_theta_grid(), cfg.tolerances.resolvent_window)
        .map_err(|e| err(&e))?
        .alpha;
    let sample = numerical_range(cfg, inst, seed)?;
    let mut omega: Vec<Complex64> = sample.points.clone();
    omega.extend(densify(&sample.hull, 16));
    // Rounding may put a boundary point a hair outside the disk.
    for z in omega.iter_mut() {
        if z.norm() > 1.0 && z.norm() <= 1.0 + 1e-9 {
            *z /= z.norm();
        }
    }
    let beta = zn_beta(&omega, cfg.iterations).ok().and_then(|z| z.beta);
    let mode = if inst.is_hilbert() {
        HalperinMode::Hilbert
    } else {
        HalperinMode::Lp { p: inst.space.p }
    };
    let c_hat = halperin_inequality_check(
        &inst.product_matrices(),
        mode,
        cfg.halperin_samples,
        derived_seed(seed, AnalysisKind::Halperin),
    )
    .map_err(|e| err(&e))?
    .c_hat;
    Ok(Headline {
        c,
        r,
        alpha,
        beta,
        c_hat: Some(c_hat),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    pub seed: u64,
    pub headline: Headline,
    pub failed: Vec<String>,
}

/// Row `i` uses seed `seed ⊕ i`, so rows do not depend on execution order.
pub fn sweep_rows(
    base: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
    seed: u64,
) -> Result<Vec<SweepRow>, CliError> {
    let configs = values
        .iter()
        .map(|&v| apply(base, param, v))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Result<SweepRow, CliError>> = configs
        .par_iter()
        .enumerate()
        .map(|(i, cfg)| {
            let row_seed = seed ^ i as u64;
            let (inst, results): (Instance, Vec<AnalysisResult>) = execute(cfg, row_seed)?;
            Ok(SweepRow {
                index: i,
                value: values[i],
                seed: row_seed,
                headline: headline(cfg, &inst, row_seed)?,
                failed: failed_names(&results),
            })
        })
        .collect();
    rows.into_iter().collect()
}

pub fn sweep_table(param: SweepParam, rows: &[SweepRow]) -> Table {
    let mut t = Table::new("sweep", &["index", param.name(), "seed", "c", "r", "alpha", "beta", "c_hat", "passed", "failed"]);
    for r in rows {
        let h = &r.headline;
        t.push(vec![
            r.index.into(),
            r.value.into(),
            Cell::Text(r.seed.to_string()),
            h.c.into(),
            h.r.into(),
            h.alpha.into(),
            h.beta.into(),
            h.c_hat.into(),
            r.failed.is_empty().into(),
            Cell::Text(r.failed.join(";")),
        ]);
    }
    t
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub config: PathBuf,
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub csv: PathBuf,
    pub rows: Vec<SweepRow>,
}

impl SweepSummary {
    pub fn failed_rows(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| !r.failed.is_empty()).map(|r| r.index).collect()
    }
}

#[derive(Serialize)]
struct SweepReport<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    param: SweepParam,
    values: &'a [f64],
    config: &'a ExperimentConfig,
    passed: bool,
    rows: &'a [SweepRow],
}

pub fn write_sweep(
    dir: &Path,
    base: &ExperimentConfig,
    param: SweepParam,
    seed: u64,
    values: &[f64],
    rows: &[SweepRow],
) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let csv = write_file(dir, "sweep.csv", &sweep_table(param, rows).to_csv())?;
    let report = SweepReport {
        tool: TOOL,
        version: VERSION,
        seed,
        param,
        values,
        config: base,
        passed: rows.iter().all(|r| r.failed.is_empty()),
        rows,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_file(dir, "sweep_report.json", &json)?;
    Ok(csv)
}

pub fn sweep(opts: &SweepOptions) -> Result<SweepSummary, CliError> {
    let base = ExperimentConfig::load(&opts.config)?;
    let values = sweep_values(opts.param, opts.from, opts.to, opts.steps)?;
    let seed = opts.seed.unwrap_or(base.seed);
    let dir = opts.out.clone().unwrap_or_else(|| PathBuf::from(&base.output.dir));
    let rows = with_pool(opts.jobs, || sweep_rows(&base, opts.param, &values, seed))??;
    let csv = write_sweep(&dir, &base, opts.param, seed, &values, &rows)?;
    Ok(SweepSummary { csv, rows })
}
