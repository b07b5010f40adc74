//! `pdlab run`: execute the configured analyses and write the report bundle.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{numerical_range, run_analysis, AnalysisResult, Context};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::instance::{build_instance, Instance};
use crate::output::{ensure_dir, write_file};

pub const TOOL: &str = "pdlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs `f` on a pool of `jobs` threads (rayon's default when `None`).
pub fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs every analysis of `cfg` on one instance. Analyses may run
/// concurrently; results come back in config order.
pub fn execute(cfg: &ExperimentConfig, seed: u64) -> Result<(Instance, Vec<AnalysisResult>), CliError> {
    let inst = build_instance(cfg, seed)?;
    let sample = if cfg.analyses.iter().any(|a| a.needs_numerical_range()) {
        Some(numerical_range(cfg, &inst, seed)?)
    } else {
        None
    };
    let ctx = Context {
        cfg,
        inst: &inst,
        seed,
        sample: sample.as_ref(),
    };
    let outcomes: Vec<Result<AnalysisResult, CliError>> =
        cfg.analyses.par_iter().map(|&kind| run_analysis(kind, &ctx)).collect();
    let results = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok((inst, results))
}

#[derive(Debug, Serialize)]
pub struct AnalysisEntry {
    pub name: String,
    pub passed: bool,
    pub checks: BTreeMap<String, bool>,
    pub scalars: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub files: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct OperatorInfo {
    pub label: String,
    pub dim: usize,
    pub projections: usize,
    pub factors_used: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: &'a ExperimentConfig,
    pub operator: OperatorInfo,
    pub passed: bool,
    pub failed: Vec<String>,
    pub analyses: Vec<AnalysisEntry>,
}

/// Names of analyses with a failing check, in config order.
pub fn failed_names(results: &[AnalysisResult]) -> Vec<String> {
    results
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.kind.name().to_string())
        .collect()
}

/// Writes CSVs, SVGs and `report.json` in a fixed order; returns the
/// report path.
pub fn write_bundle(
    dir: &Path,
    cfg: &ExperimentConfig,
    seed: u64,
    inst: &Instance,
    results: &[AnalysisResult],
) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let mut entries = Vec::with_capacity(results.len());
    for r in results {
        let mut files = Vec::new();
        if cfg.output.csv {
            let summary = r.summary_table();
            for t in r.tables.iter().chain(std::iter::once(&summary)) {
                let name = format!("{}.csv", t.name);
                write_file(dir, &name, &t.to_csv())?;
                files.push(name);
            }
        }
        if cfg.output.svg {
            for p in &r.plots {
                let name = format!("{}.svg", p.name);
                write_file(dir, &name, &p.to_svg())?;
                files.push(name);
            }
        }
        entries.push(AnalysisEntry {
            name: r.kind.name().into(),
            passed: r.passed(),
            checks: r.checks.iter().cloned().collect(),
            scalars: r.scalars.iter().cloned().collect(),
            notes: r.notes.clone(),
            files,
        });
    }
    let failed = failed_names(results);
    let report = Report {
        tool: TOOL,
        version: VERSION,
        seed,
        config: cfg,
        operator: OperatorInfo {
            label: inst.operator.label.clone(),
            dim: inst.dim(),
            projections: inst.projections.len(),
            factors_used: inst.operator.factors_used(),
        },
        passed: failed.is_empty(),
        failed,
        analyses: entries,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_file(dir, "report.json", &json)
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub report: PathBuf,
    pub seed: u64,
    pub failed: Vec<String>,
}

impl RunSummary {
    pub fn exit_code(&self) -> u8 {
        if self.failed.is_empty() {
            0
        } else {
            2
        }
    }
}

pub fn run(opts: &RunOptions) -> Result<RunSummary, CliError> {
    let cfg = ExperimentConfig::load(&opts.config)?;
    let seed = opts.seed.unwrap_or(cfg.seed);
    let dir = opts.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    let (inst, results) = with_pool(opts.jobs, || execute(&cfg, seed))??;
    let report = write_bundle(&dir, &cfg, seed, &inst, &results)?;
    Ok(RunSummary {
        report,
        seed,
        failed: failed_names(&results),
    })
}
