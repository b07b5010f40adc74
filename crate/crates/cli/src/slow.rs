//! `pdlab slow`: build and certify a slow instance from a rates file.

use std::path::{Path, PathBuf};

use pdlab::lab::{slow_instance, LabError};
use serde::Serialize;

use crate::analysis::slow_result;
use crate::config::validate_rates;
use crate::error::CliError;
use crate::output::{ensure_dir, write_file};
use crate::run::{TOOL, VERSION};

/// One rate per line (first CSV column); a non-numeric first line is taken
/// as a header.
pub fn read_rates(path: &Path) -> Result<Vec<f64>, CliError> {
    let read_err = |message: String| CliError::Read {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| read_err(e.to_string()))?;
    let mut rates = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| read_err(e.to_string()))?;
        let field = record.get(0).unwrap_or("");
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => rates.push(v),
            Err(_) if line == 0 => {}
            Err(_) => return Err(read_err(format!("line {}: `{field}` is not a number", line + 1))),
        }
    }
    if rates.is_empty() {
        return Err(read_err("no rates found".into()));
    }
    Ok(rates)
}

#[derive(Serialize)]
struct SlowReport<'a> {
    tool: &'static str,
    version: &'static str,
    rates_file: String,
    n: usize,
    dimension: usize,
    kappa: f64,
    passed: bool,
    checks: std::collections::BTreeMap<String, bool>,
    files: &'a [String],
}

#[derive(Debug, Clone)]
pub struct SlowSummary {
    pub dir: PathBuf,
    pub dimension: usize,
    pub kappa: f64,
    pub passed: bool,
}

pub fn slow(rates_path: &Path, out: &Path, svg: bool) -> Result<SlowSummary, CliError> {
    let rates = read_rates(rates_path)?;
    validate_rates(&rates).map_err(|m| CliError::Read {
        path: rates_path.to_path_buf(),
        message: m,
    })?;
    let inst = match slow_instance(&rates) {
        Ok(inst) => inst,
        Err(LabError::InvalidRates(m)) => {
            return Err(CliError::Read {
                path: rates_path.to_path_buf(),
                message: m,
            })
        }
        Err(e) => return Err(CliError::compute("slow", e)),
    };
    let result = slow_result(&inst);
    ensure_dir(out)?;
    let mut files = Vec::new();
    let summary = result.summary_table();
    for t in result.tables.iter().chain(std::iter::once(&summary)) {
        let name = format!("{}.csv", t.name);
        write_file(out, &name, &t.to_csv())?;
        files.push(name);
    }
    if svg {
        for p in &result.plots {
            let name = format!("{}.svg", p.name);
            write_file(out, &name, &p.to_svg())?;
            files.push(name);
        }
    }
    let report = SlowReport {
        tool: TOOL,
        version: VERSION,
        rates_file: rates_path.display().to_string(),
        n: rates.len() - 1,
        dimension: inst.dim(),
        kappa: inst.kappa,
        passed: result.passed(),
        checks: result.checks.iter().cloned().collect(),
        files: &files,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_file(out, "report.json", &json)?;
    Ok(SlowSummary {
        dir: out.to_path_buf(),
        dimension: inst.dim(),
        kappa: inst.kappa,
        passed: result.passed(),
    })
}
