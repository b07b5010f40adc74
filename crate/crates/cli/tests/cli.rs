use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

fn pdlab(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pdlab"));
    cmd.args(args).env_remove("PDLAB_SEED");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, json: Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(&json).unwrap()).unwrap();
    path
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    pdlab(&args, &[])
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn analysis<'a>(rep: &'a Value, name: &str) -> &'a Value {
    rep["analyses"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["name"] == name)
        .unwrap_or_else(|| panic!("no analysis {name}"))
}

/// Header and rows of a CSV file, cells as strings.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (header, rows) = read_csv(path);
    let k = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

fn summary(path: &Path) -> BTreeMap<String, f64> {
    read_csv(path)
        .1
        .into_iter()
        .map(|r| (r[0].clone(), r[1].parse().unwrap()))
        .collect()
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn dr_lines_rate_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run(&examples().join("dr_lines.json"), &out, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep = report(&out, "report.json");
    assert_eq!(rep["passed"], true);
    let dr = analysis(&rep, "dr-rate");
    assert!((dr["scalars"]["c"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(dr["scalars"]["max_violation"].as_f64().unwrap() <= 1e-10);

    // The flag follows from the CSVs alone.
    let gap = column(&out.join("dr_rate.csv"), "gap");
    let bound = column(&out.join("dr_rate.csv"), "bound");
    assert_eq!(gap.len(), 51);
    let slack = summary(&out.join("dr_rate_summary.csv"))["slack"];
    assert!(gap.iter().zip(&bound).all(|(g, b)| *g <= b + slack));
    for (n, b) in bound.iter().enumerate() {
        assert!((b - 0.5f64.powi(n as i32)).abs() < 1e-12);
    }
    assert!((gap[10] - 2f64.powi(-10)).abs() < 1e-12);
}

#[test]
fn weights_not_summing_to_one_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg: Value = serde_json::from_str(&fs::read_to_string(examples().join("convex.json")).unwrap()).unwrap();
    cfg["operator"]["terms"][1]["weight"] = 0.15.into();
    let path = write_config(tmp.path(), "bad.json", cfg);
    let o = run(&path, &tmp.path().join("out"), &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("operator.terms"), "{}", stderr(&o));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn unknown_analysis_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg: Value = serde_json::from_str(&fs::read_to_string(examples().join("map_ritt.json")).unwrap()).unwrap();
    cfg["analyses"] = serde_json::json!(["ritt", "spectrum"]);
    let path = write_config(tmp.path(), "bad.json", cfg);
    let o = run(&path, &tmp.path().join("out"), &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("analyses[1]"), "{}", stderr(&o));
}

#[test]
fn dimension_mismatch_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg: Value = serde_json::from_str(&fs::read_to_string(examples().join("dr_lines.json")).unwrap()).unwrap();
    cfg["space"]["dim"] = 3.into();
    let path = write_config(tmp.path(), "bad.json", cfg);
    let o = run(&path, &tmp.path().join("out"), &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("subspaces[0]"), "{}", stderr(&o));
}

#[test]
fn missing_config_and_bad_flags_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&tmp.path().join("nope.json"), &tmp.path().join("out"), &[]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&pdlab(&["run"], &[])), 1);
    assert_eq!(code(&pdlab(&["frobnicate"], &[])), 1);
    let o = run(&examples().join("dr_lines.json"), &tmp.path().join("out"), &["--jobs", "0"]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&pdlab(&["--help"], &[])), 0);
}

#[test]
fn ritt_on_map_operator() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run(&examples().join("map_ritt.json"), &out, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, rows) = read_csv(&out.join("ritt.csv"));
    assert_eq!(header, ["n", "value"]);
    assert_eq!(rows.len(), 1000);
    let rep = report(&out, "report.json");
    assert_eq!(analysis(&rep, "ritt")["checks"]["ritt_consistent"], true);

    let values = column(&out.join("ritt.csv"), "value");
    let q = values.len() / 4;
    let head = values[..q].iter().copied().fold(0.0, f64::max);
    let tail = values[values.len() - q..].iter().copied().fold(0.0, f64::max);
    assert!(tail <= 1.05 * head);
}

#[test]
fn failing_check_exits_two_and_names_the_analysis() {
    let tmp = tempfile::tempdir().unwrap();
    // Shared vector e1 puts 1 in the numerical range; no alpha reaches c_min.
    let cfg = serde_json::json!({
        "seed": 1,
        "space": {"kind": "hilbert", "dim": 3},
        "subspaces": [
            [[[1, 0], [0, 0], [0, 0]], [[0, 0], [1, 0], [0, 0]]],
            [[[1, 0], [0, 0], [0, 0]], [[0, 0], [0.6, 0], [0.8, 0]]]
        ],
        "operator": {"kind": "map"},
        "analyses": ["ritt", "stolz"],
        "tolerances": {"stolz_c_min": 1e12}
    });
    let path = write_config(tmp.path(), "cfg.json", cfg);
    let out = tmp.path().join("out");
    let o = run(&path, &out, &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("stolz"), "{}", stderr(&o));
    let rep = report(&out, "report.json");
    assert_eq!(rep["passed"], false);
    assert_eq!(rep["failed"], serde_json::json!(["stolz"]));

    let c_min = summary(&out.join("stolz_summary.csv"))["c_min"];
    assert!(column(&out.join("stolz.csv"), "c").iter().all(|c| *c < c_min));
}

#[test]
fn flags_recompute_from_csvs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run(&examples().join("full_suite.json"), &out, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep = report(&out, "report.json");
    for a in rep["analyses"].as_array().unwrap() {
        let stem = a["name"].as_str().unwrap().replace('-', "_");
        let flags = summary(&out.join(format!("{stem}_summary.csv")));
        for (name, value) in a["checks"].as_object().unwrap() {
            let expected = if value.as_bool().unwrap() { 1.0 } else { 0.0 };
            assert_eq!(flags[name], expected, "{stem}.{name}");
        }
    }

    let ok = column(&out.join("kspectral.csv"), "ok");
    let lhs = column(&out.join("kspectral.csv"), "lhs");
    let bound = column(&out.join("kspectral.csv"), "bound");
    assert!(ok.iter().all(|v| *v == 1.0));
    assert!(lhs.iter().zip(&bound).all(|(l, b)| l <= b));

    let dist = column(&out.join("numrange_spectrum.csv"), "distance");
    let tol = column(&out.join("numrange_spectrum.csv"), "tolerance");
    assert!(dist.iter().zip(&tol).all(|(d, t)| d <= t));

    let norm = column(&out.join("slow_certificate.csv"), "norm");
    let r = column(&out.join("slow_certificate.csv"), "r_n");
    assert_eq!(norm.len(), 201);
    assert!(norm.iter().zip(&r).all(|(a, b)| a >= b));

    for file in ["dichotomy.svg", "ritt.svg", "numrange.svg"] {
        let svg = fs::read_to_string(out.join(file)).unwrap();
        assert!(svg.starts_with("<?xml") || svg.starts_with("<svg"), "{file}");
        assert!(svg.contains("version=\"1.1\""), "{file}");
    }
}

#[test]
fn csv_output_is_independent_of_jobs() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let cfg = examples().join("full_suite.json");
    assert_eq!(code(&run(&cfg, &a, &["--jobs", "1"])), 0);
    assert_eq!(code(&run(&cfg, &b, &["--jobs", "4"])), 0);
    let fa = csv_files(&a);
    assert!(fa.len() > 10);
    assert_eq!(fa, csv_files(&b));
    assert_eq!(fs::read(a.join("report.json")).unwrap(), fs::read(b.join("report.json")).unwrap());
}

#[test]
fn seed_flag_beats_environment_beats_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = examples().join("map_ritt.json");
    let cfg = cfg.to_str().unwrap();
    let seed_of = |dir: &str, extra: &[&str], envs: &[(&str, &str)]| {
        let out = tmp.path().join(dir);
        let mut args = vec!["run", "--config", cfg, "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert_eq!(code(&pdlab(&args, envs)), 0);
        report(&out, "report.json")["seed"].as_u64().unwrap()
    };
    assert_eq!(seed_of("config", &[], &[]), 2024);
    assert_eq!(seed_of("env", &[], &[("PDLAB_SEED", "77")]), 77);
    assert_eq!(seed_of("flag", &["--seed", "5"], &[("PDLAB_SEED", "77")]), 5);
    assert_ne!(
        fs::read(tmp.path().join("config/ritt.csv")).unwrap(),
        fs::read(tmp.path().join("env/ritt.csv")).unwrap()
    );
}

fn sweep(config: &Path, out: &Path, param: &str, from: f64, to: f64, steps: usize, extra: &[&str]) -> Output {
    let (from, to, steps) = (from.to_string(), to.to_string(), steps.to_string());
    let mut args = vec![
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--param",
        param,
        "--from",
        &from,
        "--to",
        &to,
        "--steps",
        &steps,
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    pdlab(&args, &[])
}

#[test]
fn theta_sweep_rate_is_cos_theta() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = sweep(&examples().join("dr_lines.json"), &out, "theta", PI / 64.0, PI / 2.0, 16, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = out.join("sweep.csv");
    let theta = column(&csv, "theta");
    let r = column(&csv, "r");
    let c = column(&csv, "c");
    assert_eq!(theta.len(), 16);
    for ((t, r), c) in theta.iter().zip(&r).zip(&c) {
        assert!((r - t.cos()).abs() < 1e-6, "theta {t}: r {r}");
        assert!((c - t.cos()).abs() < 1e-9, "theta {t}: c {c}");
    }
    assert!(out.join("sweep_report.json").exists());
}

#[test]
fn dim_sweep_rows_are_complete() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg: Value = serde_json::from_str(&fs::read_to_string(examples().join("map_ritt.json")).unwrap()).unwrap();
    cfg["iterations"] = 200.into();
    let path = write_config(tmp.path(), "cfg.json", cfg);
    let out = tmp.path().join("out");
    let o = sweep(&path, &out, "dim", 2.0, 8.0, 7, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, rows) = read_csv(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 7);
    for row in &rows {
        for (h, cell) in header.iter().zip(row).filter(|(h, _)| *h != "failed") {
            let v: f64 = cell.parse().unwrap_or_else(|_| panic!("{h} = `{cell}`"));
            assert!(!v.is_nan(), "{h}");
        }
    }
    let seeds = column(&out.join("sweep.csv"), "seed");
    assert_eq!(seeds, (0..7).map(|i| (2024 ^ i) as f64).collect::<Vec<_>>());
}

#[test]
fn p_sweep_halperin_constant_is_finite() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg: Value = serde_json::from_str(&fs::read_to_string(examples().join("lp_halperin.json")).unwrap()).unwrap();
    cfg["halperin_samples"] = 1000.into();
    let path = write_config(tmp.path(), "cfg.json", cfg);
    let out = tmp.path().join("out");
    let o = sweep(&path, &out, "p", 1.5, 4.0, 6, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let c_hat = column(&out.join("sweep.csv"), "c_hat");
    assert_eq!(c_hat.len(), 6);
    assert!(c_hat.iter().all(|c| c.is_finite() && *c >= 1.0 - 1e-12));
}

#[test]
fn sweep_is_independent_of_jobs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = examples().join("map_ritt.json");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&sweep(&cfg, &a, "dim", 3.0, 6.0, 4, &["--jobs", "1"])), 0);
    assert_eq!(code(&sweep(&cfg, &b, "dim", 3.0, 6.0, 4, &["--jobs", "3"])), 0);
    assert_eq!(fs::read(a.join("sweep.csv")).unwrap(), fs::read(b.join("sweep.csv")).unwrap());
}

#[test]
fn sweep_rejects_bad_ranges() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = sweep(&examples().join("dr_lines.json"), &out, "theta", 1.0, 0.5, 4, &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("non-monotone"), "{}", stderr(&o));
    let o = sweep(&examples().join("dr_lines.json"), &out, "p", 1.5, 3.0, 4, &[]);
    assert_eq!(code(&o), 1);
    let o = sweep(&examples().join("dr_lines.json"), &out, "dim", 2.0, 8.0, 3, &[]);
    assert_eq!(code(&o), 1);
}

fn write_rates(dir: &Path, rates: &[f64]) -> PathBuf {
    let path = dir.join("rates.csv");
    let body: String = rates.iter().map(|r| format!("{r:e}\n")).collect();
    fs::write(&path, body).unwrap();
    path
}

fn slow(rates: &Path, out: &Path) -> Output {
    pdlab(&["slow", "--rates", rates.to_str().unwrap(), "--out", out.to_str().unwrap()], &[])
}

#[test]
fn slow_geometric_rates_certificate() {
    let tmp = tempfile::tempdir().unwrap();
    let rates: Vec<f64> = (0..=8).map(|n| 2f64.powi(-n)).collect();
    let out = tmp.path().join("out");
    let o = slow(&write_rates(tmp.path(), &rates), &out);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let norm = column(&out.join("slow_certificate.csv"), "norm");
    let r = column(&out.join("slow_certificate.csv"), "r_n");
    assert_eq!(r, rates);
    assert!(norm.iter().zip(&r).all(|(a, b)| a >= b));
    assert!(out.join("slow_m1_basis.csv").exists());
    assert!(out.join("slow_m2_basis.csv").exists());
    assert!(out.join("slow_x.csv").exists());
}

#[test]
fn slow_power_rates_dimension() {
    let tmp = tempfile::tempdir().unwrap();
    let rates: Vec<f64> = (0..=200).map(|n| (n as f64 + 1.0).powf(-0.5)).collect();
    let out = tmp.path().join("out");
    let o = slow(&write_rates(tmp.path(), &rates), &out);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep = report(&out, "report.json");
    assert_eq!(rep["dimension"], 402);
    assert_eq!(rep["n"], 200);
    assert!(rep["kappa"].as_f64().unwrap() > 0.0);
    assert_eq!(rep["passed"], true);
}

#[test]
fn slow_rejects_empty_and_invalid_rates() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let empty = tmp.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert_eq!(code(&slow(&empty, &out)), 1);
    let rising = write_rates(tmp.path(), &[0.5, 0.9, 0.1]);
    assert_eq!(code(&slow(&rising, &out)), 1);
    assert_eq!(code(&slow(&tmp.path().join("missing.csv"), &out)), 1);
}
