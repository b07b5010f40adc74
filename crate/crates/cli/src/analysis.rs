//! One function per analysis; each returns tables, scalars and checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use pdlab::lab::{
    dichotomy_report, dr_fixed_space, dr_rate_check, fix_split, halperin_inequality_check, slow_instance,
    superpoly_vectors, HalperinMode, LabError, SlowInstance, SuperpolyOptions,
};
use pdlab::linalg::{eigenvalues, norm2, EstimateOptions};
use pdlab::operators::power_norm_gap_lp;
use pdlab::spectral::{
    default_alpha_grid, default_theta_grid, densify, hull_distance_bound_check, k_spectral_check,
    numerical_range_hilbert, numerical_range_lp, polygon_distance, resolvent_profile, ritt_diagnostic, stolz_fit,
    NumericalRangeSample, StolzOutcome,
};

use crate::config::{AnalysisKind, ExperimentConfig};
use crate::error::CliError;
use crate::instance::Instance;
use crate::output::{Cell, Plot, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult {
    pub kind: AnalysisKind,
    /// Named pass/fail flags, in a fixed order.
    pub checks: Vec<(String, bool)>,
    pub scalars: Vec<(String, f64)>,
    pub notes: Vec<String>,
    pub tables: Vec<Table>,
    pub plots: Vec<Plot>,
}

impl AnalysisResult {
    fn new(kind: AnalysisKind) -> Self {
        Self {
            kind,
            checks: Vec::new(),
            scalars: Vec::new(),
            notes: Vec::new(),
            tables: Vec::new(),
            plots: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    fn set(&mut self, name: &str, v: f64) {
        self.scalars.push((name.into(), v));
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.checks.push((name.into(), ok));
    }

    /// Scalars and check outcomes as a `quantity,value` table.
    pub fn summary_table(&self) -> Table {
        let mut rows: Vec<(&str, Cell)> = self.scalars.iter().map(|(k, v)| (k.as_str(), Cell::Float(*v))).collect();
        rows.extend(self.checks.iter().map(|(k, v)| (k.as_str(), Cell::Bool(*v))));
        Table::summary(format!("{}_summary", self.kind.stem()), &rows)
    }
}

/// Read-only inputs shared by every analysis of one instance.
pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub inst: &'a Instance,
    pub seed: u64,
    pub sample: Option<&'a NumericalRangeSample>,
}

/// Per-analysis seed, independent of which other analyses run.
pub fn derived_seed(seed: u64, kind: AnalysisKind) -> u64 {
    let index = AnalysisKind::ALL.iter().position(|k| *k == kind).unwrap_or(0) as u64;
    seed ^ (index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Rotation boundary sample (Hilbert) or duality sample (`l^p`).
pub fn numerical_range(cfg: &ExperimentConfig, inst: &Instance, seed: u64) -> Result<NumericalRangeSample, CliError> {
    let t = inst.matrix();
    let sample = if inst.is_hilbert() {
        numerical_range_hilbert(t, cfg.theta_grid)
    } else {
        numerical_range_lp(t, &inst.space, cfg.lp_samples, derived_seed(seed, AnalysisKind::Numrange))
    };
    sample.map_err(|e| CliError::compute("numrange", e))
}

pub fn run_analysis(kind: AnalysisKind, ctx: &Context) -> Result<AnalysisResult, CliError> {
    let fail = |e: &dyn std::fmt::Display| CliError::compute(kind.name(), e);
    let sample = || {
        ctx.sample
            .ok_or_else(|| CliError::compute(kind.name(), "numerical range sample missing"))
    };
    match kind {
        AnalysisKind::Dichotomy => dichotomy(ctx).map_err(|e| fail(&e)),
        AnalysisKind::Numrange => numrange(ctx, sample()?).map_err(|e| fail(&e)),
        AnalysisKind::Resolvent => resolvent(ctx, sample()?).map_err(|e| fail(&e)),
        AnalysisKind::Ritt => ritt(ctx).map_err(|e| fail(&e)),
        AnalysisKind::Stolz => stolz(ctx, sample()?).map_err(|e| fail(&e)),
        AnalysisKind::Kspectral => kspectral(ctx, sample()?).map_err(|e| fail(&e)),
        AnalysisKind::Halperin => halperin(ctx).map_err(|e| fail(&e)),
        AnalysisKind::DrRate => dr_rate(ctx).map_err(|e| fail(&e)),
        AnalysisKind::Slow => slow(ctx).map_err(|e| fail(&e)),
        AnalysisKind::Superpoly => superpoly(ctx).map_err(|e| fail(&e)),
    }
}

type Outcome = Result<AnalysisResult, Box<dyn std::error::Error + Send + Sync>>;

fn series(values: &[f64], start: usize) -> Vec<(f64, f64)> {
    values.iter().enumerate().map(|(n, v)| ((n + start) as f64, *v)).collect()
}

fn dichotomy(ctx: &Context) -> Outcome {
    let t = ctx.inst.matrix();
    let n = ctx.cfg.iterations;
    let rep = dichotomy_report(t, n, ctx.cfg.tolerances.rank, None)?;
    let mut out = AnalysisResult::new(AnalysisKind::Dichotomy);
    let lp_gap = if ctx.inst.is_hilbert() {
        None
    } else {
        let split = fix_split(t, ctx.cfg.tolerances.rank)?;
        let opts = EstimateOptions::default();
        Some(power_norm_gap_lp(t, Some(split.p_t.matrix()), n, ctx.inst.space.p, &opts)?.values)
    };
    let mut header = vec!["n", "gap", "envelope"];
    if lp_gap.is_some() {
        header.push("gap_p_estimate");
    }
    let mut table = Table::new("dichotomy", &header);
    let envelope: Vec<f64> = (0..rep.gap.len()).map(|k| rep.c * rep.r.powi(k as i32)).collect();
    for (k, g) in rep.gap.iter().enumerate() {
        let mut row = vec![k.into(), (*g).into(), envelope[k].into()];
        if let Some(lp) = &lp_gap {
            row.push(lp[k].into());
        }
        table.push(row);
    }
    out.set("r", rep.r);
    out.set("c", rep.c);
    out.set("restriction_spectral_radius", rep.restriction_spectral_radius);
    out.set("iterations", n as f64);
    out.set("envelope_slack", 1e-12);
    out.flag("envelope", rep.envelope_ok);
    if n >= 200 {
        out.flag("r_agrees", rep.r_agrees);
    } else {
        out.notes.push("r agreement with r(S) is checked only for N >= 200".into());
    }
    out.notes.push(format!("regime: {}", rep.regime));
    if lp_gap.is_some() {
        out.notes
            .push("gap is the 2-norm; gap_p_estimate is a lower bound from the l^p estimator".into());
    }
    let mut plot = Plot::new("dichotomy", "Power gap ||T^n - P_T||", "n", "gap")
        .log_y()
        .with("gap", series(&rep.gap, 0))
        .with("C r^n", series(&envelope, 0));
    if let Some(lp) = &lp_gap {
        plot = plot.with("gap (p-norm estimate)", series(lp, 0));
    }
    out.tables.push(table);
    out.plots.push(plot);
    Ok(out)
}

fn numrange(ctx: &Context, sample: &NumericalRangeSample) -> Outcome {
    let t = ctx.inst.matrix();
    let mut out = AnalysisResult::new(AnalysisKind::Numrange);
    let mut points = Table::new("numrange_points", &["k", "re", "im"]);
    for (k, z) in sample.points.iter().enumerate() {
        points.push(vec![k.into(), z.re.into(), z.im.into()]);
    }
    let mut hull = Table::new("numrange_hull", &["k", "re", "im"]);
    for (k, z) in sample.hull.iter().enumerate() {
        hull.push(vec![k.into(), z.re.into(), z.im.into()]);
    }
    let radius = sample.points.iter().map(|z| z.norm()).fold(0.0, f64::max);
    out.set("points", sample.points.len() as f64);
    out.set("hull_vertices", sample.hull.len() as f64);
    out.set("sampled_numerical_radius", radius);
    let mut plot = Plot::new("numrange", "Numerical range", "Re", "Im").square();
    let mut closed = sample.hull.clone();
    if let Some(first) = sample.hull.first() {
        closed.push(*first);
    }
    plot = plot.with("hull", closed.iter().map(|z| (z.re, z.im)).collect());
    if ctx.inst.is_hilbert() {
        // Consecutive support points at angular step 2π/m bound a triangle of
        // height at most ‖T‖ tan(π/m) over their chord.
        let norm = norm2(t);
        let tol = norm * (PI / ctx.cfg.theta_grid as f64).tan() + 1e-9;
        let spectrum = eigenvalues(t)?.sorted();
        let mut spec = Table::new("numrange_spectrum", &["k", "re", "im", "distance", "tolerance"]);
        let mut worst = 0.0f64;
        for (k, z) in spectrum.iter().enumerate() {
            let d = polygon_distance(*z, &sample.hull);
            worst = worst.max(d);
            spec.push(vec![k.into(), z.re.into(), z.im.into(), d.into(), tol.into()]);
        }
        out.set("operator_norm", norm);
        out.set("spectrum_hull_tolerance", tol);
        out.set("worst_spectrum_distance", worst);
        out.flag("within_norm_disk", radius <= norm + 1e-9);
        out.flag("spectrum_in_hull", worst <= tol);
        plot = plot.with("unit circle", (0..=256).map(|k| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 256.0);
            (z.re, z.im)
        }).collect());
        out.tables.extend([points, hull, spec]);
    } else {
        out.notes
            .push("l^p numerical range is a random duality sample; no containment checks".into());
        out.tables.extend([points, hull]);
    }
    out.plots.push(plot);
    Ok(out)
}

fn uniform_angles(count: usize) -> Vec<f64> {
    (1..=count).map(|j| PI * j as f64 / count as f64).collect()
}

fn resolvent(ctx: &Context, sample: &NumericalRangeSample) -> Outcome {
    let t = ctx.inst.matrix();
    let mut out = AnalysisResult::new(AnalysisKind::Resolvent);
    let prof = resolvent_profile(t, &default_theta_grid(), ctx.cfg.tolerances.resolvent_window)?;
    let mut table = Table::new("resolvent", &["theta", "norm"]);
    for (th, r) in prof.angles.iter().zip(&prof.norms) {
        table.push(vec![(*th).into(), (*r).into()]);
    }
    out.set("window", prof.window);
    if let Some(a) = prof.alpha {
        out.set("alpha", a);
    }
    if let Some(c) = prof.c {
        out.set("c", c);
    }
    out.set("one_in_spectrum", f64::from(u8::from(prof.one_in_spectrum)));
    out.set("skipped_angles", prof.skipped.len() as f64);
    let positive: Vec<(f64, f64)> = prof
        .angles
        .iter()
        .zip(&prof.norms)
        .filter(|(th, _)| **th > 0.0)
        .map(|(th, r)| (*th, *r))
        .collect();
    out.plots.push(
        Plot::new("resolvent", "Resolvent ||R(e^{i theta}, T)||", "theta", "norm")
            .log_x()
            .log_y()
            .with("theta > 0", positive),
    );
    out.tables.push(table);
    if ctx.inst.is_hilbert() {
        let rep = hull_distance_bound_check(
            t,
            sample,
            &uniform_angles(ctx.cfg.resolvent_angles),
            ctx.cfg.tolerances.hull_slack,
        )?;
        let mut hull = Table::new("resolvent_hull", &["theta", "resolvent", "distance", "ratio", "ok"]);
        for r in &rep.rows {
            hull.push(vec![r.theta.into(), r.resolvent.into(), r.distance.into(), r.ratio.into(), r.ok.into()]);
        }
        out.set("hull_slack", rep.slack);
        out.set("hull_worst_ratio", rep.worst_ratio);
        out.set("hull_angles_checked", rep.rows.len() as f64);
        out.flag("hull_bound", rep.passed);
        out.tables.push(hull);
    } else {
        out.notes
            .push("the hull-distance bound is a Hilbert statement; skipped for l^p".into());
    }
    Ok(out)
}

fn ritt(ctx: &Context) -> Outcome {
    let rep = ritt_diagnostic(ctx.inst.matrix(), ctx.cfg.iterations)?;
    let mut out = AnalysisResult::new(AnalysisKind::Ritt);
    let mut table = Table::new("ritt", &["n", "value"]);
    for (k, v) in rep.values.iter().enumerate() {
        table.push(vec![(k + 1).into(), (*v).into()]);
    }
    out.set("sup", rep.sup);
    out.set("head_max", rep.head_max);
    out.set("tail_max", rep.tail_max);
    out.flag("ritt_consistent", rep.consistent);
    out.plots.push(
        Plot::new("ritt", "n ||T^n (I - T)||", "n", "value").with("n ||T^n (I - T)||", series(&rep.values, 1)),
    );
    out.tables.push(table);
    Ok(out)
}

fn stolz(ctx: &Context, sample: &NumericalRangeSample) -> Outcome {
    let tol = &ctx.cfg.tolerances;
    let mut points = sample.points.clone();
    points.extend(densify(&sample.hull, 16));
    let mut out = AnalysisResult::new(AnalysisKind::Stolz);
    out.set("epsilon", tol.stolz_epsilon);
    out.set("c_min", tol.stolz_c_min);
    let mut table = Table::new("stolz", &["alpha", "c"]);
    match stolz_fit(&points, tol.stolz_epsilon, &default_alpha_grid(), tol.stolz_c_min)? {
        StolzOutcome::Fit(fit) => {
            for (a, c) in &fit.per_alpha {
                table.push(vec![(*a).into(), (*c).into()]);
            }
            out.set("alpha", fit.alpha);
            out.set("c", fit.c);
            out.set("witness_re", fit.witness.re);
            out.set("witness_im", fit.witness.im);
            out.set("vacuous", 0.0);
            out.flag("stolz", fit.passed);
            out.plots.push(
                Plot::new("stolz", "Stolz constant c(alpha)", "alpha", "c")
                    .log_y()
                    .with("c(alpha)", fit.per_alpha.clone())
                    .with("c_min", vec![(1.0, tol.stolz_c_min), (8.0, tol.stolz_c_min)]),
            );
        }
        StolzOutcome::Vacuous => {
            out.set("vacuous", 1.0);
            out.notes
                .push("no sample point within epsilon of 1; every alpha passes vacuously".into());
        }
    }
    out.tables.push(table);
    Ok(out)
}

fn kspectral(ctx: &Context, sample: &NumericalRangeSample) -> Outcome {
    let rep = k_spectral_check(
        ctx.inst.matrix(),
        sample,
        ctx.cfg.iterations,
        ctx.cfg.tolerances.kspectral_slack,
    )?;
    let mut out = AnalysisResult::new(AnalysisKind::Kspectral);
    let mut table = Table::new("kspectral", &["n", "lhs", "s_n", "bound", "ok"]);
    for r in &rep.rows {
        table.push(vec![r.n.into(), r.lhs.into(), r.s_n.into(), r.bound.into(), r.ok.into()]);
    }
    out.set("k", 1.0 + 2f64.sqrt());
    out.set("slack", rep.slack);
    out.set("worst_ratio", rep.worst_ratio);
    out.flag("k_spectral", rep.passed);
    let lhs: Vec<(f64, f64)> = rep.rows.iter().map(|r| (r.n as f64, r.lhs)).collect();
    let bound: Vec<(f64, f64)> = rep.rows.iter().map(|r| (r.n as f64, r.bound)).collect();
    out.plots.push(
        Plot::new("kspectral", "K-spectral bound", "n", "norm")
            .log_x()
            .log_y()
            .with("||T^n (I - T)||", lhs)
            .with("(1 + sqrt 2) s_n", bound),
    );
    out.tables.push(table);
    Ok(out)
}

fn halperin(ctx: &Context) -> Outcome {
    let mode = if ctx.inst.is_hilbert() {
        HalperinMode::Hilbert
    } else {
        HalperinMode::Lp { p: ctx.inst.space.p }
    };
    let seed = derived_seed(ctx.seed, AnalysisKind::Halperin);
    let rep = halperin_inequality_check(&ctx.inst.product_matrices(), mode, ctx.cfg.halperin_samples, seed)?;
    let mut out = AnalysisResult::new(AnalysisKind::Halperin);
    let mut table = Table::new("halperin", &["stage", "samples", "c_hat"]);
    table.push(vec![1usize.into(), ctx.cfg.halperin_samples.into(), rep.c_hat.into()]);
    table.push(vec![2usize.into(), (2 * ctx.cfg.halperin_samples).into(), rep.c_hat_doubled.into()]);
    out.set("q", rep.q);
    out.set("factors", rep.factors as f64);
    out.set("exponent", rep.exponent);
    out.set("c_hat", rep.c_hat);
    out.set("c_hat_doubled", rep.c_hat_doubled);
    out.set("relative_change", rep.relative_change);
    out.set("used", rep.used as f64);
    out.set("skipped", rep.skipped as f64);
    out.flag("finite", rep.c_hat.is_finite() && rep.c_hat_doubled.is_finite());
    out.flag("stable", rep.stable);
    out.notes.push(format!(
        "T is the product of projections {:?} in application order",
        ctx.inst.product_order
    ));
    out.tables.push(table);
    Ok(out)
}

fn dr_rate(ctx: &Context) -> Outcome {
    let (m1, m2) = ctx.inst.dr_pair(ctx.cfg).ok_or("dr-rate needs two subspaces")?;
    let n = ctx.cfg.iterations;
    let rep = dr_rate_check(m1, m2, n)?;
    let mut out = AnalysisResult::new(AnalysisKind::DrRate);
    let mut table = Table::new("dr_rate", &["n", "gap", "bound"]);
    for r in &rep.rows {
        table.push(vec![r.n.into(), r.gap.into(), r.bound.into()]);
    }
    out.set("c", rep.c);
    out.set("max_violation", rep.max_violation);
    out.set("slack", 1e-10);
    if let Some(f) = &rep.first_failure {
        out.set("first_failure_n", f.n as f64);
    }
    out.flag("rate_bound", rep.passed);
    match dr_fixed_space(m1, m2, ctx.cfg.tolerances.rank) {
        Ok(fixed) => {
            out.set("predicted_dim", fixed.predicted.dim() as f64);
            out.set("kernel_dim", fixed.kernel.dim() as f64);
            out.set("worst_cosine", fixed.worst_cosine);
            out.flag(
                "fixed_space",
                fixed.predicted.dim() == fixed.kernel.dim() && fixed.worst_cosine >= 1.0 - ctx.cfg.tolerances.fixed_space,
            );
        }
        Err(LabError::FixedSpaceMismatch {
            predicted,
            kernel,
            worst_cosine,
        }) => {
            out.set("predicted_dim", predicted as f64);
            out.set("kernel_dim", kernel as f64);
            out.set("worst_cosine", worst_cosine);
            out.flag("fixed_space", false);
        }
        Err(e) => return Err(e.into()),
    }
    let gap: Vec<(f64, f64)> = rep.rows.iter().map(|r| (r.n as f64, r.gap)).collect();
    let bound: Vec<(f64, f64)> = rep.rows.iter().map(|r| (r.n as f64, r.bound)).collect();
    out.plots.push(
        Plot::new("dr_rate", "Douglas-Rachford rate", "n", "norm")
            .log_y()
            .with("||T^n - P||", gap)
            .with("c^n", bound),
    );
    out.tables.push(table);
    Ok(out)
}

/// Tables and scalars describing a built slow instance.
pub fn slow_result(inst: &SlowInstance) -> AnalysisResult {
    let mut out = AnalysisResult::new(AnalysisKind::Slow);
    let mut cert = Table::new("slow_certificate", &["n", "norm", "r_n", "weak"]);
    for (n, r) in inst.rates.iter().enumerate() {
        cert.push(vec![n.into(), inst.norms[n].into(), (*r).into(), inst.weak_values[n].into()]);
    }
    let mut angles = Table::new("slow_angles", &["block", "theta", "cos_theta"]);
    for (n, th) in inst.angles.iter().enumerate() {
        angles.push(vec![n.into(), (*th).into(), th.cos().into()]);
    }
    let vector_table = |name: &str, v: &[Complex64]| {
        let mut t = Table::new(name, &["index", "re", "im"]);
        for (i, z) in v.iter().enumerate() {
            t.push(vec![i.into(), z.re.into(), z.im.into()]);
        }
        t
    };
    // Bases are block sparse; only nonzero entries are listed.
    let basis_table = |name: &str, b: &pdlab::linalg::CMatrix| {
        let mut t = Table::new(name, &["row", "col", "re", "im"]);
        for j in 0..b.cols() {
            for i in 0..b.rows() {
                let z = b[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    t.push(vec![i.into(), j.into(), z.re.into(), z.im.into()]);
                }
            }
        }
        t
    };
    out.set("dimension", inst.dim() as f64);
    out.set("n", (inst.rates.len() - 1) as f64);
    out.set("kappa", inst.kappa);
    out.flag(
        "certified",
        inst.norms.iter().zip(&inst.rates).all(|(norm, r)| norm >= r),
    );
    out.flag("kappa_positive", inst.kappa > 0.0);
    out.plots.push(
        Plot::new("slow", "Certified slow orbit", "n + 1", "norm")
            .log_x()
            .log_y()
            .with("||T^n x||", series(&inst.norms, 1))
            .with("r_n", series(&inst.rates, 1))
            .with("Re <T^n x, phi>", series(&inst.weak_values, 1)),
    );
    out.tables.extend([
        cert,
        angles,
        vector_table("slow_x", &inst.x),
        vector_table("slow_phi", &inst.phi),
        basis_table("slow_m1_basis", inst.m1.basis()),
        basis_table("slow_m2_basis", inst.m2.basis()),
    ]);
    out
}

fn slow(ctx: &Context) -> Outcome {
    let inst = slow_instance(&ctx.cfg.slow.rates())?;
    Ok(slow_result(&inst))
}

fn superpoly(ctx: &Context) -> Outcome {
    let sp = &ctx.cfg.superpoly;
    let opts = SuperpolyOptions {
        k_max: sp.k_max,
        n_max: ctx.cfg.iterations.max(sp.window.1),
        window: sp.window,
        seed: derived_seed(ctx.seed, AnalysisKind::Superpoly),
    };
    let rep = superpoly_vectors(ctx.inst.matrix(), &opts)?;
    Ok(superpoly_result(&rep, &opts))
}

pub fn superpoly_result(rep: &pdlab::lab::SuperpolyReport, opts: &SuperpolyOptions) -> AnalysisResult {
    let mut out = AnalysisResult::new(AnalysisKind::Superpoly);
    let names: Vec<String> = rep.curves.iter().map(|c| format!("k{}", c.k)).collect();
    let mut header = vec!["n"];
    header.extend(names.iter().map(String::as_str));
    let mut table = Table::new("superpoly", &header);
    for n in 0..=opts.n_max {
        let mut row = vec![Cell::from(n)];
        row.extend(rep.curves.iter().map(|c| Cell::from(c.values[n])));
        table.push(row);
    }
    for c in &rep.curves {
        if let Some(s) = c.slope {
            out.set(&format!("slope_k{}", c.k), s);
        }
    }
    let (first, last) = (&rep.curves[0], &rep.curves[rep.curves.len() - 1]);
    let below = (opts.window.0..=opts.window.1).all(|n| last.values[n] <= first.values[n]);
    out.set("window_start", opts.window.0 as f64);
    out.set("window_end", opts.window.1 as f64);
    out.set("k_max_below_k1", f64::from(u8::from(below)));
    out.flag("slopes_non_increasing", rep.slopes_non_increasing);
    let mut plot = Plot::new("superpoly", "||T^n (I - T)^k y||", "n", "norm").log_x().log_y();
    for (c, name) in rep.curves.iter().zip(&names) {
        plot = plot.with(name, series(&c.values[1..], 1));
    }
    out.plots.push(plot);
    out.tables.push(table);
    out
}
