//! The four subcommands plus the CSV/JSON serialization helpers they share.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use condgrad::analysis::{
    check_certificate, rate_fit, GrowthCertificate, GrowthKind, Provenance, SeriesKind,
};
use condgrad::invariance::{paired_run, Reparametrization};
use condgrad::solver::{IterateRecord, StopReason, Trajectory};

use crate::config::{
    CertificateRequest, ExperimentConfig, StrategyDescriptor, SweepConfig,
};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits, deterministic across reruns.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt17).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn write_out(path: &Path, body: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, body)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

pub struct Overrides {
    pub seed: Option<u64>,
    pub max_iters: Option<usize>,
    pub gap_tol: Option<f64>,
    pub strategy: Option<StrategyDescriptor>,
}

fn stop_reason_label(r: StopReason) -> &'static str {
    match r {
        StopReason::GapTolerance => "gap_tolerance",
        StopReason::ZeroGap => "zero_gap",
        StopReason::MaxIterations => "max_iterations",
    }
}

fn effective_strategy(
    config: &ExperimentConfig,
    ov: &Overrides,
) -> StrategyDescriptor {
    ov.strategy
        .or(config.strategy)
        .unwrap_or(StrategyDescriptor::Exact)
}

fn run_from_config(
    config: &ExperimentConfig,
    ov: &Overrides,
) -> Result<(Trajectory<f64>, StrategyDescriptor), CliError> {
    let descriptor = match ov.seed {
        Some(seed) => config.instance.with_seed(seed),
        None => config.instance.clone(),
    };
    let problem = descriptor.build()?;
    let strategy = effective_strategy(config, ov);
    let x0 = config.x0.resolve(&problem);
    let max_iters = ov.max_iters.or(config.max_iters).unwrap_or(10_000);
    let gap_tol = ov.gap_tol.or(config.gap_tol).unwrap_or(0.0);
    let trajectory = condgrad::solver::run(&problem, strategy.build()?, &x0, max_iters, gap_tol)?;
    Ok((trajectory, strategy))
}

fn trajectory_csv(t: &Trajectory<f64>) -> String {
    let mut out = format!("# schema_version {SCHEMA_VERSION}\n");
    out.push_str("k,theta,primal,wolfe_gap,dual_value,best_gap,subopt\n");
    for r in &t.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k,
            fmt17(r.theta),
            fmt17(r.primal),
            fmt17(r.wolfe_gap),
            fmt17(r.dual_value),
            fmt17(r.best_gap),
            fmt_opt(r.subopt),
        ));
    }
    out
}

pub fn cmd_solve(config_path: &Path, out_dir: &Path, ov: &Overrides) -> Result<(), CliError> {
    let config: ExperimentConfig = read_config(config_path)?;
    let (trajectory, strategy) = run_from_config(&config, ov)?;
    let thinned;
    let written = match config.thin {
        Some(m) if m > 1 => {
            thinned = trajectory.thinned(m);
            &thinned
        }
        _ => &trajectory,
    };
    write_out(&out_dir.join("trajectory.csv"), &trajectory_csv(written))?;

    let last = trajectory.final_record();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "problem_id": trajectory.problem_id,
        "strategy": strategy.label(),
        "stop_reason": stop_reason_label(trajectory.stop_reason),
        "records": trajectory.records.len(),
        "final_primal": fmt17(last.primal),
        "final_best_gap": fmt17(last.best_gap),
        "final_subopt": last.subopt.map(fmt17),
        "wall_time_secs": fmt17(trajectory.wall_time_secs),
    });
    write_out(
        &out_dir.join("summary.json"),
        &format!("{}\n", serde_json::to_string_pretty(&summary).unwrap()),
    )
}

fn parse_trajectory_csv(
    path: &Path,
    strategy: StrategyDescriptor,
) -> Result<Trajectory<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read trajectory {}: {e}", path.display())))?;
    let bad = |line: usize, what: &str| {
        CliError::Usage(format!("malformed trajectory {} at line {line}: {what}", path.display()))
    };
    let mut records = Vec::new();
    let mut saw_header = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "k,theta,primal,wolfe_gap,dual_value,best_gap,subopt" {
                return Err(bad(i + 1, "unexpected header"));
            }
            saw_header = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(bad(i + 1, "expected 7 columns"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(i + 1, "bad float"));
        records.push(IterateRecord {
            k: cols[0].parse().map_err(|_| bad(i + 1, "bad k"))?,
            x: Vec::new(),
            theta: num(cols[1])?,
            primal: num(cols[2])?,
            wolfe_gap: num(cols[3])?,
            dual_value: num(cols[4])?,
            best_gap: num(cols[5])?,
            subopt: if cols[6].is_empty() { None } else { Some(num(cols[6])?) },
        });
    }
    if records.is_empty() {
        return Err(CliError::Usage(format!(
            "trajectory {} holds no records",
            path.display()
        )));
    }
    Ok(Trajectory {
        records,
        problem_id: String::new(),
        strategy: strategy.build()?,
        stop_reason: StopReason::MaxIterations,
        wall_time_secs: 0.0,
    })
}

fn fit_diagnostics(series: &[f64]) -> (Option<f64>, Option<f64>) {
    let positive: Vec<f64> = series.iter().copied().take_while(|&v| v > 1e-13).collect();
    let order = if positive.len() >= 4 {
        let window = (positive.len() / 2).clamp(3, 500);
        rate_fit(&positive, window).ok().map(|(o, _)| o)
    } else {
        None
    };
    let mut decreasing = Vec::new();
    for &v in &positive {
        if let Some(&prev) = decreasing.last() {
            if v > 0.9999 * prev {
                break;
            }
        }
        decreasing.push(v);
    }
    let factor = if decreasing.len() >= 4 {
        let window = decreasing.len().min(100);
        rate_fit(&decreasing, window).ok().map(|(_, f)| f)
    } else {
        None
    };
    (order, factor)
}

fn kind_label(kind: GrowthKind) -> &'static str {
    match kind {
        GrowthKind::Growth => "growth",
        GrowthKind::WeakGrowth => "weak_growth",
        GrowthKind::LocalGrowth => "local_growth",
    }
}

fn provenance_label(p: &Provenance) -> String {
    match p {
        Provenance::Theoretical(case) => format!("theoretical:{case:?}"),
        Provenance::Empirical { samples, theta_grid } => {
            format!("empirical(samples={samples},theta_grid={theta_grid})")
        }
    }
}

fn certificate_json(
    cert: &GrowthCertificate<f64>,
    trajectory: &Trajectory<f64>,
) -> Result<serde_json::Value, CliError> {
    let which = if cert.kind == GrowthKind::WeakGrowth {
        SeriesKind::Subopt
    } else {
        SeriesKind::Gap
    };
    let report = check_certificate(trajectory, cert, which)?;
    let series = match which {
        SeriesKind::Gap => trajectory.best_gaps(),
        SeriesKind::Subopt => trajectory.suboptimalities().unwrap(),
    };
    let (order, factor) = fit_diagnostics(&series);
    let head: Vec<String> = report
        .envelope
        .as_ref()
        .map(|e| e.bounds.iter().take(20).copied().map(fmt17).collect())
        .unwrap_or_default();
    Ok(json!({
        "kind": kind_label(cert.kind),
        "q": fmt17(cert.q),
        "r": fmt17(cert.r),
        "m": fmt17(cert.m),
        "epsilon": cert.epsilon.map(fmt17),
        "provenance": provenance_label(&cert.provenance),
        "series": match which { SeriesKind::Gap => "gap", SeriesKind::Subopt => "subopt" },
        "pass": report.pass,
        "first_failing_k": report.first_failing_k,
        "envelope_start": report.envelope_start,
        "envelope_head": head,
        "rate_fit": {
            "order": order.map(fmt17),
            "linear_factor": factor.map(fmt17),
        },
    }))
}

pub fn cmd_analyze(
    config_path: &Path,
    trajectory_path: &Path,
    out_dir: &Path,
    ov: &Overrides,
) -> Result<(), CliError> {
    let config: ExperimentConfig = read_config(config_path)?;
    let strategy = effective_strategy(&config, ov);
    let trajectory = parse_trajectory_csv(trajectory_path, strategy)?;
    let descriptor = match ov.seed {
        Some(seed) => config.instance.with_seed(seed),
        None => config.instance.clone(),
    };
    let problem = descriptor.build()?;

    let requests: Vec<CertificateRequest> = if config.certificates.is_empty() {
        vec![CertificateRequest::Theoretical { case: descriptor.default_case_name() }]
    } else {
        config.certificates.clone()
    };
    let mut entries = Vec::new();
    for request in &requests {
        let cert = request.realize(&problem)?;
        entries.push(certificate_json(&cert, &trajectory)?);
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "problem_id": problem.id,
        "strategy": strategy.label(),
        "certificates": entries,
    });
    write_out(
        &out_dir.join("certificates.json"),
        &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()),
    )
}

pub fn cmd_invariance(
    config_path: &Path,
    out_dir: &Path,
    ov: &Overrides,
) -> Result<(), CliError> {
    let config: ExperimentConfig = read_config(config_path)?;
    let problem = config.instance.build()?;
    let strategy = effective_strategy(&config, ov);
    let rep = Reparametrization::random(problem.dim, ov.seed.unwrap_or(0))?;
    let x0 = config.x0.resolve(&problem);
    let iters = ov.max_iters.or(config.max_iters).unwrap_or(200);
    let (report, _, _) = paired_run(&problem, &rep, strategy.build()?, &x0, iters)?;

    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "problem_id": problem.id,
        "strategy": strategy.label(),
        "rep_seed": ov.seed.unwrap_or(0),
        "condition": fmt17(report.condition),
        "condition_limited": report.condition_limited,
        "note": if report.condition_limited {
            Some("condition > 1e3: tolerances are condition-scaled and weakly binding")
        } else {
            None
        },
        "iterations": report.iterations,
        "max_gap_deviation": fmt17(report.max_gap_deviation),
        "max_best_gap_deviation": fmt17(report.max_best_gap_deviation),
        "max_theta_deviation": fmt17(report.max_theta_deviation),
        "max_iterate_deviation": fmt17(report.max_iterate_deviation),
        "pass": report.pass,
    });
    write_out(
        &out_dir.join("invariance.json"),
        &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()),
    )
}

struct SweepRow {
    instance: String,
    strategy: String,
    cells: [String; 7],
}

fn sweep_cell(
    config: &SweepConfig,
    instance: &crate::config::InstanceDescriptor,
    strategy: StrategyDescriptor,
    seed: u64,
) -> SweepRow {
    let descriptor = instance.with_seed(seed);
    let label = strategy.label();
    match sweep_cell_inner(config, &descriptor, strategy) {
        Ok(row) => row,
        Err(e) => SweepRow {
            instance: format!("{descriptor:?}"),
            strategy: label,
            cells: [
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("error: {e}"),
            ],
        },
    }
}

fn sweep_cell_inner(
    config: &SweepConfig,
    descriptor: &crate::config::InstanceDescriptor,
    strategy: StrategyDescriptor,
) -> Result<SweepRow, CliError> {
    let problem = descriptor.build()?;
    let x0 = config.x0.resolve(&problem);
    let max_iters = config.max_iters.unwrap_or(2000);
    let gap_tol = config.gap_tol.unwrap_or(0.0);
    let trajectory =
        condgrad::solver::run(&problem, strategy.build()?, &x0, max_iters, gap_tol)?;

    let cert = condgrad::analysis::theoretical_growth_constant(
        &problem.metadata,
        descriptor.default_case(),
    )?;
    let which = if cert.kind == GrowthKind::WeakGrowth {
        SeriesKind::Subopt
    } else {
        SeriesKind::Gap
    };
    let envelope_pass = match check_certificate(&trajectory, &cert, which) {
        Ok(report) => {
            if report.pass {
                "pass".to_string()
            } else {
                format!("fail@{}", report.first_failing_k.unwrap_or(0))
            }
        }
        Err(e) => format!("error: {e}"),
    };

    let kind = match cert.kind {
        GrowthKind::Growth => condgrad::analysis::EmpiricalKind::Growth,
        GrowthKind::WeakGrowth => condgrad::analysis::EmpiricalKind::WeakGrowth,
        GrowthKind::LocalGrowth => condgrad::analysis::EmpiricalKind::LocalGrowth {
            epsilon: cert.epsilon.unwrap_or(1.0),
        },
    };
    let samples = problem.sample_domain(2000, 0xC0FFEE);
    let m_emp = condgrad::analysis::empirical_growth_constant(
        &problem, kind, cert.q, cert.r, &samples, 4,
    )
    .ok()
    .map(|c| c.m);

    let series = match which {
        SeriesKind::Gap => trajectory.best_gaps(),
        SeriesKind::Subopt => trajectory.suboptimalities().unwrap_or_default(),
    };
    let (order, factor) = fit_diagnostics(&series);
    Ok(SweepRow {
        instance: trajectory.problem_id.clone(),
        strategy: strategy.label(),
        cells: [
            fmt17(cert.q),
            fmt17(cert.r),
            fmt17(cert.m),
            fmt_opt(m_emp),
            fmt_opt(order),
            fmt_opt(factor),
            envelope_pass,
        ],
    })
}

pub fn cmd_sweep(config_path: &Path, out_dir: &Path, ov: &Overrides) -> Result<(), CliError> {
    let config: SweepConfig = read_config(config_path)?;
    if config.instances.is_empty() || config.strategies.is_empty() || config.seeds.is_empty() {
        return Err(CliError::Usage(
            "sweep grid must name at least one instance, strategy, and seed".into(),
        ));
    }
    let mut cells: Vec<(&crate::config::InstanceDescriptor, StrategyDescriptor, u64)> =
        Vec::new();
    for instance in &config.instances {
        for strategy in &config.strategies {
            let strategy = ov.strategy.unwrap_or(*strategy);
            for &seed in &config.seeds {
                cells.push((instance, strategy, seed));
            }
        }
    }
    use rayon::prelude::*;
    let rows: Vec<SweepRow> = cells
        .par_iter()
        .map(|(instance, strategy, seed)| sweep_cell(&config, instance, *strategy, *seed))
        .collect();

    let mut out = format!("# schema_version {SCHEMA_VERSION}\n");
    out.push_str(
        "instance,strategy,q,r,m_theoretical,m_emp,fitted_order,fitted_linear_factor,envelope_pass\n",
    );
    for row in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            csv_field(&row.instance),
            csv_field(&row.strategy),
            row.cells
                .iter()
                .map(|c| csv_field(c))
                .collect::<Vec<_>>()
                .join(","),
        ));
    }
    write_out(&out_dir.join("sweep.csv"), &out)
}

pub fn out_dir_of(out: &Option<PathBuf>) -> PathBuf {
    out.clone().unwrap_or_else(|| PathBuf::from("."))
}
