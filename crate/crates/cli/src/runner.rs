use std::path::{Path, PathBuf};

use hypwave_core::acceptance::{self, Outcome};
use hypwave_core::experiments::{diagnostic_series, run_experiment, Settings};
use hypwave_core::report::{ExperimentReport, MetricRow, Provenance, Status};
use hypwave_core::solver::{evolve_with, make_state, Diagnostics, SolverOptions};
use hypwave_core::{make_radial_grid, HypError};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{emit_plots, ensure_dir, write_report, write_series, PlotOutput};

/// Rows kept in `diagnostics.csv`, roughly.
const DIAGNOSTIC_ROWS: usize = 1000;

pub const WORKERS_VAR: &str = "HYPWAVE_WORKERS";

#[derive(Debug)]
pub struct RunOutput {
    pub report: ExperimentReport,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

fn provenance(config: &RunConfig) -> Provenance {
    Provenance {
        config_hash: config.hash(),
        code_version: format!("hypwave {}", env!("CARGO_PKG_VERSION")),
    }
}

fn context(experiment: &str) -> impl FnOnce(HypError) -> CliError + '_ {
    move |source| CliError::Run {
        experiment: experiment.to_string(),
        source,
    }
}

/// The baseline evolution of the configured data and equation with every
/// diagnostic channel, on `[0, r_max]` with spacing `h`.
pub fn baseline(config: &RunConfig) -> Result<(MetricRow, hypwave_core::report::Series)> {
    let ctx = context(&config.experiment);
    let n = (config.r_max / config.h).round();
    let grid = make_radial_grid(config.equation.geometry, n * config.h, config.h)
        .map_err(|e| CliError::config("grid.h", e.to_string()))?;
    let state = make_state(&config.data, &config.equation, &grid)
        .map_err(|e| CliError::config("data", e.to_string()))?;
    let options = SolverOptions {
        cfl: config.cfl,
        ..Default::default()
    };
    let traj = evolve_with(
        &state,
        config.t_final,
        usize::MAX,
        &Diagnostics::all(),
        &options,
    )
    .map_err(ctx)?;
    let every = (traj.times.len() / DIAGNOSTIC_ROWS).max(1);
    let row = MetricRow::new("baseline")
        .with("h", config.h)
        .with("r_max", grid.r_max)
        .with("t_final", config.t_final)
        .with("steps", traj.steps as f64)
        .with("energy_drift", traj.energy_drift().unwrap_or(f64::NAN));
    Ok((row, diagnostic_series("diagnostics", &traj, every)))
}

fn write_all(dir: &Path, report: &ExperimentReport, combined: bool) -> Result<RunOutput> {
    ensure_dir(dir)?;
    let mut files = Vec::new();
    for s in &report.series {
        files.push(write_series(dir, s)?);
    }
    files.push(write_report(dir, report)?);
    let PlotOutput {
        files: plots,
        warnings,
    } = emit_plots(report, dir, combined)?;
    files.extend(plots);
    Ok(RunOutput {
        report: report.clone(),
        files,
        warnings,
    })
}

/// Runs the configured experiment plus the baseline diagnostic run, then
/// writes `diagnostics.csv`, one CSV per series, `report.json` and plot
/// scripts under the output directory.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let mut report = run_experiment(&config.experiment, &config.settings)
        .map_err(context(&config.experiment))?;
    let (row, series) = baseline(config)?;
    report.rows.push(row);
    report.series.insert(0, series);
    report.provenance = provenance(config);
    write_all(&config.output, &report, false)
}

/// Number of sweep workers: `HYPWAVE_WORKERS` if set, else the available
/// parallelism.
pub fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::config(
                WORKERS_VAR,
                format!("`{v}` is not a positive integer"),
            )),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Merges per-index reports in schedule order. Failed indices are noted and
/// mark the result partial.
pub fn merge(
    experiment: &str,
    schedule: &[f64],
    results: Vec<std::result::Result<ExperimentReport, HypError>>,
) -> ExperimentReport {
    let mut merged = ExperimentReport::new(experiment);
    merged.param(
        "schedule",
        schedule
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    let mut failed = false;
    for (i, (v, result)) in schedule.iter().zip(results).enumerate() {
        match result {
            Ok(r) => {
                for row in r.rows {
                    merged.rows.push(row.with("schedule_value", *v));
                }
                for mut c in r.checks {
                    c.name = format!("{}@{v}", c.name);
                    merged.checks.push(c);
                }
                for mut s in r.series {
                    s.name = format!("{}@{v}", s.name);
                    merged.series.push(s);
                }
                merged
                    .notes
                    .extend(r.notes.into_iter().map(|n| format!("[{v}] {n}")));
                if r.status == Status::Partial {
                    failed = true;
                }
            }
            Err(e) => {
                failed = true;
                merged
                    .notes
                    .push(format!("index {i} (value {v}) failed: {e}"));
            }
        }
    }
    if failed {
        merged.status = Status::Partial;
    }
    merged.refresh_status();
    merged
}

/// Runs the experiment once per schedule value on a pool of
/// [`worker_count`] threads and merges the reports in schedule order.
pub fn sweep(config: &RunConfig) -> Result<RunOutput> {
    let schedule = config
        .schedule
        .clone()
        .ok_or_else(|| CliError::config("schedule.values", "sweep needs a schedule"))?;
    if schedule.is_empty() {
        return Err(CliError::config("schedule.values", "schedule is empty"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count()?)
        .build()
        .map_err(|e| CliError::config(WORKERS_VAR, e.to_string()))?;
    let results: Vec<_> = pool.install(|| {
        schedule
            .par_iter()
            .map(|&v| {
                let settings = Settings {
                    schedule: Some(vec![v]),
                    ..config.settings.clone()
                };
                run_experiment(&config.experiment, &settings)
            })
            .collect()
    });
    let mut report = merge(&config.experiment, &schedule, results);
    report.provenance = provenance(config);
    write_all(&config.output, &report, true)
}

/// Runs acceptance criterion `id`; with `output`, also writes each
/// experiment's report under `output/<experiment>/`.
pub fn check(id: u32, output: Option<&Path>) -> Result<Outcome> {
    acceptance::criterion(id).map_err(|e| CliError::config("criterion", e.to_string()))?;
    let outcome = acceptance::check(id).map_err(|source| CliError::Run {
        experiment: format!("criterion {id}"),
        source,
    })?;
    if let Some(dir) = output {
        for r in &outcome.reports {
            write_all(&dir.join(&r.experiment), r, false)?;
        }
    }
    Ok(outcome)
}

/// Fast criteria exercised by `selftest`.
pub const SELFTEST_CRITERIA: [u32; 3] = [1, 6, 9];

#[derive(Debug)]
pub struct SelftestLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Cheap end-to-end checks: config parsing, a deterministic baseline run and
/// the fast acceptance criteria.
pub fn selftest() -> Vec<SelftestLine> {
    let mut lines = Vec::new();
    let parsed = crate::config::parse_config_str(
        "experiment = \"energy_conservation\"\n[time]\nt_final = 1.0\n[grid]\nh = 0.02\n",
    );
    let bad = crate::config::parse_config_str("experiment = \"heat_kernel\"\n[time]\ncfl = 1.5\n");
    lines.push(SelftestLine {
        name: "config".into(),
        passed: parsed.is_ok() && bad.as_ref().err().and_then(|e| e.key()) == Some("time.cfl"),
        detail: match &parsed {
            Ok(c) => format!("defaults resolved, r_max = {:.3}", c.r_max),
            Err(e) => e.to_string(),
        },
    });
    if let Ok(config) = &parsed {
        let a = baseline(config);
        let b = baseline(config);
        let (passed, detail) = match (a, b) {
            (Ok((_, sa)), Ok((_, sb))) => {
                let same =
                    crate::output::series_csv(&sa).ok() == crate::output::series_csv(&sb).ok();
                (same, format!("{} rows", sa.rows.len()))
            }
            (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
        };
        lines.push(SelftestLine {
            name: "deterministic baseline".into(),
            passed,
            detail,
        });
    }
    for id in SELFTEST_CRITERIA {
        match acceptance::check(id) {
            Ok(o) => lines.push(SelftestLine {
                name: format!("criterion {id}"),
                passed: o.passed(),
                detail: o.line(),
            }),
            Err(e) => lines.push(SelftestLine {
                name: format!("criterion {id}"),
                passed: false,
                detail: e.to_string(),
            }),
        }
    }
    lines
}
