//! Named experiments. Each takes [`Settings`] (overrides on top of built-in
//! defaults) and returns an [`ExperimentReport`] whose checks use the
//! acceptance thresholds unless a tolerance is overridden by name.

mod heat;
mod profile;
mod waves;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::report::{ExperimentReport, PlotKind, Series};
use crate::solver::{channel, strichartz_running, DataSpec, EquationSpec, Trajectory};

pub use heat::{heat_kernel, littlewood_paley, refined_sobolev, spectral_gap};
pub use profile::{
    euclidean_approx, large_data, profile_extraction, pythagorean, small_data_scattering,
    traveling_forcing,
};
pub use waves::{
    dispersive_decay, energy_conservation, identities, local_energy_decay, morawetz, multipliers,
    strichartz_admissibility,
};

/// Overrides shared by all experiments; `None` keeps the experiment's default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub h: Option<f64>,
    pub r_max: Option<f64>,
    pub t_final: Option<f64>,
    pub cfl: Option<f64>,
    pub equation: Option<EquationSpec>,
    pub data: Option<DataSpec>,
    /// The swept parameter (λ, ρ, δ, ... depending on the experiment).
    pub schedule: Option<Vec<f64>>,
    pub seed: u64,
    /// Threshold overrides keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
}

impl Settings {
    pub fn h_or(&self, default: f64) -> f64 {
        self.h.unwrap_or(default)
    }

    pub fn t_or(&self, default: f64) -> f64 {
        self.t_final.unwrap_or(default)
    }

    pub fn schedule_or(&self, default: &[f64]) -> Result<Vec<f64>> {
        match &self.schedule {
            Some(s) if s.is_empty() => Err(invalid("schedule", "schedule is empty")),
            Some(s) => Ok(s.clone()),
            None => Ok(default.to_vec()),
        }
    }

    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn data_or(&self, default: DataSpec) -> DataSpec {
        self.data.clone().unwrap_or(default)
    }
}

pub type Runner = fn(&Settings) -> Result<ExperimentReport>;

/// Registered experiments in a fixed order.
pub const EXPERIMENTS: &[(&str, Runner)] = &[
    ("heat_kernel", heat_kernel),
    ("spectral_gap", spectral_gap),
    ("littlewood_paley", littlewood_paley),
    ("refined_sobolev", refined_sobolev),
    ("dispersive_decay", dispersive_decay),
    ("strichartz_admissibility", strichartz_admissibility),
    ("energy_conservation", energy_conservation),
    ("morawetz", morawetz),
    ("multipliers", multipliers),
    ("identities", identities),
    ("local_energy_decay", local_energy_decay),
    ("euclidean_approx", euclidean_approx),
    ("traveling_forcing", traveling_forcing),
    ("pythagorean", pythagorean),
    ("profile_extraction", profile_extraction),
    ("small_data_scattering", small_data_scattering),
    ("large_data", large_data),
];

pub fn experiment_names() -> Vec<&'static str> {
    EXPERIMENTS.iter().map(|(n, _)| *n).collect()
}

pub fn lookup(name: &str) -> Option<Runner> {
    EXPERIMENTS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| *f)
}

/// Runs a registered experiment and stamps its parameters.
pub fn run_experiment(name: &str, settings: &Settings) -> Result<ExperimentReport> {
    let runner = lookup(name).ok_or_else(|| {
        invalid(
            "experiment",
            format!(
                "unknown experiment `{name}`; known: {}",
                experiment_names().join(", ")
            ),
        )
    })?;
    let start = Instant::now();
    let mut report = runner(settings)?;
    report.param("seed", settings.seed);
    report
        .notes
        .push(format!("wall time {:.2} s", start.elapsed().as_secs_f64()));
    Ok(report)
}

/// Column names of the per-run diagnostic series.
pub const DIAGNOSTIC_COLUMNS: [&str; 9] = [
    "t",
    "energy_EV",
    "energy_nl",
    "l2",
    "l6",
    "l10",
    "strichartz_accum_5_10",
    "morawetz_accum",
    "led_accum",
];

/// Dense channels of a trajectory in the fixed column order; missing
/// channels are written as NaN. Every `every`-th step is kept.
pub fn diagnostic_series(name: &str, traj: &Trajectory, every: usize) -> Series {
    let n = traj.times.len();
    let nan = vec![f64::NAN; n];
    let pick = |c: &str| traj.channels.get(c).cloned().unwrap_or_else(|| nan.clone());
    let running = |c: &'static str| traj.running_integral(c).unwrap_or_else(|_| nan.clone());
    let strich = strichartz_running(traj, 5.0, 10.0).unwrap_or_else(|_| nan.clone());
    let cols = [
        traj.times.clone(),
        pick(channel::ENERGY_V),
        pick(channel::ENERGY_NL),
        pick("l2"),
        pick("l6"),
        pick("l10"),
        strich,
        running(channel::MORAWETZ_SEXTIC),
        running(channel::LED),
    ];
    let every = every.max(1);
    let mut rows: Vec<Vec<f64>> = (0..n)
        .step_by(every)
        .map(|k| cols.iter().map(|c| c[k]).collect())
        .collect();
    if n > 0 && !(n - 1).is_multiple_of(every) {
        rows.push(cols.iter().map(|c| c[n - 1]).collect());
    }
    Series {
        name: name.to_string(),
        columns: DIAGNOSTIC_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
        plot: PlotKind::Linear,
        fit: None,
    }
}

/// A two-or-more column series from parallel vectors.
pub(crate) fn table(name: &str, columns: &[&str], data: &[&[f64]], plot: PlotKind) -> Series {
    let n = data.iter().map(|c| c.len()).min().unwrap_or(0);
    Series {
        name: name.to_string(),
        columns: columns.iter().map(|s| s.to_string()).collect(),
        rows: (0..n)
            .map(|k| data.iter().map(|c| c[k]).collect())
            .collect(),
        plot,
        fit: None,
    }
}

/// Uniform grid spacing `h` with `r_max` rounded up to a multiple of `h`.
pub(crate) fn grid_up(
    geometry: crate::geom::Geometry,
    r_max: f64,
    h: f64,
) -> Result<crate::geom::RadialGrid> {
    let n = (r_max / h).ceil();
    crate::geom::make_radial_grid(geometry, n * h, h)
}

/// Snapshot time closest to `t`.
pub(crate) fn nearest_snapshot(traj: &Trajectory, t: f64) -> f64 {
    traj.snapshots
        .iter()
        .map(|s| s.time())
        .min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()))
        .unwrap_or(0.0)
}
