//! TOML run configuration.
//!
//! ```toml
//! experiment = "dispersive_decay"
//! output = "out/dispersive"   # default hypwave-out/<experiment>
//! seed = 0
//!
//! [geometry]
//! kind = "hyperbolic"         # or "euclidean"
//! mass_shift = 0.0
//!
//! [equation]
//! nonlinearity = "none"       # or "quintic"
//! potential_amplitude = 1.0   # repulsive bump, with potential_radius
//! potential_radius = 2.0
//!
//! [grid]
//! h = 0.005
//! r_max = 30.0                # auto-sized when absent
//!
//! [time]
//! t_final = 10.0
//! cfl = 0.9
//!
//! [data]
//! generator = "gaussian"      # zero | gaussian | polynomial | sech
//! amplitude = 1.0
//! width = 1.0
//!
//! [schedule]
//! values = [8.0, 32.0, 128.0]
//!
//! [tolerances]
//! order = 1.5
//! ```
//!
//! Keys under `[grid]`, `[time]`, `[geometry]`, `[equation]` and `[data]`
//! override the experiment's own defaults only when present. The resolved
//! `h`, `cfl`, `t_final` and `r_max` always drive the baseline diagnostic
//! run written to `diagnostics.csv`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hypwave_core::experiments::{lookup, Settings};
use hypwave_core::solver::{
    make_state, DataSpec, EquationSpec, Generator, Nonlinearity, PotentialSpec, DEFAULT_CFL,
};
use hypwave_core::{make_radial_grid, Geometry};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const DEFAULT_H: f64 = 0.005;
pub const DEFAULT_T_FINAL: f64 = 10.0;
/// Added to the support radii and the final time when sizing the domain.
pub const R_MARGIN: f64 = 2.0;

#[derive(Debug, Default, Deserialize)]
struct RawConfig {
    experiment: Option<String>,
    output: Option<PathBuf>,
    #[serde(default)]
    seed: u64,
    geometry: Option<RawGeometry>,
    equation: Option<RawEquation>,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    time: RawTime,
    data: Option<RawData>,
    schedule: Option<RawSchedule>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum GeometryKind {
    #[default]
    Hyperbolic,
    Euclidean,
}

#[derive(Debug, Default, Deserialize)]
struct RawGeometry {
    #[serde(default)]
    kind: GeometryKind,
    #[serde(default)]
    mass_shift: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawNonlinearity {
    #[default]
    None,
    Quintic,
}

#[derive(Debug, Default, Deserialize)]
struct RawEquation {
    #[serde(default)]
    nonlinearity: RawNonlinearity,
    potential_amplitude: Option<f64>,
    potential_radius: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
struct RawGrid {
    h: Option<f64>,
    r_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
struct RawTime {
    t_final: Option<f64>,
    cfl: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum GeneratorKind {
    Zero,
    Gaussian,
    Polynomial,
    Sech,
}

#[derive(Debug, Deserialize)]
struct RawData {
    generator: GeneratorKind,
    amplitude: Option<f64>,
    width: Option<f64>,
    center: Option<f64>,
    radius: Option<f64>,
    power: Option<u32>,
    rate: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct RawSchedule {
    values: Vec<f64>,
}

/// A validated configuration with defaults applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: String,
    #[serde(skip)]
    pub output: PathBuf,
    pub seed: u64,
    pub equation: EquationSpec,
    pub data: DataSpec,
    pub h: f64,
    pub cfl: f64,
    pub t_final: f64,
    /// Domain radius of the baseline run.
    pub r_max: f64,
    pub schedule: Option<Vec<f64>>,
    pub tolerances: BTreeMap<String, f64>,
    /// Overrides handed to the experiment.
    pub settings: Settings,
}

impl RunConfig {
    /// SHA-256 of the resolved configuration (output directory excluded).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let mut unknown = Vec::new();
    let de = toml::Deserializer::new(text);
    let mut note = |path: serde_ignored::Path<'_>| unknown.push(path.to_string());
    let tracked = serde_ignored::Deserializer::new(de, &mut note);
    let raw: RawConfig = serde_path_to_error::deserialize(tracked).map_err(|e| {
        let key = e.path().to_string();
        let key = if key == "." { "config".into() } else { key };
        CliError::config(key, e.into_inner().message().trim().to_string())
    })?;
    if let Some(key) = unknown.into_iter().next() {
        return Err(CliError::config(key, "unknown key"));
    }
    resolve(raw)
}

fn positive(key: &str, v: Option<f64>) -> Result<Option<f64>> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::config(
            key,
            format!("{x} must be positive and finite"),
        )),
        other => Ok(other),
    }
}

fn finite(key: &str, v: Option<f64>) -> Result<Option<f64>> {
    match v {
        Some(x) if !x.is_finite() => Err(CliError::config(key, "must be finite")),
        other => Ok(other),
    }
}

fn resolve(raw: RawConfig) -> Result<RunConfig> {
    let experiment = raw
        .experiment
        .ok_or_else(|| CliError::config("experiment", "missing"))?;
    if lookup(&experiment).is_none() {
        return Err(CliError::config(
            "experiment",
            format!(
                "unknown experiment `{experiment}`; known: {}",
                hypwave_core::experiments::experiment_names().join(", ")
            ),
        ));
    }

    let h = positive("grid.h", raw.grid.h)?;
    let r_max = positive("grid.r_max", raw.grid.r_max)?;
    let t_final = positive("time.t_final", raw.time.t_final)?;
    let cfl = positive("time.cfl", raw.time.cfl)?;
    if let Some(c) = cfl {
        if c > DEFAULT_CFL {
            return Err(CliError::config(
                "time.cfl",
                format!("{c} exceeds the stability limit {DEFAULT_CFL}"),
            ));
        }
    }

    let geometry = match &raw.geometry {
        None => Geometry::hyperbolic(),
        Some(g) => {
            let mu = finite("geometry.mass_shift", Some(g.mass_shift))?.unwrap_or(0.0);
            let base = match g.kind {
                GeometryKind::Hyperbolic => Geometry::hyperbolic(),
                GeometryKind::Euclidean => Geometry::euclidean(),
            };
            let geometry = base.with_mass_shift(mu);
            geometry
                .validate()
                .map_err(|e| CliError::config("geometry.mass_shift", e.to_string()))?;
            geometry
        }
    };
    let equation = build_equation(geometry, raw.equation.as_ref())?;
    let data = match &raw.data {
        Some(d) => build_data(d)?,
        None => DataSpec::position(Generator::gaussian(1.0, 1.0)),
    };

    let schedule = match raw.schedule {
        None => None,
        Some(s) if s.values.is_empty() => {
            return Err(CliError::config("schedule.values", "schedule is empty"))
        }
        Some(s) => {
            if s.values.iter().any(|v| !v.is_finite()) {
                return Err(CliError::config("schedule.values", "values must be finite"));
            }
            Some(s.values)
        }
    };
    for (name, v) in &raw.tolerances {
        finite(&format!("tolerances.{name}"), Some(*v))?;
    }

    let resolved_h = h.unwrap_or(DEFAULT_H);
    let resolved_t = t_final.unwrap_or(DEFAULT_T_FINAL);
    let needed = data_support(&data, &equation)? + equation.potential_support() + resolved_t;
    let resolved_r = match r_max {
        Some(r) if r < needed => {
            return Err(CliError::config(
                "grid.r_max",
                format!("{r} is below supp(data) + supp(V) + T = {needed:.4}"),
            ))
        }
        Some(r) => r,
        None => needed + R_MARGIN,
    };
    // rounded up to a whole number of intervals
    let resolved_r = (resolved_r / resolved_h).ceil() * resolved_h;
    let grid = make_radial_grid(geometry, resolved_r, resolved_h)
        .map_err(|e| CliError::config("grid.h", e.to_string()))?;
    make_state(&data, &equation, &grid).map_err(|e| CliError::config("data", e.to_string()))?;

    let settings = Settings {
        h,
        r_max,
        t_final,
        cfl,
        equation: (raw.geometry.is_some() || raw.equation.is_some()).then(|| equation.clone()),
        data: raw.data.is_some().then(|| data.clone()),
        schedule: schedule.clone(),
        seed: raw.seed,
        tolerances: raw.tolerances.clone(),
    };
    Ok(RunConfig {
        output: raw
            .output
            .unwrap_or_else(|| Path::new("hypwave-out").join(&experiment)),
        experiment,
        seed: raw.seed,
        equation,
        data,
        h: resolved_h,
        cfl: cfl.unwrap_or(DEFAULT_CFL),
        t_final: resolved_t,
        r_max: resolved_r,
        schedule,
        tolerances: raw.tolerances,
        settings,
    })
}

fn build_equation(geometry: Geometry, raw: Option<&RawEquation>) -> Result<EquationSpec> {
    let Some(raw) = raw else {
        return Ok(EquationSpec::linear(geometry));
    };
    let mut eq = match raw.nonlinearity {
        RawNonlinearity::None => EquationSpec::linear(geometry),
        RawNonlinearity::Quintic => EquationSpec {
            nonlinearity: Nonlinearity::DefocusingQuintic,
            ..EquationSpec::linear(geometry)
        },
    };
    match (raw.potential_amplitude, raw.potential_radius) {
        (None, None) => {}
        (Some(_), None) => {
            return Err(CliError::config(
                "equation.potential_radius",
                "required with potential_amplitude",
            ))
        }
        (None, Some(_)) => {
            return Err(CliError::config(
                "equation.potential_amplitude",
                "required with potential_radius",
            ))
        }
        (Some(a), Some(r)) => {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(CliError::config(
                    "equation.potential_amplitude",
                    format!("{a} must be >= 0 (repulsive bump)"),
                ));
            }
            positive("equation.potential_radius", Some(r))?;
            eq = eq.with_potential(PotentialSpec::repulsive_bump(a, r));
        }
    }
    Ok(eq)
}

fn build_data(raw: &RawData) -> Result<DataSpec> {
    let unused = |key: &str, present: bool| -> Result<()> {
        if present {
            Err(CliError::config(
                format!("data.{key}"),
                format!("not used by generator {:?}", raw.generator).to_lowercase(),
            ))
        } else {
            Ok(())
        }
    };
    let amplitude = finite("data.amplitude", raw.amplitude)?.unwrap_or(1.0);
    let g = match raw.generator {
        GeneratorKind::Zero => {
            unused("amplitude", raw.amplitude.is_some())?;
            unused("width", raw.width.is_some())?;
            unused("center", raw.center.is_some())?;
            unused("radius", raw.radius.is_some())?;
            unused("power", raw.power.is_some())?;
            unused("rate", raw.rate.is_some())?;
            Generator::Zero
        }
        GeneratorKind::Gaussian => {
            unused("radius", raw.radius.is_some())?;
            unused("power", raw.power.is_some())?;
            unused("rate", raw.rate.is_some())?;
            let center = finite("data.center", raw.center)?.unwrap_or(0.0);
            if center < 0.0 {
                return Err(CliError::config("data.center", "must be >= 0"));
            }
            Generator::GaussianBump {
                amplitude,
                width: positive("data.width", raw.width)?.unwrap_or(1.0),
                center,
            }
        }
        GeneratorKind::Polynomial => {
            unused("width", raw.width.is_some())?;
            unused("center", raw.center.is_some())?;
            unused("rate", raw.rate.is_some())?;
            Generator::SmoothCutoffPolynomial {
                amplitude,
                radius: positive("data.radius", raw.radius)?.unwrap_or(1.0),
                power: raw.power.unwrap_or(4),
            }
        }
        GeneratorKind::Sech => {
            unused("width", raw.width.is_some())?;
            unused("center", raw.center.is_some())?;
            unused("power", raw.power.is_some())?;
            Generator::SechProfile {
                amplitude,
                rate: positive("data.rate", raw.rate)?.unwrap_or(1.0),
                radius: positive("data.radius", raw.radius)?.unwrap_or(6.0),
            }
        }
    };
    Ok(DataSpec::position(g))
}

/// Radius beyond which the data is below `1e-12` of its peak, measured on a
/// coarse probe grid.
fn data_support(data: &DataSpec, equation: &EquationSpec) -> Result<f64> {
    let probe = make_radial_grid(equation.geometry, 40.0, 0.05)
        .map_err(|e| CliError::config("geometry", e.to_string()))?;
    let state =
        make_state(data, equation, &probe).map_err(|e| CliError::config("data", e.to_string()))?;
    Ok(state.support_radius(1e-12))
}
