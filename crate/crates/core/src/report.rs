//! Experiment reports: parameter table, metric rows, threshold checks and
//! plot-ready series.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Some schedule indices failed to run.
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Threshold {
    AtMost {
        limit: f64,
    },
    AtLeast {
        limit: f64,
    },
    Within {
        lo: f64,
        hi: f64,
    },
    /// Boolean property encoded as 1 (holds) or 0.
    Holds,
}

impl Threshold {
    pub fn at_most(limit: f64) -> Self {
        Self::AtMost { limit }
    }

    pub fn at_least(limit: f64) -> Self {
        Self::AtLeast { limit }
    }

    pub fn within(lo: f64, hi: f64) -> Self {
        Self::Within { lo, hi }
    }

    pub fn admits(&self, value: f64) -> bool {
        match *self {
            Self::AtMost { limit } => value <= limit,
            Self::AtLeast { limit } => value >= limit,
            Self::Within { lo, hi } => (lo..=hi).contains(&value),
            Self::Holds => value == 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: Threshold,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, threshold: Threshold) -> Self {
        Self {
            name: name.into(),
            value,
            passed: threshold.admits(value),
            threshold,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, Threshold::Holds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    /// Parameter key, e.g. `lambda=32`.
    pub key: String,
    pub metrics: BTreeMap<String, f64>,
}

impl MetricRow {
    pub fn new(key: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            metrics: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.metrics.insert(name.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    Linear,
    LogLog,
    /// Logarithmic y axis only.
    SemiLogY,
}

/// Columns of equal length; the first column is the abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub plot: PlotKind,
    /// Fitted power law `prefactor * x^exponent` to overlay, if any.
    pub fit: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub code_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub parameters: BTreeMap<String, String>,
    pub rows: Vec<MetricRow>,
    pub checks: Vec<Check>,
    pub series: Vec<Series>,
    pub status: Status,
    pub provenance: Provenance,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            parameters: BTreeMap::new(),
            rows: Vec::new(),
            checks: Vec::new(),
            series: Vec::new(),
            status: Status::Pass,
            provenance: Provenance::default(),
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, name: &str, value: impl ToString) {
        self.parameters.insert(name.to_string(), value.to_string());
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
        self.refresh_status();
    }

    /// Pass when every check passes; a partial status is kept.
    pub fn refresh_status(&mut self) {
        if self.status == Status::Partial {
            return;
        }
        self.status = if self.checks.iter().all(|c| c.passed) {
            Status::Pass
        } else {
            Status::Fail
        };
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn metric(&self, key: &str, name: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.key == key)
            .and_then(|r| r.metrics.get(name).copied())
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}
