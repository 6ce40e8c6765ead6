//! Acceptance criteria as named groups of experiments run at default
//! settings.

use crate::error::{invalid, Result};
use crate::experiments::{run_experiment, Settings};
use crate::report::{Check, ExperimentReport, Threshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub experiments: &'static [&'static str],
}

pub const CRITERIA: [Criterion; 15] = [
    Criterion {
        id: 1,
        title: "heat kernel consistency",
        experiments: &["heat_kernel"],
    },
    Criterion {
        id: 2,
        title: "spectral-gap heat decay",
        experiments: &["spectral_gap"],
    },
    Criterion {
        id: 3,
        title: "Littlewood-Paley cross-validation",
        experiments: &["littlewood_paley"],
    },
    Criterion {
        id: 4,
        title: "refined Sobolev uniformity",
        experiments: &["refined_sobolev"],
    },
    Criterion {
        id: 5,
        title: "dispersive decay",
        experiments: &["dispersive_decay"],
    },
    Criterion {
        id: 6,
        title: "Strichartz admissibility",
        experiments: &["strichartz_admissibility"],
    },
    Criterion {
        id: 7,
        title: "energy conservation and reversibility",
        experiments: &["energy_conservation"],
    },
    Criterion {
        id: 8,
        title: "Morawetz identity and bound",
        experiments: &["morawetz"],
    },
    Criterion {
        id: 9,
        title: "multiplier bounds",
        experiments: &["multipliers"],
    },
    Criterion {
        id: 10,
        title: "local energy decay",
        experiments: &["local_energy_decay"],
    },
    Criterion {
        id: 11,
        title: "euclidean approximation",
        experiments: &["euclidean_approx"],
    },
    Criterion {
        id: 12,
        title: "traveling forcing decay",
        experiments: &["traveling_forcing"],
    },
    Criterion {
        id: 13,
        title: "Pythagorean energy",
        experiments: &["pythagorean"],
    },
    Criterion {
        id: 14,
        title: "profile extraction",
        experiments: &["profile_extraction"],
    },
    Criterion {
        id: 15,
        title: "scattering proxies",
        experiments: &["small_data_scattering", "large_data"],
    },
];

pub fn criterion(id: u32) -> Result<&'static Criterion> {
    CRITERIA.iter().find(|c| c.id == id).ok_or_else(|| {
        invalid(
            "criterion",
            format!("unknown criterion {id}; expected 1..=15"),
        )
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub criterion: Criterion,
    pub reports: Vec<ExperimentReport>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed())
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.reports
            .iter()
            .flat_map(|r| r.checks.iter())
            .filter(|c| !c.passed)
            .collect()
    }

    /// `criterion 11 (euclidean approximation): FAIL lambda_order = ...`.
    pub fn line(&self) -> String {
        let head = format!(
            "criterion {:>2} ({}): {}",
            self.criterion.id,
            self.criterion.title,
            if self.passed() { "PASS" } else { "FAIL" }
        );
        let shown: Vec<String> = if self.passed() {
            self.reports
                .iter()
                .flat_map(|r| r.checks.iter())
                .filter(|c| c.threshold != Threshold::Holds)
                .take(3)
                .map(describe)
                .collect()
        } else {
            self.failed_checks().into_iter().map(describe).collect()
        };
        if shown.is_empty() {
            head
        } else {
            format!("{head}  [{}]", shown.join("; "))
        }
    }
}

fn describe(c: &Check) -> String {
    let bound = match c.threshold {
        Threshold::AtMost { limit } => format!("<= {limit:e}"),
        Threshold::AtLeast { limit } => format!(">= {limit:e}"),
        Threshold::Within { lo, hi } => format!("in [{lo}, {hi}]"),
        Threshold::Holds => "holds".to_string(),
    };
    if c.threshold == Threshold::Holds {
        format!("{} {}", c.name, if c.passed { "holds" } else { "violated" })
    } else {
        format!("{} = {:.4e} ({bound})", c.name, c.value)
    }
}

/// Runs every experiment of criterion `id` at default settings.
pub fn check(id: u32) -> Result<Outcome> {
    let criterion = *criterion(id)?;
    let settings = Settings::default();
    let reports = criterion
        .experiments
        .iter()
        .map(|name| run_experiment(name, &settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome { criterion, reports })
}
