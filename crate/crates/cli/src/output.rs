//! CSV, JSON and gnuplot script writers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hypwave_core::report::{ExperimentReport, PlotKind, Series};

use crate::error::{CliError, Result};

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(write_err(dir))
}

/// File stem for a series: anything outside `[A-Za-z0-9_-]` becomes `_`.
pub fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Shortest round-trip exponent form, so output is stable across runs.
fn number(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:e}")
    }
}

pub fn series_csv(series: &Series) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Write {
        path: PathBuf::from(format!("{}.csv", file_stem(&series.name))),
        source: std::io::Error::other(e),
    };
    w.write_record(&series.columns).map_err(csv_err)?;
    for row in &series.rows {
        w.write_record(row.iter().map(|x| number(*x)))
            .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Write {
        path: PathBuf::from(&series.name),
        source: e.into_error(),
    })
}

pub fn write_series(dir: &Path, series: &Series) -> Result<PathBuf> {
    let path = dir.join(format!("{}.csv", file_stem(&series.name)));
    std::fs::write(&path, series_csv(series)?).map_err(write_err(&path))?;
    Ok(path)
}

pub fn write_report(dir: &Path, report: &ExperimentReport) -> Result<PathBuf> {
    let path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(write_err(&path))?;
    Ok(path)
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct PlotOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

fn quote(s: &str) -> String {
    s.replace('\'', "")
}

/// One gnuplot figure for `series`, reading `<stem>.csv` next to the script.
fn figure(series: &Series) -> String {
    let stem = file_stem(&series.name);
    let mut s = String::new();
    let _ = writeln!(s, "set output '{stem}.png'");
    let _ = writeln!(s, "set title '{}'", quote(&series.name));
    let _ = writeln!(
        s,
        "set xlabel '{}'",
        quote(series.columns.first().map_or("x", |c| c))
    );
    match series.plot {
        PlotKind::Linear => {
            let _ = writeln!(s, "unset logscale");
        }
        PlotKind::LogLog => {
            let _ = writeln!(s, "set logscale xy");
        }
        PlotKind::SemiLogY => {
            let _ = writeln!(s, "unset logscale\nset logscale y");
        }
    }
    let mut parts: Vec<String> = (2..=series.columns.len())
        .map(|k| {
            format!(
                "'{stem}.csv' using 1:{k} with linespoints title '{}'",
                quote(&series.columns[k - 1])
            )
        })
        .collect();
    if let Some((a, b)) = series.fit {
        let _ = writeln!(s, "f_{stem}(x) = {a:e} * x**({b:e})");
        parts.push(format!(
            "f_{stem}(x) with lines dashtype 2 title 'fit {b:.3}'"
        ));
    }
    if !parts.is_empty() {
        let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    }
    s
}

const PREAMBLE: &str = "set terminal pngcairo size 900,600\nset datafile separator ','\nset key outside right\nset grid\n";

/// Writes gnuplot scripts for the report's series: one script per figure,
/// or a single multi-series script when `combined`. A report without series
/// produces no files and a warning.
pub fn emit_plots(report: &ExperimentReport, dir: &Path, combined: bool) -> Result<PlotOutput> {
    let mut out = PlotOutput::default();
    let series: Vec<&Series> = report
        .series
        .iter()
        .filter(|s| !s.rows.is_empty() && s.columns.len() >= 2)
        .collect();
    if series.is_empty() {
        out.warnings.push(format!(
            "report `{}` has no series; no plot scripts written",
            report.experiment
        ));
        return Ok(out);
    }
    if combined {
        let mut text = String::from(PREAMBLE);
        for s in &series {
            text.push('\n');
            text.push_str(&figure(s));
        }
        let path = dir.join(format!("{}.gp", file_stem(&report.experiment)));
        std::fs::write(&path, text).map_err(write_err(&path))?;
        out.files.push(path);
    } else {
        for s in &series {
            let path = dir.join(format!("{}.gp", file_stem(&s.name)));
            std::fs::write(&path, format!("{PREAMBLE}\n{}", figure(s)))
                .map_err(write_err(&path))?;
            out.files.push(path);
        }
    }
    Ok(out)
}
