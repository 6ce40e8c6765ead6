use std::path::Path;

use hypwave_cli::output::series_csv;
use hypwave_cli::{emit_plots, merge, parse_config_str, run, sweep, RunConfig};
use hypwave_core::experiments::DIAGNOSTIC_COLUMNS;
use hypwave_core::report::{ExperimentReport, Status};
use hypwave_core::HypError;

fn config(text: &str, out: &Path) -> RunConfig {
    let mut c = parse_config_str(text).unwrap();
    c.output = out.to_path_buf();
    c
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

/// The report JSON with wall-clock fields removed.
fn untimed(p: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(&read(p)).unwrap();
    v["notes"]
        .as_array_mut()
        .unwrap()
        .retain(|n| !n.as_str().unwrap().starts_with("wall time"));
    for row in v["rows"].as_array_mut().unwrap() {
        row["metrics"].as_object_mut().unwrap().remove("seconds");
    }
    v["checks"]
        .as_array_mut()
        .unwrap()
        .retain(|c| !c["name"].as_str().unwrap().starts_with("seconds"));
    v
}

#[test]
fn run_writes_fixed_columns_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        "experiment = \"heat_kernel\"\n[grid]\nh = 0.01\n",
        dir.path(),
    );
    let out = run(&c).unwrap();
    assert!(out.report.passed());
    assert_eq!(out.report.provenance.config_hash, c.hash());
    let csv = String::from_utf8(read(&dir.path().join("diagnostics.csv"))).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, DIAGNOSTIC_COLUMNS.join(","));
    assert!(csv.lines().count() > 10);
    let json: serde_json::Value =
        serde_json::from_slice(&read(&dir.path().join("report.json"))).unwrap();
    assert_eq!(json["experiment"], "heat_kernel");
    assert_eq!(json["status"], "pass");
    assert!(dir.path().join("heat_kernel_error.csv").exists());
    assert!(dir.path().join("heat_kernel_error.gp").exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let text = "experiment = \"strichartz_admissibility\"\nseed = 3\n[time]\nt_final = 3.0\n[equation]\nnonlinearity = \"quintic\"\n";
    let ra = run(&config(text, a.path())).unwrap();
    let rb = run(&config(text, b.path())).unwrap();
    for name in ["diagnostics.csv", "diagnostics.gp"] {
        assert_eq!(
            read(&a.path().join(name)),
            read(&b.path().join(name)),
            "{name}"
        );
    }
    let json = |d: &Path| untimed(&d.join("report.json"));
    assert_eq!(json(a.path()), json(b.path()));
    assert_eq!(ra.report.rows, rb.report.rows);
    // a different seed draws different random pairs
    let c = tempfile::tempdir().unwrap();
    run(&config(&text.replace("seed = 3", "seed = 4"), c.path())).unwrap();
    assert_ne!(json(a.path()), json(c.path()));
}

#[test]
fn dispersive_decay_reports_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&config("experiment = \"dispersive_decay\"\n", dir.path())).unwrap();
    let long = out.report.metric("long", "exponent").unwrap();
    let short = out.report.metric("short", "exponent").unwrap();
    assert!((long + 1.5).abs() <= 0.15, "{long}");
    assert!((short + 0.8).abs() <= 0.15, "{short}");
    assert!(out.report.passed());
}

#[test]
fn identities_report_bounds_and_residual() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&config("experiment = \"identities\"\n", dir.path())).unwrap();
    let names: Vec<&str> = out.report.checks.iter().map(|c| c.name.as_str()).collect();
    for want in [
        "a_r_bounds_d3",
        "c2_bounds_d5",
        "c2_identity_d4",
        "identity_residual",
    ] {
        assert!(names.contains(&want), "{want} missing from {names:?}");
    }
    assert!(out.report.passed());
}

#[test]
fn euclidean_sweep_is_a_three_row_table() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        "experiment = \"euclidean_approx\"\n[schedule]\nvalues = [8.0, 32.0, 128.0]\n",
        dir.path(),
    );
    let out = sweep(&c).unwrap();
    let keys: Vec<&str> = out.report.rows.iter().map(|r| r.key.as_str()).collect();
    assert_eq!(keys, ["lambda=8", "lambda=32", "lambda=128"]);
    let values: Vec<f64> = out
        .report
        .rows
        .iter()
        .map(|r| r.metrics["schedule_value"])
        .collect();
    assert_eq!(values, [8.0, 32.0, 128.0]);
    let errors: Vec<f64> = out
        .report
        .rows
        .iter()
        .map(|r| r.metrics["sup_h_error"])
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    // one multi-series script for the sweep
    let scripts: Vec<_> = out
        .files
        .iter()
        .filter(|p| p.extension().is_some_and(|e| e == "gp"))
        .collect();
    assert_eq!(scripts.len(), 1);
    let text = std::fs::read_to_string(scripts[0]).unwrap();
    assert_eq!(text.matches("plot '").count(), 3);
}

#[test]
fn failing_index_marks_sweep_partial() {
    let dir = tempfile::tempdir().unwrap();
    // a negative spacing cannot build a grid
    let c = config(
        "experiment = \"heat_kernel\"\n[schedule]\nvalues = [0.004, -1.0]\n",
        dir.path(),
    );
    let out = sweep(&c).unwrap();
    assert_eq!(out.report.status, Status::Partial);
    assert!(out.report.notes.iter().any(|n| n.contains("index 1")));
    assert!(!out.report.rows.is_empty());
    let json: serde_json::Value =
        serde_json::from_slice(&read(&dir.path().join("report.json"))).unwrap();
    assert_eq!(json["status"], "partial");
}

#[test]
fn merge_keeps_schedule_order() {
    let mk = |name: &str| {
        let mut r = ExperimentReport::new("x");
        r.rows
            .push(hypwave_core::report::MetricRow::new(name).with("v", 1.0));
        r
    };
    let merged = merge(
        "x",
        &[3.0, 1.0, 2.0],
        vec![
            Ok(mk("a")),
            Err(HypError::Unsupported("boom".into())),
            Ok(mk("c")),
        ],
    );
    let keys: Vec<&str> = merged.rows.iter().map(|r| r.key.as_str()).collect();
    assert_eq!(keys, ["a", "c"]);
    assert_eq!(merged.status, Status::Partial);
    let all_ok = merge("x", &[1.0], vec![Ok(mk("a"))]);
    assert_eq!(all_ok.status, Status::Pass);
}

#[test]
fn sweep_needs_a_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let c = config("experiment = \"heat_kernel\"\n", dir.path());
    let e = sweep(&c).unwrap_err();
    assert_eq!(e.key(), Some("schedule.values"));
    let mut c = c;
    c.schedule = Some(vec![]);
    assert_eq!(sweep(&c).unwrap_err().key(), Some("schedule.values"));
}

#[test]
fn empty_report_emits_no_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = emit_plots(&ExperimentReport::new("empty"), dir.path(), false).unwrap();
    assert!(out.files.is_empty());
    assert_eq!(out.warnings.len(), 1);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn loglog_plot_overlays_fit() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        "experiment = \"heat_kernel\"\n[time]\nt_final = 1.0\n",
        dir.path(),
    );
    let out = run(&c).unwrap();
    let script = std::fs::read_to_string(dir.path().join("heat_kernel_error.gp")).unwrap();
    assert!(script.contains("set logscale xy"));
    assert!(script.contains("'heat_kernel_error.csv'"));
    assert!(script.contains("dashtype 2 title 'fit"));
    let series = &out.report.series[1];
    assert_eq!(
        series_csv(series).unwrap(),
        read(&dir.path().join("heat_kernel_error.csv"))
    );
}
