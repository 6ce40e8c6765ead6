use hypwave_core::acceptance::{criterion, CRITERIA};
use hypwave_core::experiments::*;
use hypwave_core::report::{Check, ExperimentReport, Status, Threshold};
use hypwave_core::solver::*;
use hypwave_core::*;

#[test]
fn registry_is_complete() {
    let names = experiment_names();
    assert_eq!(names.len(), EXPERIMENTS.len());
    for c in &CRITERIA {
        for e in c.experiments {
            assert!(lookup(e).is_some(), "criterion {} names {e}", c.id);
        }
    }
    let ids: Vec<u32> = CRITERIA.iter().map(|c| c.id).collect();
    assert_eq!(ids, (1..=15).collect::<Vec<_>>());
    assert!(criterion(0).is_err());
    assert!(criterion(16).is_err());
}

#[test]
fn unknown_experiment_lists_known_names() {
    let e = run_experiment("nope", &Settings::default()).unwrap_err();
    assert!(e.to_string().contains("heat_kernel"), "{e}");
}

#[test]
fn settings_reject_unknown_fields_and_empty_schedules() {
    assert!(serde_json::from_str::<Settings>(r#"{"h": 0.1, "typo": 1}"#).is_err());
    let s: Settings = serde_json::from_str(r#"{"schedule": []}"#).unwrap();
    assert!(s.schedule_or(&[1.0]).is_err());
    assert!(run_experiment("heat_kernel", &s).is_err());
    let s: Settings = serde_json::from_str(r#"{"tolerances": {"order": 3.0}}"#).unwrap();
    assert_eq!(s.tol("order", 1.5), 3.0);
    assert_eq!(s.tol("other", 1.5), 1.5);
}

#[test]
fn tolerance_override_flips_a_check() {
    let mut s = Settings::default();
    let r = run_experiment("heat_kernel", &s).unwrap();
    assert!(r.passed());
    assert_eq!(r.parameters["seed"], "0");
    s.tolerances.insert("order".into(), 2.5);
    let r = run_experiment("heat_kernel", &s).unwrap();
    assert_eq!(r.status, Status::Fail);
}

#[test]
fn report_status_follows_checks() {
    let mut r = ExperimentReport::new("x");
    assert!(r.passed());
    r.check(Check::new("a", 1.0, Threshold::at_most(2.0)));
    assert!(r.passed());
    r.check(Check::new("b", 1.0, Threshold::within(2.0, 3.0)));
    assert_eq!(r.status, Status::Fail);
    r.status = Status::Partial;
    r.check(Check::holds("c", true));
    assert_eq!(r.status, Status::Partial);
}

#[test]
fn diagnostic_series_has_fixed_columns() {
    let grid = make_radial_grid(Geometry::hyperbolic(), 8.0, 0.02).unwrap();
    let eq = EquationSpec::linear(Geometry::hyperbolic());
    let s = make_state(
        &DataSpec::position(Generator::gaussian(1.0, 1.0)),
        &eq,
        &grid,
    )
    .unwrap();
    let traj = evolve(&s, 1.0, usize::MAX, &Diagnostics::energy_only()).unwrap();
    let series = diagnostic_series("d", &traj, 7);
    assert_eq!(series.columns, DIAGNOSTIC_COLUMNS);
    let last = series.rows.last().unwrap();
    assert_eq!(last[0], *traj.times.last().unwrap());
    // channels that were not recorded come out as NaN
    assert!(last[5].is_nan());
    assert!(series.rows.iter().all(|r| r[1].is_finite()));
    let full = diagnostic_series("d", &traj, 1);
    assert_eq!(full.rows.len(), traj.times.len());
}
