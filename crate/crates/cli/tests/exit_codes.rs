use std::path::Path;
use std::process::Command;

fn hypwave(args: &[&str], cwd: &Path) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hypwave"))
        .args(args)
        .current_dir(cwd)
        .env_remove("HYPWAVE_WORKERS")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

#[test]
fn passing_run_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "ok.toml",
        "experiment = \"heat_kernel\"\n[time]\nt_final = 1.0\n",
    );
    let (code, stdout, _) = hypwave(&["run", &cfg, "-o", "out"], dir.path());
    assert_eq!(code, 0, "{stdout}");
    assert!(dir.path().join("out/diagnostics.csv").exists());
}

#[test]
fn config_error_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "experiment = \"heat_kernel\"\n[time]\ncfl = 1.5\n",
    );
    let (code, _, stderr) = hypwave(&["run", &cfg], dir.path());
    assert_eq!(code, 2);
    assert!(stderr.contains("time.cfl"), "{stderr}");
    let (code, _, _) = hypwave(&["run", "missing.toml"], dir.path());
    assert_eq!(code, 2);
    let (code, _, stderr) = hypwave(&["check", "99"], dir.path());
    assert_eq!(code, 2, "{stderr}");
}

#[test]
fn solver_abort_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // a large narrow quintic bump is far too stiff for the step size
    let cfg = write(
        dir.path(),
        "blowup.toml",
        "experiment = \"heat_kernel\"\n[equation]\nnonlinearity = \"quintic\"\n[data]\ngenerator = \"gaussian\"\namplitude = 30.0\nwidth = 0.2\n",
    );
    let (code, _, stderr) = hypwave(&["run", &cfg], dir.path());
    assert_eq!(code, 3, "{stderr}");
    assert!(stderr.contains("solver aborted"), "{stderr}");
}

#[test]
fn failing_checks_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "strict.toml",
        "experiment = \"heat_kernel\"\n[time]\nt_final = 1.0\n[tolerances]\nrel_l2_error_finest = 1e-12\n",
    );
    let (code, stdout, _) = hypwave(&["run", &cfg], dir.path());
    assert_eq!(code, 1);
    assert!(stdout.contains("FAIL rel_l2_error_finest"), "{stdout}");
}

#[test]
fn check_prints_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = hypwave(&["check", "6", "-o", "reports"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 1);
    assert!(stdout.starts_with("criterion  6"), "{stdout}");
    assert!(dir
        .path()
        .join("reports/strichartz_admissibility/report.json")
        .exists());
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = hypwave(&["selftest"], dir.path());
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.lines().all(|l| l.starts_with("ok")), "{stdout}");
}
