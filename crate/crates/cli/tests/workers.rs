// Kept in its own test binary: it mutates the process environment.

use hypwave_cli::{parse_config_str, sweep, worker_count};
use hypwave_core::report::Status;

#[test]
fn workers_variable_bounds_the_pool() {
    std::env::set_var("HYPWAVE_WORKERS", "2");
    assert_eq!(worker_count().unwrap(), 2);
    std::env::set_var("HYPWAVE_WORKERS", "0");
    assert_eq!(worker_count().unwrap_err().key(), Some("HYPWAVE_WORKERS"));
    std::env::set_var("HYPWAVE_WORKERS", "many");
    assert!(worker_count().is_err());

    let dir = tempfile::tempdir().unwrap();
    let mut c =
        parse_config_str("experiment = \"heat_kernel\"\n[schedule]\nvalues = [0.004]\n").unwrap();
    c.output = dir.path().to_path_buf();
    assert!(sweep(&c).is_err());
    std::env::set_var("HYPWAVE_WORKERS", "1");
    let report = sweep(&c).unwrap().report;
    assert_ne!(report.status, Status::Partial);
    assert_eq!(report.rows.len(), 1);
    std::env::remove_var("HYPWAVE_WORKERS");
    assert!(worker_count().unwrap() >= 1);
}
