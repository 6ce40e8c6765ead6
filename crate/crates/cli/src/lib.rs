//! Experiment runner for `hypwave`: TOML configuration, single runs,
//! parallel sweeps, acceptance checks and CSV/JSON/gnuplot output.

pub mod config;
pub mod error;
pub mod output;
pub mod runner;

pub use config::{parse_config, parse_config_str, RunConfig};
pub use error::{CliError, EXIT_ABORT, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};
pub use output::{emit_plots, PlotOutput};
pub use runner::{check, merge, run, selftest, sweep, worker_count, RunOutput};
