use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hypwave_cli::{
    check, parse_config, run, selftest, sweep, CliError, RunOutput, EXIT_FAIL, EXIT_PASS,
};

#[derive(Parser)]
#[command(
    name = "hypwave",
    version,
    about = "Radial waves on hyperbolic 3-space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named in a config file.
    Run {
        config: PathBuf,
        /// Overrides the configured output directory.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the experiment once per schedule value and merge the reports.
    Sweep {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run acceptance criterion 1..=15 at default settings.
    Check {
        id: u32,
        /// Write each experiment's report under this directory.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Quick end-to-end sanity checks.
    Selftest,
}

fn finish(out: RunOutput) -> i32 {
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let r = &out.report;
    println!("{}: {:?}", r.experiment, r.status);
    for c in &r.checks {
        println!(
            "  {} {} = {:.6e}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.value
        );
    }
    for n in r.notes.iter().filter(|n| n.contains("failed")) {
        println!("  {n}");
    }
    if let Some(dir) = out.files.first().and_then(|p| p.parent()) {
        println!("wrote {} files to {}", out.files.len(), dir.display());
    }
    if r.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { config, output } => {
            let mut cfg = parse_config(&config)?;
            if let Some(o) = output {
                cfg.output = o;
            }
            Ok(finish(run(&cfg)?))
        }
        Command::Sweep { config, output } => {
            let mut cfg = parse_config(&config)?;
            if let Some(o) = output {
                cfg.output = o;
            }
            Ok(finish(sweep(&cfg)?))
        }
        Command::Check { id, output } => {
            let outcome = check(id, output.as_deref())?;
            println!("{}", outcome.line());
            Ok(if outcome.passed() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            })
        }
        Command::Selftest => {
            let lines = selftest();
            for l in &lines {
                println!(
                    "{} {}: {}",
                    if l.passed { "ok  " } else { "FAIL" },
                    l.name,
                    l.detail
                );
            }
            Ok(if lines.iter().all(|l| l.passed) {
                EXIT_PASS
            } else {
                EXIT_FAIL
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
