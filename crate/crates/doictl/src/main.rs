use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use doictl::{emit_plotdata, execute, CliError};

/// Experiment driver for the double operator integral calculus.
///
/// Exit codes: 0 all hard checks passed, 1 a check or computation failed,
/// 2 invalid configuration, 3 i/o failure.
#[derive(Parser)]
#[command(name = "doictl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment suite described by a JSON config file.
    Run {
        config: PathBuf,
        /// Override the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for the grid; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory; overrides the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Flatten a report.json into plot-ready CSV series.
    Plotdata { report: PathBuf, out: PathBuf },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run {
            config,
            seed,
            jobs,
            out,
        } => {
            if jobs == Some(0) {
                return Err(CliError::Config("--jobs must be at least 1".into()));
            }
            let manifest = execute(&config, seed, jobs, out.as_deref())?;
            println!(
                "suite {}: {} grid points, {} hard checks ({} failed), {} skipped, {} broken",
                manifest.suite,
                manifest.grid_points,
                manifest.hard_checks,
                manifest.hard_failures,
                manifest.skipped,
                manifest.computation_failures,
            );
            if manifest.passed {
                println!("PASS");
                Ok(0)
            } else {
                eprintln!("FAIL: see report.json for the failing checks");
                Ok(1)
            }
        }
        Command::Plotdata { report, out } => {
            emit_plotdata(&report, &out)?;
            println!("wrote {}", out.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
