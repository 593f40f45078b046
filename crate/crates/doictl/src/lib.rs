//! Experiment driver around `doi-core`.
//!
//! A run is described by a JSON config naming a suite, a symbol, and the
//! pair grid to sweep. `run::execute` validates the config, runs every grid
//! point (optionally in parallel; results are merged in grid order so the
//! outputs do not depend on thread count), and writes three files into the
//! output directory:
//!
//! * `report.json`: every ratio, defect, and table produced by the suite,
//! * `report.csv`: one flat row per measurement for plotting,
//! * `manifest.json`: config digest, tool version, timestamps, pass/fail.
//!
//! Reports are byte-identical across reruns of the same config and seed;
//! only the manifest carries timestamps. Soft metrics (ratios) never fail a
//! run. Hard checks (representation defects, oracle comparisons) decide the
//! process exit code.

// Parameter guards are written `!(x > 0.0)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod plotdata;
pub mod run;

pub use config::{ExperimentConfig, ResolvedConfig, Suite, SymbolSpec};
pub use plotdata::emit_plotdata;
pub use run::{execute, HardCheck, RunManifest, RunReport};

use thiserror::Error;

/// Driver failures, grouped by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent configuration. Exit code 2; nothing is
    /// written when this is raised.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A computation that should have succeeded did not. Exit code 1.
    #[error("run failed: {0}")]
    Assertion(String),
    /// Filesystem trouble. Exit code 3.
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
