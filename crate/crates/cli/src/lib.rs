//! Experiment runner for the ffsieve laboratory: configuration parsing,
//! suite orchestration and deterministic JSON/CSV reports.

pub mod config;
pub mod report;
pub mod run;

pub use config::{ExperimentConfig, FamilySpec, Format, GridAxis, GridParam, Suite};
pub use report::RunReport;
pub use run::{run_experiment, Params, Status, SuiteResult};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Clap(clap::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 2 usage, 3 validation, 4 I/O, 5 internal. `--help` and `--version`
    /// come through as clap errors that exit 0.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Clap(_) | CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Io(_) => 4,
            CliError::Internal(_) => 5,
        }
    }
}

/// Exit code when a suite reports a violated inequality or identity.
pub const EXIT_VIOLATION: i32 = 1;
