//! Configuration, orchestration and serialization for the `spin2gs` tool.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{landscape_table, run_gs, run_sweep, uniform_report, RunOutcome};
pub use config::{FamilySpec, RunConfig, SweepConfig, SweepParameter};
pub use output::{read_field, write_field, RunSummary};

/// Failures of a command, each with its process exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("did not converge: {0}")]
    NotConverged(String),
    #[error("infeasible projection: {0}")]
    Infeasible(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NotConverged(_) => 3,
            CliError::Infeasible(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<spin2_gs::Error> for CliError {
    fn from(e: spin2_gs::Error) -> Self {
        use spin2_gs::Error as E;
        match e {
            E::InvalidGrid(_) | E::InvalidParameter(_) | E::InvalidVariant(_) | E::SmaReference(_) => {
                CliError::Config(e.to_string())
            }
            E::Infeasible { .. } | E::MagnetizationUnreachable(_) | E::NegativeWeight { .. } => {
                CliError::Infeasible(e.to_string())
            }
            // a blown-up step or a stalled inner solve ends the run unconverged
            E::NonPositiveDiagonal { .. } | E::LinearSolver { .. } => CliError::NotConverged(e.to_string()),
        }
    }
}

/// Worker count for sweeps when neither the flag nor the environment sets one.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
