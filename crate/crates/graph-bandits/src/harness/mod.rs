//! Experiment configuration, seeded multi-run execution, presets, CSV
//! emission, and the CLI.

pub mod cli;
pub mod config;
pub mod csv;
pub mod preset;
pub mod runner;

pub use cli::{run_cli, CliError};
pub use config::{ConfigError, EdgeSpec, ExperimentConfig, PolicyKind};
pub use csv::write_csv;
pub use preset::{preset, PresetName, PresetOptions};
pub use runner::{run_experiment, AggregateTrace, BranchCounts, CheckpointStat};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("graph: {0}")]
    Graph(#[from] crate::graph::GraphError),
    #[error("model: {0}")]
    Env(#[from] crate::env::EnvError),
    #[error("policy failed in run with seed {seed} at round {round}: {source}")]
    PolicyRun {
        seed: u64,
        round: u64,
        source: crate::policies::PolicyError,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
