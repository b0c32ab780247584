//! Command-line interface.
//!
//! ```text
//! graph-bandits run --config exp.toml [--out DIR] [--seed S] [--horizon T] [--runs R]
//! graph-bandits preset <cycle6|random6> [--delta D | --best O] --out DIR [overrides]
//! graph-bandits lower-bound --config exp.toml [--exact | --samples N]
//! graph-bandits estimate-paths --config exp.toml --samples N
//! ```
//!
//! `run` executes the experiment and writes `regret.csv` into the output
//! directory. `preset` materializes the named benchmark config as
//! `config.toml` next to its `regret.csv`. `lower-bound` prints the
//! asymptotic report as `key=value` lines, and `estimate-paths` prints the
//! Monte-Carlo connection matrix as bare CSV rows. Exit status is zero on
//! success and nonzero with a diagnostic on stderr otherwise.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use thiserror::Error;

use super::config::{ConfigError, ExperimentConfig};
use super::csv::write_csv;
use super::preset::{parse_arm_letter, preset, PresetOptions};
use super::runner::run_experiment;
use super::HarnessError;
use crate::bounds::{lower_bound_cascade, lower_bound_one_step, BoundError, BoundReport};
use crate::env::FeedbackMode;
use crate::graph::{ConnectionSource, ENUMERATION_LIMIT};
use crate::ExperimentRng;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "graph-bandits",
    about = "Online learning with probabilistic graph feedback",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Overrides {
    /// Output directory for regret.csv (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Horizon override.
    #[arg(long)]
    horizon: Option<u64>,
    /// Replication-count override.
    #[arg(long)]
    runs: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Materialize a named benchmark config and run it.
    Preset {
        /// cycle6 or random6.
        name: String,
        /// Reward gap of the cycle6 best arm.
        #[arg(long)]
        delta: Option<f64>,
        /// Best arm (letter A-F) of random6.
        #[arg(long)]
        best: Option<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the asymptotic lower-bound report for a config.
    LowerBound {
        #[arg(long)]
        config: PathBuf,
        /// Enumerate the connection matrix exactly (cascade mode).
        #[arg(long, conflicts_with = "samples")]
        exact: bool,
        /// Estimate the connection matrix from this many samples.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Print a Monte-Carlo connection-matrix estimate as CSV.
    EstimatePaths {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        samples: u64,
    },
}

fn apply_overrides(config: &mut ExperimentConfig, overrides: &Overrides) {
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(horizon) = overrides.horizon {
        config.horizon = horizon;
    }
    if let Some(runs) = overrides.runs {
        config.runs = runs;
    }
    if let Some(out) = &overrides.out {
        config.out = Some(out.display().to_string());
    }
}

fn out_dir(config: &ExperimentConfig) -> PathBuf {
    config
        .out
        .as_ref()
        .map_or_else(|| PathBuf::from("."), PathBuf::from)
}

fn run_and_report(
    config: &ExperimentConfig,
    dir: &Path,
    stdout: &mut impl Write,
) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let trace = run_experiment(config)?;
    let csv_path = dir.join("regret.csv");
    write_csv(&trace, &csv_path).map_err(HarnessError::Io)?;
    let last = trace
        .checkpoints
        .last()
        .expect("horizon >= 1 yields a checkpoint");
    writeln!(
        stdout,
        "wrote {} ({} checkpoints, {} runs, final mean regret {:.3})",
        csv_path.display(),
        trace.checkpoints.len(),
        last.runs,
        last.regret_mean
    )?;
    let totals = trace.branch_stats.iter().fold([0u64; 6], |mut acc, c| {
        acc[0] += c.obs_deficit;
        acc[1] += c.exploit;
        acc[2] += c.forced_explore;
        acc[3] += c.lp_explore;
        acc[4] += c.lp_fallback;
        acc[5] += c.baseline;
        acc
    });
    writeln!(
        stdout,
        "branches: obs-deficit={} exploit={} forced={} lp={} lp-fallback={} baseline={}",
        totals[0], totals[1], totals[2], totals[3], totals[4], totals[5]
    )?;
    Ok(())
}

fn print_bound(report: &BoundReport<f64>, stdout: &mut impl Write) -> Result<(), CliError> {
    writeln!(stdout, "mode={}", report.mode)?;
    writeln!(stdout, "source={}", report.source)?;
    writeln!(stdout, "value={:.6}", report.value)?;
    for (i, c) in report.witness.iter().enumerate() {
        writeln!(stdout, "c_{i}={c:.6}")?;
    }
    Ok(())
}

/// Parses `args` (including the binary name) and executes the command,
/// writing regular output to `stdout`.
pub fn run_cli<I, S>(args: I, stdout: &mut impl Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    match cli.command {
        Command::Run { config, overrides } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            apply_overrides(&mut cfg, &overrides);
            cfg.validate()?;
            run_and_report(&cfg, &out_dir(&cfg), stdout)
        }
        Command::Preset {
            name,
            delta,
            best,
            overrides,
        } => {
            let name = name.parse()?;
            let best = best.as_deref().map(parse_arm_letter).transpose()?;
            let mut cfg = preset(name, PresetOptions { delta, best })?;
            apply_overrides(&mut cfg, &overrides);
            cfg.validate()?;
            let dir = overrides
                .out
                .clone()
                .ok_or_else(|| CliError::Usage("preset requires --out <dir>".into()))?;
            fs::create_dir_all(&dir)?;
            let config_path = dir.join("config.toml");
            fs::write(&config_path, cfg.to_toml())?;
            writeln!(stdout, "wrote {}", config_path.display())?;
            run_and_report(&cfg, &dir, stdout)
        }
        Command::LowerBound {
            config,
            exact,
            samples,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            cfg.validate()?;
            let graph = cfg.graph().map_err(HarnessError::Graph)?;
            let model = cfg.model().map_err(HarnessError::Env)?;
            let report = match cfg.mode {
                FeedbackMode::OneStep => lower_bound_one_step(&graph, &model, cfg.gap_floor)?,
                FeedbackMode::Cascade => {
                    let (connection, source) = match (exact, samples) {
                        (_, Some(n)) => {
                            let mut rng = ExperimentRng::seed_from_u64(cfg.seed);
                            (
                                graph.estimate_connection_matrix(n, &mut rng),
                                ConnectionSource::MonteCarlo { samples: n },
                            )
                        }
                        _ => {
                            if !exact && graph.edges().len() > ENUMERATION_LIMIT {
                                return Err(CliError::Usage(format!(
                                    "graph has {} edges, beyond the exact enumeration limit {}; \
                                     pass --samples N",
                                    graph.edges().len(),
                                    ENUMERATION_LIMIT
                                )));
                            }
                            (graph.exact_connection_matrix()?, ConnectionSource::Exact)
                        }
                    };
                    lower_bound_cascade(&connection, source, &model, cfg.gap_floor)?
                }
            };
            print_bound(&report, stdout)
        }
        Command::EstimatePaths { config, samples } => {
            let cfg = ExperimentConfig::load(&config)?;
            cfg.validate()?;
            if samples == 0 {
                return Err(CliError::Usage("--samples must be at least 1".into()));
            }
            let graph = cfg.graph().map_err(HarnessError::Graph)?;
            let mut rng = ExperimentRng::seed_from_u64(cfg.seed);
            let connection = graph.estimate_connection_matrix(samples, &mut rng);
            let k = connection.k();
            for i in 0..k {
                let row: Vec<String> =
                    (0..k).map(|j| format!("{:.6}", connection.get(i, j))).collect();
                writeln!(stdout, "{}", row.join(","))?;
            }
            Ok(())
        }
    }
}
