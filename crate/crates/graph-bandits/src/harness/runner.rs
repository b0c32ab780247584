//! Seeded multi-run experiment execution.
//!
//! Replication `r` uses seed `base + r` and owns its random stream, policy
//! state, and (for cascade runs) its own connection-matrix estimate drawn
//! before the first round. Runs execute sequentially in index order and the
//! aggregation is a deterministic reduction, so identical configs produce
//! identical traces byte for byte.

use rand::Rng;
use rand::SeedableRng;

use super::config::{ExperimentConfig, PolicyKind};
use super::HarnessError;
use crate::env::{env_step, RegretTrace, RewardModel};
use crate::graph::ProbGraph;
use crate::policies::{
    select_cascade, select_one_step_general, select_one_step_uniform, ucb1_select, Branch,
    PolicyState,
};
use crate::ExperimentRng;

/// Cross-run regret statistics at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointStat {
    pub t: u64,
    pub regret_mean: f64,
    pub regret_std: f64,
    pub runs: u32,
}

/// How many rounds each branch fired in one run; sums to the horizon.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BranchCounts {
    pub obs_deficit: u64,
    pub exploit: u64,
    pub forced_explore: u64,
    pub lp_explore: u64,
    pub lp_fallback: u64,
    /// Rounds of baseline policies that have no branch structure.
    pub baseline: u64,
}

impl BranchCounts {
    fn record(&mut self, branch: Branch) {
        match branch {
            Branch::ObsDeficit => self.obs_deficit += 1,
            Branch::Exploit => self.exploit += 1,
            Branch::ForcedExplore => self.forced_explore += 1,
            Branch::LpExplore => self.lp_explore += 1,
            Branch::LpFallback => self.lp_fallback += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.obs_deficit
            + self.exploit
            + self.forced_explore
            + self.lp_explore
            + self.lp_fallback
            + self.baseline
    }
}

/// Mean/std pseudo-regret across replications plus per-run diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateTrace {
    pub horizon: u64,
    pub checkpoints: Vec<CheckpointStat>,
    pub seeds: Vec<u64>,
    pub branch_stats: Vec<BranchCounts>,
    pub config_digest: u64,
}

/// Geometric checkpoint grid: multiples of `factor` from 10 up to the
/// horizon, which is always included.
pub fn checkpoint_grid(horizon: u64, factor: f64) -> Vec<u64> {
    assert!(factor > 1.0, "factor must exceed 1");
    let mut grid = Vec::new();
    let mut t = 10u64;
    while t < horizon {
        grid.push(t);
        let next = ((t as f64) * factor).ceil() as u64;
        t = next.max(t + 1);
    }
    if grid.last() != Some(&horizon) && horizon >= 1 {
        grid.retain(|&g| g < horizon);
        grid.push(horizon);
    }
    grid
}

/// Runs every replication of `config` and aggregates the regret traces.
pub fn run_experiment(config: &ExperimentConfig) -> Result<AggregateTrace, HarnessError> {
    config.validate()?;
    let graph = config.graph()?;
    let model = config.model()?;
    let grid = checkpoint_grid(config.horizon, config.checkpoint_factor);
    let digest = config.digest();

    let mut per_run: Vec<RegretTrace<f64>> = Vec::with_capacity(config.runs as usize);
    let mut branch_stats = Vec::with_capacity(config.runs as usize);
    let mut seeds = Vec::with_capacity(config.runs as usize);
    for r in 0..u64::from(config.runs) {
        let seed = config.seed.wrapping_add(r);
        let (trace, counts) = run_one(config, &graph, &model, seed, &grid, digest)?;
        per_run.push(trace);
        branch_stats.push(counts);
        seeds.push(seed);
    }

    let runs = config.runs;
    let checkpoints = grid
        .iter()
        .enumerate()
        .map(|(idx, &t)| {
            let values: Vec<f64> = per_run.iter().map(|tr| tr.checkpoints[idx].1).collect();
            let mean = values.iter().sum::<f64>() / f64::from(runs);
            let std = if runs > 1 {
                let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
                (ss / f64::from(runs - 1)).sqrt()
            } else {
                0.0
            };
            CheckpointStat {
                t,
                regret_mean: mean,
                regret_std: std,
                runs,
            }
        })
        .collect();

    Ok(AggregateTrace {
        horizon: config.horizon,
        checkpoints,
        seeds,
        branch_stats,
        config_digest: digest,
    })
}

fn run_one(
    config: &ExperimentConfig,
    graph: &ProbGraph<f64>,
    model: &RewardModel<f64>,
    seed: u64,
    grid: &[u64],
    digest: u64,
) -> Result<(RegretTrace<f64>, BranchCounts), HarnessError> {
    let mut rng = ExperimentRng::seed_from_u64(seed);
    let settings = config.policy_settings();
    let k = graph.num_arms();
    let fail = |round: u64, source: crate::policies::PolicyError| HarnessError::PolicyRun {
        seed,
        round,
        source,
    };

    // One high-accuracy estimate per replication; each round re-thresholds
    // it at eta(t) instead of re-sampling.
    let connection = match config.policy {
        PolicyKind::Cascade => {
            Some(graph.estimate_connection_matrix(config.effective_mc_samples(), &mut rng))
        }
        _ => None,
    };
    let uniform_p = graph.uniform_prob();

    let mut state = PolicyState::<f64>::new(k);
    let mut counts = BranchCounts::default();
    let mut cumulative = 0.0f64;
    let mut checkpoints = Vec::with_capacity(grid.len());
    let mut next_checkpoint = 0usize;

    for t in 1..=config.horizon {
        let branch = match config.policy {
            PolicyKind::OneStepUniform => {
                let p = uniform_p.expect("validated uniform");
                let d =
                    select_one_step_uniform(&state, graph, p, &settings).map_err(|e| fail(t, e))?;
                counts.record(d.branch);
                d
            }
            PolicyKind::OneStepGeneral => {
                let d = select_one_step_general(&state, graph, &settings).map_err(|e| fail(t, e))?;
                counts.record(d.branch);
                d
            }
            PolicyKind::Cascade => {
                let eta = settings.schedules.eta(t);
                let thresholded = connection.as_ref().expect("estimated above").thresholded(eta);
                let d = select_cascade(&state, graph, &thresholded, &settings)
                    .map_err(|e| fail(t, e))?;
                counts.record(d.branch);
                d
            }
            PolicyKind::Ucb1 => {
                counts.baseline += 1;
                crate::policies::Decision {
                    arm: ucb1_select(&state),
                    branch: Branch::Exploit,
                }
            }
            PolicyKind::UniformRandom => {
                counts.baseline += 1;
                crate::policies::Decision {
                    arm: rng.random_range(0..k),
                    branch: Branch::Exploit,
                }
            }
        };
        let decision = branch;
        let (event, increment) =
            env_step(graph, model, config.mode, decision.arm, t, &mut rng)?;
        state.update(&event).map_err(|e| fail(t, e))?;
        let is_paper_policy = matches!(
            config.policy,
            PolicyKind::OneStepUniform | PolicyKind::OneStepGeneral | PolicyKind::Cascade
        );
        if is_paper_policy && decision.branch.increments_exploration() {
            state.mark_exploration();
        }
        cumulative += increment;
        if next_checkpoint < grid.len() && t == grid[next_checkpoint] {
            checkpoints.push((t, cumulative));
            next_checkpoint += 1;
        }
    }

    let trace = RegretTrace {
        horizon: config.horizon,
        checkpoints,
        seed,
        config_digest: digest,
    };
    Ok((trace, counts))
}
