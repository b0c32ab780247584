//! Long-horizon behavioral checks of the cascade policy.

use graph_bandits::env::{env_step, Family, FeedbackMode, RewardModel};
use graph_bandits::graph::ProbGraph;
use graph_bandits::policies::{select_cascade, Branch, PolicySettings, PolicyState};
use graph_bandits::ExperimentRng;
use rand::SeedableRng;

/// Once play counts grow, realized observation counts concentrate around
/// their expectations and the deficit-repair branch stops firing: on at
/// least 9 of 10 seeded cycle runs it must be silent over the last tenth
/// of a 100k horizon.
#[test]
fn observation_deficit_branch_dies_out() {
    let probs = [0.7, 0.4, 0.7, 0.3, 0.9, 0.1];
    let graph = ProbGraph::new(6, (0..6).map(|i| (i, (i + 1) % 6, probs[i]))).unwrap();
    let model = RewardModel::new(
        Family::GaussianUnitVariance,
        vec![0.7, 0.5, 0.5, 0.5, 0.5, 0.5],
    )
    .unwrap();
    let settings = PolicySettings::cascade(Family::GaussianUnitVariance);
    let horizon = 100_000u64;
    let tail_start = horizon - horizon / 10;

    let mut quiet_runs = 0;
    for seed in 0..10u64 {
        let mut rng = ExperimentRng::seed_from_u64(9_000 + seed);
        let estimate = graph.estimate_connection_matrix(100_000, &mut rng);
        let mut state = PolicyState::<f64>::new(6);
        let mut last_deficit_round = 0u64;
        for t in 1..=horizon {
            let thresholded = estimate.thresholded(settings.schedules.eta(t));
            let decision = select_cascade(&state, &graph, &thresholded, &settings).unwrap();
            if decision.branch == Branch::ObsDeficit {
                last_deficit_round = t;
            }
            let (event, _) =
                env_step(&graph, &model, FeedbackMode::Cascade, decision.arm, t, &mut rng)
                    .unwrap();
            state.update(&event).unwrap();
            if decision.branch.increments_exploration() {
                state.mark_exploration();
            }
        }
        if last_deficit_round < tail_start {
            quiet_runs += 1;
        }
    }
    assert!(quiet_runs >= 9, "only {quiet_runs} of 10 runs went quiet");
}
