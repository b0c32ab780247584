//! The LP-guided learning policies and the UCB1 baseline.
//!
//! Each policy is a pure selection function over a [`PolicyState`]: evaluate
//! the branch conditions in a fixed order, return the arm plus a [`Branch`]
//! tag recording which condition fired. The caller steps the environment,
//! folds the feedback back in with [`PolicyState::update`], and bumps the
//! exploration counter when [`Branch::increments_exploration`] says so.
//!
//! Branch order, shared by all three policies:
//!
//! 1. observation deficit — some arm saw fewer than half its expected
//!    observations, repair by playing a strong in-neighbor;
//! 2. exploit — the play counts scaled by `1 / (lp_scale * ln t)` already
//!    satisfy the constraint system at the current estimates;
//! 3. forced exploration — some expected observation count lags the pacing
//!    schedule `2 beta(N_e) / K`;
//! 4. LP exploration — solve the constraint system and play an arm that is
//!    short of its optimal rate.

use thiserror::Error;

use crate::env::{argmax, Family, FeedbackEvent};
use crate::graph::{ConnectionMatrix, ProbGraph};
use crate::lp::{self, LpError, RhsMode};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("schedule parameter {name} = {value} outside {range}")]
    BadSchedule {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("event is for round {event} but the state has completed {completed}")]
    RoundMismatch { event: u64, completed: u64 },
    #[error("arm {0} out of range")]
    ArmOutOfRange(usize),
    #[error("arm {0} observed twice in one event")]
    DuplicateObservation(usize),
    #[error("arm {0} has no in-neighbor to explore it with")]
    UnobservableArm(usize),
    #[error("graph is not uniform: edge probabilities differ from {expected}")]
    NonUniformGraph { expected: f64 },
    #[error("state invariant violated: {0}")]
    Inconsistent(String),
    #[error(
        "no arm is below its optimal exploration rate at round {round}; \
         the membership check should have exploited"
    )]
    NoLpCandidate { round: u64 },
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Schedule and threshold constants of the selection rules.
///
/// `beta(n) = beta_a * n^beta_b` paces forced exploration (non-decreasing,
/// subadditive, `beta(n) <= n/2` for the permitted ranges) and
/// `eta(t) = max(eta_min, t^-eta_exp)` is the non-increasing tolerance below
/// which estimated connection probabilities are treated as zero. `lp_scale`
/// and `halving` are the scaling constant of the membership test and the
/// observation-deficit divisor; both are config-overridable but default to
/// the canonical values 16 and 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedules<T> {
    pub beta_a: T,
    pub beta_b: T,
    pub eta_min: T,
    pub eta_exp: T,
    pub lp_scale: T,
    pub halving: T,
}

impl<T: Real> Default for Schedules<T> {
    fn default() -> Self {
        let f = |v: f64| T::from_f64(v).expect("constant fits the scalar");
        Self {
            beta_a: f(0.5),
            beta_b: f(0.5),
            eta_min: f(0.05),
            eta_exp: f(1.0 / 3.0),
            lp_scale: f(16.0),
            halving: f(2.0),
        }
    }
}

impl<T: Real> Schedules<T> {
    pub fn validate(&self) -> Result<(), PolicyError> {
        let half = T::from_f64(0.5).expect("constant");
        let check = |ok: bool, name: &'static str, value: T, range: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(PolicyError::BadSchedule {
                    name,
                    value: value.to_f64().unwrap_or(f64::NAN),
                    range,
                })
            }
        };
        check(
            self.beta_a > T::zero() && self.beta_a <= half,
            "beta_a",
            self.beta_a,
            "(0, 0.5]",
        )?;
        check(
            self.beta_b > T::zero() && self.beta_b < T::one(),
            "beta_b",
            self.beta_b,
            "(0, 1)",
        )?;
        check(
            self.eta_min > T::zero() && self.eta_min < T::one(),
            "eta_min",
            self.eta_min,
            "(0, 1)",
        )?;
        check(self.eta_exp > T::zero(), "eta_exp", self.eta_exp, "(0, inf)")?;
        check(
            self.lp_scale > T::zero(),
            "lp_scale",
            self.lp_scale,
            "(0, inf)",
        )?;
        check(
            self.halving > T::one(),
            "halving",
            self.halving,
            "(1, inf)",
        )?;
        Ok(())
    }

    /// Forced-exploration pacing `beta(n) = beta_a * n^beta_b`.
    pub fn beta(&self, n: u64) -> T {
        let n = T::from_u64(n).expect("count fits the scalar");
        self.beta_a * n.powf(self.beta_b)
    }

    /// Connection-probability tolerance `eta(t) = max(eta_min, t^-eta_exp)`.
    /// Note `eta(1) = 1`: at round one every estimated path is below
    /// tolerance and the cascade policy falls back to forced exploration.
    pub fn eta(&self, t: u64) -> T {
        assert!(t >= 1, "rounds are 1-based");
        let t = T::from_u64(t).expect("round fits the scalar");
        self.eta_min.max(t.powf(-self.eta_exp))
    }
}

/// Everything a selection rule needs besides the state and the graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicySettings<T> {
    pub family: Family,
    pub gap_floor: T,
    pub rhs_mode: RhsMode,
    pub schedules: Schedules<T>,
}

impl<T: Real> PolicySettings<T> {
    /// Defaults for the one-step policies: inverse-KL right-hand sides.
    pub fn one_step(family: Family) -> Self {
        Self {
            family,
            gap_floor: T::from_f64(1e-6).expect("constant"),
            rhs_mode: RhsMode::InverseKl,
            schedules: Schedules::default(),
        }
    }

    /// Defaults for the cascade policy: inverse-squared-gap right-hand
    /// sides.
    pub fn cascade(family: Family) -> Self {
        Self {
            rhs_mode: RhsMode::InverseGapSquared,
            ..Self::one_step(family)
        }
    }
}

/// Which selection branch fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Realized observations lag expectations; repair with an in-neighbor.
    ObsDeficit,
    /// Play counts certify the current estimates; play the empirical best.
    Exploit,
    /// Pacing schedule demands more observations of some arm.
    ForcedExplore,
    /// Play an arm below its LP-optimal exploration rate.
    LpExplore,
    /// The thresholded system was infeasible (an all-zero column); forced
    /// exploration of the offending arm's best in-neighbor instead.
    LpFallback,
}

impl Branch {
    /// The exploration counter advances on the schedule- and LP-driven
    /// branches only.
    pub fn increments_exploration(self) -> bool {
        matches!(
            self,
            Branch::ForcedExplore | Branch::LpExplore | Branch::LpFallback
        )
    }
}

/// One selection: the arm to play and the branch that chose it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub arm: usize,
    pub branch: Branch,
}

/// Per-round counters of the learning policies.
///
/// Mean estimates start at 1 for every arm and stay there until the arm is
/// first observed.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState<T> {
    /// Completed rounds.
    pub t: u64,
    /// Play counts per arm.
    pub plays: Vec<u64>,
    /// Exploration rounds.
    pub explore_rounds: u64,
    /// `obs_counts[i*k + j]`: rounds that played `i` and observed `j`.
    pub obs_counts: Vec<u64>,
    /// Observations per arm (column sums of `obs_counts`).
    pub arm_obs: Vec<u64>,
    /// Summed observed rewards per arm.
    pub reward_sums: Vec<T>,
    /// Running mean rewards per arm.
    pub mean_estimates: Vec<T>,
}

impl<T: Real> PolicyState<T> {
    pub fn new(num_arms: usize) -> Self {
        assert!(num_arms > 0);
        Self {
            t: 0,
            plays: vec![0; num_arms],
            explore_rounds: 0,
            obs_counts: vec![0; num_arms * num_arms],
            arm_obs: vec![0; num_arms],
            reward_sums: vec![T::zero(); num_arms],
            mean_estimates: vec![T::one(); num_arms],
        }
    }

    pub fn num_arms(&self) -> usize {
        self.plays.len()
    }

    /// Rounds that played `i` and observed `j`.
    pub fn obs_count(&self, i: usize, j: usize) -> u64 {
        self.obs_counts[i * self.num_arms() + j]
    }

    /// Arm with the best mean estimate; ties resolve to the smallest index.
    pub fn best_estimate_arm(&self) -> usize {
        argmax(&self.mean_estimates)
    }

    /// Folds one round of feedback in: advances `t`, counts the play, and
    /// updates the observation counters and mean estimates.
    pub fn update(&mut self, event: &FeedbackEvent<T>) -> Result<(), PolicyError> {
        let k = self.num_arms();
        if event.round != self.t + 1 {
            return Err(PolicyError::RoundMismatch {
                event: event.round,
                completed: self.t,
            });
        }
        if event.arm >= k {
            return Err(PolicyError::ArmOutOfRange(event.arm));
        }
        let mut seen = vec![false; k];
        for &(j, _) in &event.observations {
            if j >= k {
                return Err(PolicyError::ArmOutOfRange(j));
            }
            if seen[j] {
                return Err(PolicyError::DuplicateObservation(j));
            }
            seen[j] = true;
        }
        self.t += 1;
        self.plays[event.arm] += 1;
        for &(j, reward) in &event.observations {
            self.obs_counts[event.arm * k + j] += 1;
            self.arm_obs[j] += 1;
            self.reward_sums[j] = self.reward_sums[j] + reward;
            self.mean_estimates[j] =
                self.reward_sums[j] / T::from_u64(self.arm_obs[j]).expect("count fits");
        }
        Ok(())
    }

    /// Advances the exploration-round counter. Call after [`update`] on
    /// rounds whose branch increments exploration.
    ///
    /// [`update`]: Self::update
    pub fn mark_exploration(&mut self) {
        self.explore_rounds += 1;
    }

    /// Checks the counter invariants; used by instrumented runs.
    pub fn validate(&self) -> Result<(), PolicyError> {
        let k = self.num_arms();
        let total: u64 = self.plays.iter().sum();
        if total != self.t {
            return Err(PolicyError::Inconsistent(format!(
                "play counts sum to {total}, expected t = {}",
                self.t
            )));
        }
        if self.explore_rounds > self.t {
            return Err(PolicyError::Inconsistent(format!(
                "exploration rounds {} exceed t = {}",
                self.explore_rounds, self.t
            )));
        }
        for j in 0..k {
            let col: u64 = (0..k).map(|i| self.obs_count(i, j)).sum();
            if col != self.arm_obs[j] {
                return Err(PolicyError::Inconsistent(format!(
                    "arm {j}: column sum {col} != observation count {}",
                    self.arm_obs[j]
                )));
            }
            let expected = if self.arm_obs[j] == 0 {
                T::one()
            } else {
                self.reward_sums[j] / T::from_u64(self.arm_obs[j]).expect("count fits")
            };
            if self.mean_estimates[j] != expected {
                return Err(PolicyError::Inconsistent(format!(
                    "arm {j}: stale mean estimate"
                )));
            }
        }
        Ok(())
    }
}

/// `ln(max(t - 1, e))`: the log factor of the membership and rate
/// thresholds, floored so rounds one and two are not degenerate.
fn log_term<T: Real>(completed_rounds: u64) -> T {
    let t = T::from_u64(completed_rounds).expect("round fits the scalar");
    t.max(T::E()).ln()
}

/// In-neighbor of `j` with the largest edge probability, ties to the
/// smallest index.
fn strongest_in_neighbor<T: Real>(graph: &ProbGraph<T>, j: usize) -> Result<usize, PolicyError> {
    let mut best: Option<(usize, T)> = None;
    for &(i, p) in graph.in_edges(j) {
        if best.is_none_or(|(_, bp)| p > bp) {
            best = Some((i, p));
        }
    }
    best.map(|(i, _)| i).ok_or(PolicyError::UnobservableArm(j))
}

fn scaled_plays<T: Real>(state: &PolicyState<T>, schedules: &Schedules<T>) -> Vec<T> {
    let denom = schedules.lp_scale * log_term::<T>(state.t);
    state
        .plays
        .iter()
        .map(|&n| T::from_u64(n).expect("count fits") / denom)
        .collect()
}

/// Arm with the largest positive rate deficit `lp_scale * c_i * L - N_i`,
/// ties to the smallest index.
fn largest_deficit_arm<T: Real>(
    state: &PolicyState<T>,
    rates: &[T],
    schedules: &Schedules<T>,
) -> Option<usize> {
    let scale = schedules.lp_scale * log_term::<T>(state.t);
    let mut best: Option<(usize, T)> = None;
    for (i, &rate) in rates.iter().enumerate() {
        let played = T::from_u64(state.plays[i]).expect("count fits");
        let target = scale * rate;
        if played < target {
            let deficit = target - played;
            if best.is_none_or(|(_, d)| deficit > d) {
                best = Some((i, deficit));
            }
        }
    }
    best.map(|(i, _)| i)
}

fn one_step_select<T: Real>(
    state: &PolicyState<T>,
    graph: &ProbGraph<T>,
    settings: &PolicySettings<T>,
) -> Result<Decision, PolicyError> {
    let k = graph.num_arms();
    assert_eq!(state.num_arms(), k, "state/graph arm count mismatch");
    let sched = &settings.schedules;

    // Expected observation counts M_j from the play counts so far.
    let expected: Vec<T> = (0..k)
        .map(|j| {
            graph.in_edges(j).iter().fold(T::zero(), |acc, &(i, p)| {
                acc + T::from_u64(state.plays[i]).expect("count fits") * p
            })
        })
        .collect();

    for j in 0..k {
        let seen = T::from_u64(state.arm_obs[j]).expect("count fits");
        if seen < expected[j] / sched.halving {
            return Ok(Decision {
                arm: strongest_in_neighbor(graph, j)?,
                branch: Branch::ObsDeficit,
            });
        }
    }

    let instance = lp::build_one_step_constraints(
        graph,
        &state.mean_estimates,
        settings.family,
        settings.rhs_mode,
        settings.gap_floor,
    )?;
    if lp::is_member(&instance, &scaled_plays(state, sched)) {
        return Ok(Decision {
            arm: state.best_estimate_arm(),
            branch: Branch::Exploit,
        });
    }

    let pace = (sched.halving * sched.beta(state.explore_rounds))
        / T::from_usize(k).expect("arm count fits");
    for j in 0..k {
        if expected[j] < pace {
            return Ok(Decision {
                arm: strongest_in_neighbor(graph, j)?,
                branch: Branch::ForcedExplore,
            });
        }
    }

    let solution = lp::solve(&instance)?;
    match largest_deficit_arm(state, &solution.c, sched) {
        Some(arm) => Ok(Decision {
            arm,
            branch: Branch::LpExplore,
        }),
        None => Err(PolicyError::NoLpCandidate { round: state.t + 1 }),
    }
}

/// Selection rule for graphs whose edges share one probability `p`.
/// Behaves identically to [`select_one_step_general`] on such graphs; the
/// explicit `p` is validated against the edges.
pub fn select_one_step_uniform<T: Real>(
    state: &PolicyState<T>,
    graph: &ProbGraph<T>,
    p: T,
    settings: &PolicySettings<T>,
) -> Result<Decision, PolicyError> {
    match graph.uniform_prob() {
        Some(q) if q == p => one_step_select(state, graph, settings),
        _ => Err(PolicyError::NonUniformGraph {
            expected: p.to_f64().unwrap_or(f64::NAN),
        }),
    }
}

/// Selection rule for arbitrary one-step feedback graphs. Deficit repairs
/// play the in-neighbor with the largest edge probability.
pub fn select_one_step_general<T: Real>(
    state: &PolicyState<T>,
    graph: &ProbGraph<T>,
    settings: &PolicySettings<T>,
) -> Result<Decision, PolicyError> {
    one_step_select(state, graph, settings)
}

/// Selection rule for cascade feedback. `connection` must already be
/// thresholded at the current round's `eta(t)`; expected observations and
/// the constraint system both read from it, while forced exploration keeps
/// to in-neighbors of the original graph.
pub fn select_cascade<T: Real>(
    state: &PolicyState<T>,
    graph: &ProbGraph<T>,
    connection: &ConnectionMatrix<T>,
    settings: &PolicySettings<T>,
) -> Result<Decision, PolicyError> {
    let k = graph.num_arms();
    assert_eq!(state.num_arms(), k, "state/graph arm count mismatch");
    assert_eq!(connection.k(), k, "connection matrix dimension mismatch");
    let sched = &settings.schedules;

    let expected: Vec<T> = (0..k)
        .map(|j| {
            (0..k).fold(T::zero(), |acc, i| {
                acc + T::from_u64(state.plays[i]).expect("count fits") * connection.get(i, j)
            })
        })
        .collect();

    for j in 0..k {
        let seen = T::from_u64(state.arm_obs[j]).expect("count fits");
        if seen < expected[j] / sched.halving {
            // Any arm with connection weight at least half the column
            // maximum qualifies; take the maximizer, smallest index first.
            let arm = column_argmax(connection, 0..k, j).expect("at least one arm");
            return Ok(Decision {
                arm,
                branch: Branch::ObsDeficit,
            });
        }
    }

    let instance = lp::build_cascade_constraints(
        connection,
        &state.mean_estimates,
        settings.family,
        settings.rhs_mode,
        settings.gap_floor,
    )?;
    if lp::is_member(&instance, &scaled_plays(state, sched)) {
        return Ok(Decision {
            arm: state.best_estimate_arm(),
            branch: Branch::Exploit,
        });
    }

    let pace = (sched.halving * sched.beta(state.explore_rounds))
        / T::from_usize(k).expect("arm count fits");
    for j in 0..k {
        if expected[j] < pace {
            // In-neighbor of the original graph, preferring the largest
            // thresholded connection weight into j.
            let arm = column_argmax(connection, graph.in_edges(j).iter().map(|&(i, _)| i), j)
                .ok_or(PolicyError::UnobservableArm(j))?;
            return Ok(Decision {
                arm,
                branch: Branch::ForcedExplore,
            });
        }
    }

    match lp::solve(&instance) {
        Ok(solution) => match largest_deficit_arm(state, &solution.c, sched) {
            Some(arm) => Ok(Decision {
                arm,
                branch: Branch::LpExplore,
            }),
            None => Err(PolicyError::NoLpCandidate { round: state.t + 1 }),
        },
        Err(LpError::InfeasibleColumn { constraint }) => {
            // Thresholding erased every path into this node; force-observe
            // it through its most reliable direct in-edge until eta decays.
            Ok(Decision {
                arm: strongest_in_neighbor(graph, constraint)?,
                branch: Branch::LpFallback,
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// Candidate maximizing `connection[i][j]` over `candidates`, ties to the
/// smallest index.
fn column_argmax<T: Real>(
    connection: &ConnectionMatrix<T>,
    candidates: impl Iterator<Item = usize>,
    j: usize,
) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for i in candidates {
        let w = connection.get(i, j);
        if best.is_none_or(|(_, bw)| w > bw) {
            best = Some((i, w));
        }
    }
    best.map(|(i, _)| i)
}

/// UCB1 over observation counts, as a baseline: any never-observed arm
/// first (smallest index), otherwise the largest
/// `mean + sqrt(2 ln t / m_j)`, ties to the smallest index.
pub fn ucb1_select<T: Real>(state: &PolicyState<T>) -> usize {
    let k = state.num_arms();
    if let Some(j) = (0..k).find(|&j| state.arm_obs[j] == 0) {
        return j;
    }
    let two = T::one() + T::one();
    let log_t = T::from_u64(state.t.max(1)).expect("round fits").ln();
    let mut best = 0;
    let mut best_score = T::neg_infinity();
    for j in 0..k {
        let m = T::from_u64(state.arm_obs[j]).expect("count fits");
        let score = state.mean_estimates[j] + (two * log_t / m).sqrt();
        if score > best_score {
            best = j;
            best_score = score;
        }
    }
    best
}

/// Exploration nodes: arms that carry the largest in-edge probability into
/// some node. Deficit repairs and forced exploration always land in this
/// set.
pub fn exploration_nodes<T: Real>(graph: &ProbGraph<T>) -> Vec<usize> {
    let k = graph.num_arms();
    let mut member = vec![false; k];
    for j in 0..k {
        let max = graph
            .in_edges(j)
            .iter()
            .map(|&(_, p)| p)
            .fold(None, |acc: Option<T>, p| Some(acc.map_or(p, |m| m.max(p))));
        let Some(max) = max else { continue };
        for &(i, p) in graph.in_edges(j) {
            if p == max {
                member[i] = true;
            }
        }
    }
    (0..k).filter(|&i| member[i]).collect()
}

/// Minimal exploration probability per arm: the smallest `p_ij` over the
/// nodes `j` whose in-edge maximum the arm attains, `None` for arms outside
/// the exploration set.
pub fn min_exploration_probs<T: Real>(graph: &ProbGraph<T>) -> Vec<Option<T>> {
    let k = graph.num_arms();
    let mut out = vec![None; k];
    for j in 0..k {
        let max = graph
            .in_edges(j)
            .iter()
            .map(|&(_, p)| p)
            .fold(None, |acc: Option<T>, p| Some(acc.map_or(p, |m| m.max(p))));
        let Some(max) = max else { continue };
        for &(i, p) in graph.in_edges(j) {
            if p == max {
                out[i] = Some(out[i].map_or(p, |m: T| m.min(p)));
            }
        }
    }
    out
}
