//! Reward generation, per-round feedback, and pseudo-regret accounting.
//!
//! Rewards are drawn fresh every round for all arms even when few are
//! observed; together with a fixed draw order (realization first, then the
//! reward vector) this keeps seeded runs reproducible across feedback modes.

use rand::distr::{Distribution, StandardUniform};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::ProbGraph;
use crate::Real;

/// Bernoulli means are clamped this far away from {0, 1} inside [`kl`] so
/// empirical means that hit the boundary cannot produce infinities.
pub const BERNOULLI_KL_CLAMP: f64 = 1e-6;

/// Reward distribution family. Every family here is 1-sub-Gaussian and is
/// identified by its mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[serde(alias = "gaussian")]
    GaussianUnitVariance,
    Bernoulli,
}

/// Which observation rule the environment applies each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeedbackMode {
    OneStep,
    Cascade,
}

impl std::fmt::Display for FeedbackMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FeedbackMode::OneStep => write!(f, "one-step"),
            FeedbackMode::Cascade => write!(f, "cascade"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("mean vector must be non-empty")]
    EmptyMeans,
    #[error("mean {value} at index {index} is not finite")]
    NonFiniteMean { index: usize, value: f64 },
    #[error("bernoulli mean {value} at index {index} must lie in (0, 1)")]
    BernoulliMeanOutOfRange { index: usize, value: f64 },
    #[error("kl divergence needs finite means, got ({a}, {b})")]
    NonFiniteKlInput { a: f64, b: f64 },
    #[error("model has {model} arms but graph has {graph}")]
    ArmCountMismatch { model: usize, graph: usize },
}

/// A reward distribution family plus its mean vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardModel<T> {
    family: Family,
    theta: Vec<T>,
    best: usize,
}

impl<T: Real> RewardModel<T> {
    pub fn new(family: Family, theta: Vec<T>) -> Result<Self, EnvError> {
        if theta.is_empty() {
            return Err(EnvError::EmptyMeans);
        }
        for (index, &v) in theta.iter().enumerate() {
            if !v.is_finite() {
                return Err(EnvError::NonFiniteMean {
                    index,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
            if family == Family::Bernoulli && !(v > T::zero() && v < T::one()) {
                return Err(EnvError::BernoulliMeanOutOfRange {
                    index,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        let best = argmax(&theta);
        Ok(Self { family, theta, best })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn means(&self) -> &[T] {
        &self.theta
    }

    pub fn num_arms(&self) -> usize {
        self.theta.len()
    }

    /// Index of the largest mean; ties resolve to the smallest index.
    pub fn best_arm(&self) -> usize {
        self.best
    }

    /// True-mean gap of `arm` against the best arm.
    pub fn gap(&self, arm: usize) -> T {
        self.theta[self.best] - self.theta[arm]
    }

    pub fn max_gap(&self) -> T {
        self.theta
            .iter()
            .map(|&v| self.theta[self.best] - v)
            .fold(T::zero(), T::max)
    }

    /// Whether some other arm ties the best mean exactly.
    pub fn has_tied_best(&self) -> bool {
        self.theta
            .iter()
            .enumerate()
            .any(|(i, &v)| i != self.best && v == self.theta[self.best])
    }

    /// Draws one reward per arm. Gaussian arms get mean plus unit-variance
    /// noise; Bernoulli arms get {0, 1}. Deterministic given the stream.
    pub fn sample_rewards<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T>
    where
        StandardUniform: Distribution<T>,
        StandardNormal: Distribution<T>,
    {
        self.theta
            .iter()
            .map(|&mean| match self.family {
                Family::GaussianUnitVariance => {
                    let z: T = StandardNormal.sample(rng);
                    mean + z
                }
                Family::Bernoulli => {
                    let u: T = rng.random();
                    if u < mean {
                        T::one()
                    } else {
                        T::zero()
                    }
                }
            })
            .collect()
    }
}

pub(crate) fn argmax<T: Real>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// What the learner saw in one round: the arm it played and every
/// `(arm, reward)` pair revealed by the feedback rule.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackEvent<T> {
    pub round: u64,
    pub arm: usize,
    pub observations: Vec<(usize, T)>,
}

/// Cumulative pseudo-regret of one seeded run, recorded at checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace<T> {
    pub horizon: u64,
    /// `(t, cumulative pseudo-regret at the end of round t)`, ascending in t.
    pub checkpoints: Vec<(u64, T)>,
    pub seed: u64,
    pub config_digest: u64,
}

/// Advances the environment one round: draws a realization and a reward
/// vector, applies the feedback rule for `mode`, and returns the revealed
/// observations together with the pseudo-regret increment
/// `theta_best - theta_arm`.
pub fn env_step<T: Real, R: Rng + ?Sized>(
    graph: &ProbGraph<T>,
    model: &RewardModel<T>,
    mode: FeedbackMode,
    arm: usize,
    round: u64,
    rng: &mut R,
) -> Result<(FeedbackEvent<T>, T), EnvError>
where
    StandardUniform: Distribution<T>,
    StandardNormal: Distribution<T>,
{
    if model.num_arms() != graph.num_arms() {
        return Err(EnvError::ArmCountMismatch {
            model: model.num_arms(),
            graph: graph.num_arms(),
        });
    }
    assert!(arm < graph.num_arms(), "arm out of range");
    let realization = graph.sample_realization(rng);
    let rewards = model.sample_rewards(rng);
    let observed = match mode {
        FeedbackMode::OneStep => realization.one_step_observed(arm),
        FeedbackMode::Cascade => realization.cascade_observed(arm),
    };
    let observations = observed.into_iter().map(|j| (j, rewards[j])).collect();
    let event = FeedbackEvent {
        round,
        arm,
        observations,
    };
    Ok((event, model.gap(arm)))
}

/// KL divergence between two distributions of the family, identified by
/// their means. Gaussian unit variance: `(a - b)^2 / 2`. Bernoulli:
/// `a ln(a/b) + (1-a) ln((1-a)/(1-b))` with means clamped to
/// `[1e-6, 1 - 1e-6]`. Zero exactly when the (clamped) means agree.
pub fn kl<T: Real>(family: Family, mean_a: T, mean_b: T) -> Result<T, EnvError> {
    if !mean_a.is_finite() || !mean_b.is_finite() {
        return Err(EnvError::NonFiniteKlInput {
            a: mean_a.to_f64().unwrap_or(f64::NAN),
            b: mean_b.to_f64().unwrap_or(f64::NAN),
        });
    }
    let two = T::one() + T::one();
    Ok(match family {
        Family::GaussianUnitVariance => {
            let d = mean_a - mean_b;
            d * d / two
        }
        Family::Bernoulli => {
            let lo = T::from_f64(BERNOULLI_KL_CLAMP).expect("clamp fits the scalar");
            let hi = T::one() - lo;
            let a = mean_a.max(lo).min(hi);
            let b = mean_b.max(lo).min(hi);
            if a == b {
                T::zero()
            } else {
                a * (a / b).ln() + (T::one() - a) * ((T::one() - a) / (T::one() - b)).ln()
            }
        }
    })
}
