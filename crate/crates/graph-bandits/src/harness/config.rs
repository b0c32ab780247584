//! Experiment configuration: the on-disk TOML schema plus validation.
//!
//! The file is flat key/value with a nested edge list:
//!
//! ```toml
//! num_arms = 3
//! edges = [
//!     { src = 0, dst = 0, prob = 1.0 },
//!     { src = 1, dst = 1, prob = 1.0 },
//!     { src = 2, dst = 2, prob = 1.0 },
//! ]
//! family = "gaussian-unit-variance"
//! theta = [0.9, 0.7, 0.5]
//! mode = "one-step"
//! policy = "one-step-general"
//! horizon = 100000
//! runs = 10
//! seed = 42
//! ```
//!
//! Schedule constants, the Monte-Carlo sample count, the gap floor, the
//! right-hand-side convention, and the checkpoint factor are optional and
//! default as documented on the fields.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{Family, FeedbackMode, RewardModel};
use crate::graph::ProbGraph;
use crate::lp::RhsMode;
use crate::policies::{PolicySettings, Schedules};

/// Confidence parameter of the default Monte-Carlo sample-count rule.
pub const MC_DELTA: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("field `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        message: message.into(),
    }
}

/// One directed edge record of the config graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub src: usize,
    pub dst: usize,
    pub prob: f64,
}

/// Which selection rule drives the runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    OneStepUniform,
    OneStepGeneral,
    Cascade,
    Ucb1,
    UniformRandom,
}

impl PolicyKind {
    /// The right-hand-side convention the policy uses unless the config
    /// overrides it.
    pub fn default_rhs(self) -> RhsMode {
        match self {
            PolicyKind::Cascade => RhsMode::InverseGapSquared,
            _ => RhsMode::InverseKl,
        }
    }
}

fn default_beta_a() -> f64 {
    0.5
}
fn default_beta_b() -> f64 {
    0.5
}
fn default_eta_min() -> f64 {
    0.05
}
fn default_eta_exp() -> f64 {
    1.0 / 3.0
}
fn default_lp_scale() -> f64 {
    16.0
}
fn default_halving() -> f64 {
    2.0
}
fn default_gap_floor() -> f64 {
    1e-6
}
fn default_checkpoint_factor() -> f64 {
    1.3
}

/// A complete experiment description; serializes to the documented TOML
/// schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub num_arms: usize,
    pub edges: Vec<EdgeSpec>,
    pub family: Family,
    pub theta: Vec<f64>,
    pub mode: FeedbackMode,
    pub policy: PolicyKind,
    pub horizon: u64,
    pub runs: u32,
    pub seed: u64,
    #[serde(default = "default_beta_a")]
    pub beta_a: f64,
    #[serde(default = "default_beta_b")]
    pub beta_b: f64,
    #[serde(default = "default_eta_min")]
    pub eta_min: f64,
    #[serde(default = "default_eta_exp")]
    pub eta_exp: f64,
    #[serde(default = "default_lp_scale")]
    pub lp_scale: f64,
    #[serde(default = "default_halving")]
    pub halving: f64,
    /// Connection-matrix sample count for cascade runs; when absent it is
    /// `ceil(2/eta_min^2 * ln(2 K^2 / 1e-3))`, which keeps the estimate
    /// within `eta/2` of the truth for every `eta >= eta_min` with high
    /// probability.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<u64>,
    #[serde(default = "default_gap_floor")]
    pub gap_floor: f64,
    /// Right-hand-side convention override; defaults by policy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs_mode: Option<RhsMode>,
    #[serde(default = "default_checkpoint_factor")]
    pub checkpoint_factor: f64,
    /// Output directory; the CLI `--out` flag takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every invariant and returns the first violation, naming the
    /// offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.horizon < 1 {
            return Err(invalid("horizon", "must be at least 1"));
        }
        if self.runs < 1 {
            return Err(invalid("runs", "must be at least 1"));
        }
        if self.num_arms == 0 {
            return Err(invalid("num_arms", "must be at least 1"));
        }
        if self.theta.len() != self.num_arms {
            return Err(invalid(
                "theta",
                format!("has {} entries, expected {}", self.theta.len(), self.num_arms),
            ));
        }
        let graph = self.graph().map_err(|e| invalid("edges", e.to_string()))?;
        graph
            .validate()
            .map_err(|e| invalid("edges", e.to_string()))?;
        self.model().map_err(|e| invalid("theta", e.to_string()))?;
        if self.policy == PolicyKind::Cascade && self.mode != FeedbackMode::Cascade {
            return Err(invalid("policy", "the cascade policy requires mode = \"cascade\""));
        }
        if self.policy == PolicyKind::OneStepUniform && graph.uniform_prob().is_none() {
            return Err(invalid(
                "policy",
                "the one-step-uniform policy requires a single common edge probability",
            ));
        }
        self.schedules()
            .validate()
            .map_err(|e| invalid("beta_a", e.to_string()))?;
        if !(self.gap_floor > 0.0 && self.gap_floor.is_finite()) {
            return Err(invalid("gap_floor", "must be positive and finite"));
        }
        if !(self.checkpoint_factor > 1.0 && self.checkpoint_factor.is_finite()) {
            return Err(invalid("checkpoint_factor", "must exceed 1"));
        }
        if self.mc_samples == Some(0) {
            return Err(invalid("mc_samples", "must be at least 1"));
        }
        Ok(())
    }

    pub fn graph(&self) -> Result<ProbGraph<f64>, crate::graph::GraphError> {
        ProbGraph::new(
            self.num_arms,
            self.edges.iter().map(|e| (e.src, e.dst, e.prob)),
        )
    }

    pub fn model(&self) -> Result<RewardModel<f64>, crate::env::EnvError> {
        RewardModel::new(self.family, self.theta.clone())
    }

    pub fn schedules(&self) -> Schedules<f64> {
        Schedules {
            beta_a: self.beta_a,
            beta_b: self.beta_b,
            eta_min: self.eta_min,
            eta_exp: self.eta_exp,
            lp_scale: self.lp_scale,
            halving: self.halving,
        }
    }

    pub fn rhs(&self) -> RhsMode {
        self.rhs_mode.unwrap_or_else(|| self.policy.default_rhs())
    }

    pub fn policy_settings(&self) -> PolicySettings<f64> {
        PolicySettings {
            family: self.family,
            gap_floor: self.gap_floor,
            rhs_mode: self.rhs(),
            schedules: self.schedules(),
        }
    }

    /// Effective Monte-Carlo sample count for connection estimation.
    pub fn effective_mc_samples(&self) -> u64 {
        self.mc_samples.unwrap_or_else(|| {
            let k = self.num_arms as f64;
            let n = 2.0 / (self.eta_min * self.eta_min) * (2.0 * k * k / MC_DELTA).ln();
            n.ceil() as u64
        })
    }

    /// FNV-1a digest of the canonical TOML form; identifies the config in
    /// traces.
    pub fn digest(&self) -> u64 {
        let mut hash = 0xcbf2_9ce4_8422_2325u64;
        for byte in self.to_toml().bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        hash
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bandit_config() -> ExperimentConfig {
        ExperimentConfig {
            num_arms: 3,
            edges: vec![
                EdgeSpec { src: 0, dst: 0, prob: 1.0 },
                EdgeSpec { src: 1, dst: 1, prob: 1.0 },
                EdgeSpec { src: 2, dst: 2, prob: 1.0 },
            ],
            family: Family::GaussianUnitVariance,
            theta: vec![0.9, 0.7, 0.5],
            mode: FeedbackMode::OneStep,
            policy: PolicyKind::OneStepGeneral,
            horizon: 1000,
            runs: 2,
            seed: 7,
            beta_a: default_beta_a(),
            beta_b: default_beta_b(),
            eta_min: default_eta_min(),
            eta_exp: default_eta_exp(),
            lp_scale: default_lp_scale(),
            halving: default_halving(),
            mc_samples: None,
            gap_floor: default_gap_floor(),
            rhs_mode: None,
            checkpoint_factor: default_checkpoint_factor(),
            out: None,
        }
    }

    #[test]
    fn toml_round_trip() {
        let cfg = bandit_config();
        let text = cfg.to_toml();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn defaults_fill_in_when_absent() {
        let text = r#"
num_arms = 2
edges = [ { src = 0, dst = 1, prob = 0.5 }, { src = 1, dst = 0, prob = 0.5 } ]
family = "gaussian-unit-variance"
theta = [0.7, 0.5]
mode = "one-step"
policy = "one-step-uniform"
horizon = 100
runs = 1
seed = 1
"#;
        let cfg: ExperimentConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.beta_a, 0.5);
        assert_eq!(cfg.lp_scale, 16.0);
        assert_eq!(cfg.halving, 2.0);
        assert!(cfg.validate().is_ok());
        // ceil(2/0.05^2 * ln(2*4/1e-3)) = ceil(800 * ln 8000) = ceil(7189.76)
        assert_eq!(cfg.effective_mc_samples(), 7190);
    }

    #[test]
    fn validation_names_the_offending_field() {
        let mut cfg = bandit_config();
        cfg.horizon = 0;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("horizon"), "{err}");

        let mut cfg = bandit_config();
        cfg.policy = PolicyKind::Cascade;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("policy"), "{err}");

        let mut cfg = bandit_config();
        cfg.edges[0].prob = 0.5;
        cfg.policy = PolicyKind::OneStepUniform;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("policy"), "{err}");

        let mut cfg = bandit_config();
        cfg.edges.remove(0);
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("edges"), "{err}");
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let cfg = bandit_config();
        assert_eq!(cfg.digest(), cfg.digest());
        let mut other = bandit_config();
        other.seed = 8;
        assert_ne!(cfg.digest(), other.digest());
    }
}
