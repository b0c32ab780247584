//! The two six-node benchmark graphs with their reward constructions.

use std::fmt;
use std::str::FromStr;

use super::config::{ConfigError, EdgeSpec, ExperimentConfig, PolicyKind};
use crate::env::{Family, FeedbackMode};

/// Default reward-gap of the cycle preset.
pub const DEFAULT_DELTA: f64 = 0.2;
/// Default best-arm mean of the random preset.
pub const RANDOM6_BEST_MEAN: f64 = 0.6;
pub const RANDOM6_BASE_MEAN: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetName {
    Cycle6,
    Random6,
}

impl FromStr for PresetName {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cycle6" => Ok(PresetName::Cycle6),
            "random6" => Ok(PresetName::Random6),
            other => Err(ConfigError::Invalid {
                field: "preset",
                message: format!("unknown preset `{other}`, expected cycle6 or random6"),
            }),
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PresetName::Cycle6 => write!(f, "cycle6"),
            PresetName::Random6 => write!(f, "random6"),
        }
    }
}

/// Preset knobs: `delta` shifts the cycle's best arm above the 0.5 base,
/// `best` picks which node of the random graph gets the 0.6 mean.
#[derive(Debug, Clone, Copy, Default)]
pub struct PresetOptions {
    pub delta: Option<f64>,
    pub best: Option<usize>,
}

/// Arm labels used on the CLI (`A` through `F`).
pub fn parse_arm_letter(s: &str) -> Result<usize, ConfigError> {
    let err = || ConfigError::Invalid {
        field: "best",
        message: format!("expected an arm letter A-F, got `{s}`"),
    };
    let mut chars = s.chars();
    let (Some(c), None) = (chars.next(), chars.next()) else {
        return Err(err());
    };
    let idx = (c.to_ascii_uppercase() as i32) - ('A' as i32);
    if (0..6).contains(&idx) {
        Ok(idx as usize)
    } else {
        Err(err())
    }
}

fn cycle6_edges() -> Vec<EdgeSpec> {
    let probs = [0.7, 0.4, 0.7, 0.3, 0.9, 0.1];
    (0..6)
        .map(|i| EdgeSpec {
            src: i,
            dst: (i + 1) % 6,
            prob: probs[i],
        })
        .collect()
}

fn random6_edges() -> Vec<EdgeSpec> {
    // A=0 .. F=5
    [
        (0, 2, 0.3),
        (1, 0, 0.2),
        (1, 1, 0.2),
        (1, 2, 0.4),
        (1, 4, 0.5),
        (2, 1, 0.4),
        (2, 4, 0.5),
        (3, 5, 0.6),
        (3, 0, 0.4),
        (3, 2, 0.7),
        (4, 2, 0.3),
        (4, 3, 0.5),
        (5, 5, 0.6),
    ]
    .into_iter()
    .map(|(src, dst, prob)| EdgeSpec { src, dst, prob })
    .collect()
}

/// Builds the experiment config for a named benchmark graph: unit-variance
/// Gaussian rewards, cascade feedback with the cascade policy, 10 runs over
/// a 100k horizon. The resulting graph is re-validated even though both
/// presets are observable by construction.
pub fn preset(name: PresetName, options: PresetOptions) -> Result<ExperimentConfig, ConfigError> {
    let (edges, theta) = match name {
        PresetName::Cycle6 => {
            if options.best.is_some() {
                return Err(ConfigError::Invalid {
                    field: "best",
                    message: "cycle6 takes --delta, not --best".into(),
                });
            }
            let delta = options.delta.unwrap_or(DEFAULT_DELTA);
            if !(delta.is_finite() && delta > 0.0) {
                return Err(ConfigError::Invalid {
                    field: "delta",
                    message: format!("must be positive and finite, got {delta}"),
                });
            }
            let mut theta = vec![0.5; 6];
            theta[0] = 0.5 + delta;
            (cycle6_edges(), theta)
        }
        PresetName::Random6 => {
            if options.delta.is_some() {
                return Err(ConfigError::Invalid {
                    field: "delta",
                    message: "random6 takes --best, not --delta".into(),
                });
            }
            let best = options.best.unwrap_or(0);
            if best >= 6 {
                return Err(ConfigError::Invalid {
                    field: "best",
                    message: format!("arm index {best} out of range"),
                });
            }
            let mut theta = vec![RANDOM6_BASE_MEAN; 6];
            theta[best] = RANDOM6_BEST_MEAN;
            (random6_edges(), theta)
        }
    };
    let cfg = ExperimentConfig {
        num_arms: 6,
        edges,
        family: Family::GaussianUnitVariance,
        theta,
        mode: FeedbackMode::Cascade,
        policy: PolicyKind::Cascade,
        horizon: 100_000,
        runs: 10,
        seed: 42,
        beta_a: 0.5,
        beta_b: 0.5,
        eta_min: 0.05,
        eta_exp: 1.0 / 3.0,
        lp_scale: 16.0,
        halving: 2.0,
        mc_samples: None,
        gap_floor: 1e-6,
        rhs_mode: None,
        checkpoint_factor: 1.3,
        out: None,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle6_builds_and_validates() {
        let cfg = preset(
            PresetName::Cycle6,
            PresetOptions {
                delta: Some(0.2),
                best: None,
            },
        )
        .unwrap();
        assert_eq!(cfg.edges.len(), 6);
        assert_eq!(cfg.theta[0], 0.7);
        assert!(cfg.graph().unwrap().validate().is_ok());
    }

    #[test]
    fn random6_places_the_best_mean() {
        let cfg = preset(
            PresetName::Random6,
            PresetOptions {
                delta: None,
                best: Some(5),
            },
        )
        .unwrap();
        assert_eq!(cfg.theta, vec![0.5, 0.5, 0.5, 0.5, 0.5, 0.6]);
        assert_eq!(cfg.edges.len(), 13);
    }

    #[test]
    fn random6_default_best_is_observable() {
        let cfg = preset(PresetName::Random6, PresetOptions::default()).unwrap();
        assert_eq!(cfg.theta[0], 0.6);
        assert!(cfg.graph().unwrap().validate().is_ok());
    }

    #[test]
    fn option_mismatch_is_rejected() {
        assert!(preset(
            PresetName::Cycle6,
            PresetOptions {
                delta: None,
                best: Some(0)
            }
        )
        .is_err());
        assert!(preset(
            PresetName::Random6,
            PresetOptions {
                delta: Some(0.1),
                best: None
            }
        )
        .is_err());
    }

    #[test]
    fn arm_letters_parse() {
        assert_eq!(parse_arm_letter("A").unwrap(), 0);
        assert_eq!(parse_arm_letter("f").unwrap(), 5);
        assert!(parse_arm_letter("G").is_err());
        assert!(parse_arm_letter("AB").is_err());
    }
}
