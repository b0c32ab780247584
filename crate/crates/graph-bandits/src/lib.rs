//! Stochastic online learning with probabilistic graph feedback.
//!
//! A feedback graph attaches a triggering probability to every directed edge
//! `(i, j)`: playing arm `i` reveals a reward sample of arm `j` when the edge
//! is live that round (one-step triggering), or when a live directed path
//! runs from `i` to `j` (cascade triggering). This crate provides
//!
//! * [`graph`] — probabilistic feedback graphs, per-round realizations,
//!   observation sets, and exact / Monte-Carlo path-connection probabilities;
//! * [`mod@env`] — reward models (unit-variance Gaussian, Bernoulli), the
//!   per-round environment step, and pseudo-regret accounting;
//! * [`lp`] — the exploration-rate constraint systems, membership tests, and
//!   a dense simplex solver;
//! * [`policies`] — the three LP-guided learning policies plus UCB1 as a
//!   baseline;
//! * [`bounds`] — asymptotic lower-bound constants for both feedback modes;
//! * [`harness`] — experiment configuration, seeded multi-run execution,
//!   presets, CSV output, and the CLI entry points.
//!
//! Core numerics are generic over the scalar type through [`Real`]; the
//! aliases below fix `f64` (and `f32`) for callers that do not care.

pub mod bounds;
pub mod env;
pub mod graph;
pub mod harness;
pub mod lp;
pub mod policies;

use std::fmt::{Debug, Display};

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive};

/// Scalar type used by the core math. `f64` and `f32` both qualify.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + 'static {}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Debug + Display + 'static {}

/// Seedable random stream used by the harness and recommended for callers;
/// its output is stable across platforms and releases.
pub type ExperimentRng = rand_chacha::ChaCha12Rng;

pub type ProbGraph64 = graph::ProbGraph<f64>;
pub type ProbGraph32 = graph::ProbGraph<f32>;
pub type ConnectionMatrix64 = graph::ConnectionMatrix<f64>;
pub type ConnectionMatrix32 = graph::ConnectionMatrix<f32>;
pub type RewardModel64 = env::RewardModel<f64>;
pub type RewardModel32 = env::RewardModel<f32>;
pub type LpInstance64 = lp::LpInstance<f64>;
pub type LpInstance32 = lp::LpInstance<f32>;
pub type PolicyState64 = policies::PolicyState<f64>;
pub type PolicyState32 = policies::PolicyState<f32>;
pub type Schedules64 = policies::Schedules<f64>;
pub type BoundReport64 = bounds::BoundReport<f64>;

