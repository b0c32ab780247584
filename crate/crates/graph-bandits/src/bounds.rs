//! Asymptotic lower-bound constants.
//!
//! For a fixed instance, any consistent learner pays at least
//! `value * ln T` regret asymptotically, where `value` is the minimum of
//! `<c, gaps>` over the exploration-rate sets built from the true means.
//! The one-step bound uses the direct edge probabilities; the cascade bound
//! uses path-connection probabilities, which are intractable exactly in
//! general, so the report records where its connection matrix came from.

use thiserror::Error;

use crate::env::{FeedbackMode, RewardModel};
use crate::graph::{ConnectionMatrix, ConnectionSource, ProbGraph};
use crate::lp::{self, LpError, RhsMode};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("the bound needs a unique best arm, arms {0} and {1} tie at the top")]
    TiedBestArm(usize, usize),
    #[error("model has {model} arms but the graph side has {graph}")]
    ArmCountMismatch { model: usize, graph: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// The log-T regret coefficient together with the witnessing rate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    /// `<witness, gaps>`, the coefficient of `ln T`.
    pub value: T,
    /// A feasible rate vector attaining the value.
    pub witness: Vec<T>,
    pub mode: FeedbackMode,
    pub source: ConnectionSource,
}

fn reject_ties<T: Real>(model: &RewardModel<T>) -> Result<(), BoundError> {
    let best = model.best_arm();
    for (j, &v) in model.means().iter().enumerate() {
        if j != best && v == model.means()[best] {
            return Err(BoundError::TiedBestArm(best, j));
        }
    }
    Ok(())
}

/// Lower-bound constant for one-step triggering: the inverse-KL system over
/// the direct edge probabilities, solved at the true means.
pub fn lower_bound_one_step<T: Real>(
    graph: &ProbGraph<T>,
    model: &RewardModel<T>,
    gap_floor: T,
) -> Result<BoundReport<T>, BoundError> {
    if graph.num_arms() != model.num_arms() {
        return Err(BoundError::ArmCountMismatch {
            model: model.num_arms(),
            graph: graph.num_arms(),
        });
    }
    reject_ties(model)?;
    let instance = lp::build_one_step_constraints(
        graph,
        model.means(),
        model.family(),
        RhsMode::InverseKl,
        gap_floor,
    )?;
    let solution = lp::solve(&instance)?;
    Ok(BoundReport {
        value: solution.value,
        witness: solution.c,
        mode: FeedbackMode::OneStep,
        source: ConnectionSource::Exact,
    })
}

/// Lower-bound constant for cascade triggering over a connection matrix.
/// `source` says whether the matrix was enumerated exactly or estimated;
/// it is carried into the report verbatim.
pub fn lower_bound_cascade<T: Real>(
    connection: &ConnectionMatrix<T>,
    source: ConnectionSource,
    model: &RewardModel<T>,
    gap_floor: T,
) -> Result<BoundReport<T>, BoundError> {
    if connection.k() != model.num_arms() {
        return Err(BoundError::ArmCountMismatch {
            model: model.num_arms(),
            graph: connection.k(),
        });
    }
    reject_ties(model)?;
    let instance = lp::build_cascade_constraints(
        connection,
        model.means(),
        model.family(),
        RhsMode::InverseKl,
        gap_floor,
    )?;
    let solution = lp::solve(&instance)?;
    Ok(BoundReport {
        value: solution.value,
        witness: solution.c,
        mode: FeedbackMode::Cascade,
        source,
    })
}
