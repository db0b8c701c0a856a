//! Brute-force ground truth on small games: reduced-plan enumeration, an
//! exact simplex for matrix games, TMECor and two-player zero-sum values.

mod lp;
mod plans;
mod values;

pub use lp::{solve_matrix_game, MatrixGameSolution};
pub use plans::{
    enumerate_reduced_plans, merge_plans, projected_plan_count, pure_payoff, pure_value, sample_reduced_plan, Plan,
};
pub use values::{
    approx, full_info_value, independent_value, ne_value_2p0s, tmecor_value, Certificate, IndependentValue,
    OracleReport, OracleValue, PlanMatrix, SupportEntry,
};

pub use crate::games::micro::{corpus, MicroGame};

use thiserror::Error;

use crate::game_core::{GameError, NodeId};

/// Default cap on enumerated plans and matrix cells.
pub const DEFAULT_BUDGET: u128 = 1_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("projected {projected} exceeds the budget of {budget}")]
    Budget { projected: u128, budget: u128 },
    #[error("plan does not cover decision node {node}")]
    IncompletePlan { node: NodeId },
    #[error("argument error: {0}")]
    Argument(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Game(#[from] GameError),
}
