//! Strategy maps between a team game and its MPTA transform, and exact
//! payoff-equivalence checks.

mod check;
mod mapping;

pub use check::{check_payoff_equivalence, EquivalenceReport, Violation};
pub use mapping::{
    build_mapping, map_coordinator_plan, map_team_mixture, map_team_plan, MappedTeamStrategy, MappingEntry, PlanMapping,
};

use thiserror::Error;

use crate::game_core::{GameError, NodeId};
use crate::oracle::OracleError;
use crate::transform::TransformError;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("mapping error: {0}")]
    Mapping(String),
    #[error("coordinator plan gives different actions to nodes {0} and {1} of one original infoset")]
    Inconsistent(NodeId, NodeId),
    #[error("mixture weights sum to {0}, not 1")]
    Weights(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Game(#[from] GameError),
}
