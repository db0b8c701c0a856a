//! Extensive-form games with per-observer action visibility.

mod format;
mod infosets;
mod payoff;
mod tree;

pub use format::{load, load_str, save, save_string, FORMAT_VERSION};
pub use infosets::{
    compute_infosets, compute_pooled_infosets, compute_public_states, validate_perfect_recall,
    validate_public_turn_taking, validate_public_turn_taking_with, Diagnostics, InfoSet, InfoSetPartition,
    PublicStatePartition, NO_SET,
};
pub use payoff::{big_to_f64, expected_payoff, expected_payoff_with, rational_to_f64, BehavioralProfile, Scalar};
pub use tree::{
    Action, CoordTag, GameTree, Interner, Node, NodeCounts, NodeId, NodeKind, Obs, Player, PlayerId, Rational, Role,
    TreeBuilder,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("invalid game: {0}")]
    Invalid(String),
    #[error("node {node}, action {action}: visibility map does not cover every player")]
    Visibility { node: NodeId, action: usize },
    #[error("argument error: {0}")]
    Argument(String),
    #[error("profile error: {0}")]
    Profile(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
