//! CFR+ over two-player zero-sum trees, exact best responses and
//! exploitability.

mod br;
mod cfr;

pub use br::{best_response, exploitability, BestResponse};
pub use cfr::{cfr_plus, CfrPlus, RegretState};

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game_core::{validate_perfect_recall, GameError, GameTree, InfoSetPartition, NodeKind, PlayerId, Role};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// The two strategic players of a zero-sum tree, coordinator (or the
/// first strategic player) first.
pub fn two_players(game: &GameTree) -> Result<[PlayerId; 2], SolverError> {
    let mut ps = game.strategic_players();
    if ps.len() != 2 {
        return Err(SolverError::Precondition(format!("expected exactly two strategic players, found {}", ps.len())));
    }
    if game.role(ps[1]) == Role::Coordinator {
        ps.swap(0, 1);
    }
    Ok([ps[0], ps[1]])
}

/// Checks that `partition` fits `game` and gives both players perfect recall.
pub fn check_partition(game: &GameTree, partition: &InfoSetPartition) -> Result<[PlayerId; 2], SolverError> {
    let players = two_players(game)?;
    if partition.of_node.len() != game.nodes.len() {
        return Err(SolverError::Precondition("partition does not match the game".into()));
    }
    for (id, n) in game.nodes.iter().enumerate() {
        if n.kind == NodeKind::Decision {
            let s = partition.of_node[id] as usize;
            if s >= partition.sets.len() || partition.sets[s].player != n.player {
                return Err(SolverError::Precondition(format!("node {id} has no infoset of its player")));
            }
        }
    }
    for p in players {
        let d = validate_perfect_recall(game, partition, p);
        if !d.ok {
            return Err(SolverError::Precondition(format!(
                "player {} lacks perfect recall ({} violations): {:?}",
                game.players[p].name,
                d.pairs.len(),
                d.messages.first()
            )));
        }
    }
    Ok(players)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub iteration: u64,
    pub elapsed_ms: f64,
    pub exploitability: f64,
    pub payoff_scale: f64,
}

/// Convergence log written as CSV with a fixed header.
#[derive(Clone, Debug)]
pub struct ConvergenceLog {
    /// Evaluate every `cadence` iterations (0 disables periodic rows).
    pub cadence: u64,
    pub payoff_scale: f64,
    pub rows: Vec<LogRow>,
    start: Instant,
}

impl ConvergenceLog {
    pub fn new(cadence: u64, payoff_scale: f64) -> Self {
        ConvergenceLog { cadence, payoff_scale, rows: Vec::new(), start: Instant::now() }
    }

    pub fn restart_clock(&mut self) {
        self.start = Instant::now();
    }

    pub fn due(&self, iteration: u64) -> bool {
        self.cadence > 0 && iteration % self.cadence == 0
    }

    pub fn record(&mut self, iteration: u64, exploitability: f64) {
        if self.rows.last().is_some_and(|r| r.iteration >= iteration) {
            return;
        }
        let mut elapsed_ms = self.start.elapsed().as_secs_f64() * 1e3;
        if let Some(last) = self.rows.last() {
            if elapsed_ms <= last.elapsed_ms {
                elapsed_ms = f64::from_bits(last.elapsed_ms.to_bits() + 1);
            }
        }
        self.rows.push(LogRow { iteration, elapsed_ms, exploitability, payoff_scale: self.payoff_scale });
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SolverError> {
        let mut wr = csv::Writer::from_writer(w);
        for r in &self.rows {
            wr.serialize(r)?;
        }
        if self.rows.is_empty() {
            wr.write_record(["iteration", "elapsed_ms", "exploitability", "payoff_scale"])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), SolverError> {
        self.write_csv(std::fs::File::create(path)?)
    }
}
