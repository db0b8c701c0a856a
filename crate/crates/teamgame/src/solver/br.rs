use serde::{Deserialize, Serialize};

use crate::game_core::{rational_to_f64, BehavioralProfile, GameTree, InfoSetPartition, NodeId, NodeKind, PlayerId};

use super::{check_partition, SolverError};

/// A pure reduced plan (`plan[infoset]` is the chosen action index for the
/// responder's infosets it can reach) and its expected value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    pub plan: Vec<Option<usize>>,
    pub value: f64,
}

struct Ctx<'a> {
    game: &'a GameTree,
    partition: &'a InfoSetPartition,
    responder: PlayerId,
    /// Reach of chance and the fixed player.
    reach: Vec<f64>,
    value: Vec<Option<f64>>,
    choice: Vec<Option<usize>>,
}

impl Ctx<'_> {
    /// Reach-weighted value of the subtree at `h` under the responder's
    /// (lazily chosen) best response.
    fn value(&mut self, h: NodeId) -> f64 {
        if let Some(v) = self.value[h] {
            return v;
        }
        let node = &self.game.nodes[h];
        let v = match node.kind {
            NodeKind::Terminal => self.reach[h] * rational_to_f64(&node.payoff[self.responder]),
            NodeKind::Decision if node.player == self.responder => {
                let set = self.partition.of_node[h] as usize;
                let a = match self.choice[set] {
                    Some(a) => a,
                    None => self.choose(set),
                };
                self.value(node.children[a])
            }
            _ => node.children.iter().map(|&c| self.value(c)).sum(),
        };
        self.value[h] = Some(v);
        v
    }

    fn choose(&mut self, set: usize) -> usize {
        let nodes = self.partition.sets[set].nodes.clone();
        let n = self.partition.sets[set].actions.len();
        let mut totals = vec![0.0; n];
        for &h in &nodes {
            for (k, t) in totals.iter_mut().enumerate() {
                *t += self.value(self.game.nodes[h].children[k]);
            }
        }
        let mut best = 0;
        for k in 1..n {
            if totals[k] > totals[best] + 1e-12 * totals[best].abs().max(1.0) {
                best = k;
            }
        }
        self.choice[set] = Some(best);
        best
    }
}

fn reach_of(game: &GameTree, partition: &InfoSetPartition, responder: PlayerId, fixed: &BehavioralProfile) -> Vec<f64> {
    let mut reach = vec![0.0; game.nodes.len()];
    reach[game.root] = 1.0;
    // Pre-order ids: parents precede children.
    for id in 0..game.nodes.len() {
        let node = &game.nodes[id];
        for (k, &c) in node.children.iter().enumerate() {
            let p = match node.kind {
                NodeKind::Chance => rational_to_f64(&node.probs[k]),
                NodeKind::Decision if node.player == responder => 1.0,
                NodeKind::Decision => fixed.probs[partition.of_node[id] as usize][k],
                NodeKind::Terminal => unreachable!(),
            };
            reach[c] = reach[id] * p;
        }
    }
    reach
}

/// Exact best response of `responder` against the other player's part of
/// `fixed`. Ties go to the lowest action index.
pub fn best_response(
    game: &GameTree,
    partition: &InfoSetPartition,
    responder: PlayerId,
    fixed: &BehavioralProfile,
) -> Result<BestResponse, SolverError> {
    let players = check_partition(game, partition)?;
    if !players.contains(&responder) {
        return Err(SolverError::Precondition(format!("player {responder} is not strategic")));
    }
    fixed.validate(partition, 1e-9)?;
    Ok(respond(game, partition, responder, fixed))
}

fn respond(
    game: &GameTree,
    partition: &InfoSetPartition,
    responder: PlayerId,
    fixed: &BehavioralProfile,
) -> BestResponse {
    let mut ctx = Ctx {
        game,
        partition,
        responder,
        reach: reach_of(game, partition, responder, fixed),
        value: vec![None; game.nodes.len()],
        choice: vec![None; partition.sets.len()],
    };
    let value = ctx.value(game.root);
    // Keep only infosets reachable under the chosen plan.
    let mut plan = vec![None; partition.sets.len()];
    let mut stack = vec![game.root];
    while let Some(h) = stack.pop() {
        let node = &game.nodes[h];
        if node.kind == NodeKind::Decision && node.player == responder {
            let set = partition.of_node[h] as usize;
            let a = ctx.choice[set].expect("visited infoset has a choice");
            plan[set] = Some(a);
            stack.push(node.children[a]);
        } else {
            stack.extend(node.children.iter().copied());
        }
    }
    BestResponse { plan, value }
}

/// Sum of both players' best-response values against the profile; zero
/// exactly at a Nash equilibrium of a zero-sum game.
pub fn exploitability(
    game: &GameTree,
    partition: &InfoSetPartition,
    profile: &BehavioralProfile,
) -> Result<f64, SolverError> {
    let players = check_partition(game, partition)?;
    profile.validate(partition, 1e-9)?;
    Ok(exploitability_unchecked(game, partition, players, profile))
}

pub(crate) fn exploitability_unchecked(
    game: &GameTree,
    partition: &InfoSetPartition,
    players: [PlayerId; 2],
    profile: &BehavioralProfile,
) -> f64 {
    respond(game, partition, players[0], profile).value + respond(game, partition, players[1], profile).value
}
