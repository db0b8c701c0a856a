use serde::{Deserialize, Serialize};

use crate::game_core::{rational_to_f64, BehavioralProfile, GameTree, InfoSetPartition, NodeKind, PlayerId};

use super::br::exploitability_unchecked;
use super::{check_partition, ConvergenceLog, SolverError};

/// Cumulative regret-plus and linearly weighted strategy sums per infoset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegretState {
    pub regrets: Vec<Vec<f64>>,
    pub strategy_sum: Vec<Vec<f64>>,
    pub iteration: u64,
}

impl RegretState {
    fn new(partition: &InfoSetPartition) -> Self {
        let zeros: Vec<Vec<f64>> = partition.sets.iter().map(|s| vec![0.0; s.actions.len()]).collect();
        RegretState { regrets: zeros.clone(), strategy_sum: zeros, iteration: 0 }
    }

    /// Regret-plus vector normalized, or uniform when it is all zero.
    pub fn current(&self, set: usize) -> Vec<f64> {
        let r = &self.regrets[set];
        let sum: f64 = r.iter().sum();
        if sum > 0.0 {
            r.iter().map(|x| x / sum).collect()
        } else {
            vec![1.0 / r.len() as f64; r.len()]
        }
    }

    pub fn current_profile(&self) -> BehavioralProfile {
        BehavioralProfile { probs: (0..self.regrets.len()).map(|i| self.current(i)).collect() }
    }

    pub fn average_profile(&self) -> BehavioralProfile {
        let probs = self
            .strategy_sum
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let sum: f64 = s.iter().sum();
                if sum > 0.0 {
                    s.iter().map(|x| x / sum).collect()
                } else {
                    self.current(i)
                }
            })
            .collect();
        BehavioralProfile { probs }
    }
}

/// Flattened node data for fast traversal.
struct Flat {
    kind: Vec<NodeKind>,
    /// Index into the solver's two players, or usize::MAX.
    actor: Vec<usize>,
    set: Vec<usize>,
    children: Vec<Vec<usize>>,
    probs: Vec<Vec<f64>>,
    /// Payoff of each of the two players at terminals.
    payoff: Vec<[f64; 2]>,
}

impl Flat {
    fn new(game: &GameTree, partition: &InfoSetPartition, players: [PlayerId; 2]) -> Self {
        let n = game.nodes.len();
        let mut f = Flat {
            kind: Vec::with_capacity(n),
            actor: Vec::with_capacity(n),
            set: Vec::with_capacity(n),
            children: Vec::with_capacity(n),
            probs: Vec::with_capacity(n),
            payoff: Vec::with_capacity(n),
        };
        for (id, node) in game.nodes.iter().enumerate() {
            f.kind.push(node.kind);
            f.actor.push(
                players.iter().position(|&p| p == node.player && node.kind == NodeKind::Decision).unwrap_or(usize::MAX),
            );
            f.set.push(partition.of_node[id] as usize);
            f.children.push(node.children.clone());
            f.probs.push(node.probs.iter().map(rational_to_f64).collect());
            f.payoff.push(if node.kind == NodeKind::Terminal {
                [rational_to_f64(&node.payoff[players[0]]), rational_to_f64(&node.payoff[players[1]])]
            } else {
                [0.0; 2]
            });
        }
        f
    }
}

/// Vanilla CFR+ with alternating updates and linear averaging.
pub struct CfrPlus<'a> {
    game: &'a GameTree,
    partition: &'a InfoSetPartition,
    players: [PlayerId; 2],
    flat: Flat,
    state: RegretState,
    strat: Vec<Vec<f64>>,
    delta: Vec<Vec<f64>>,
}

impl<'a> CfrPlus<'a> {
    pub fn new(game: &'a GameTree, partition: &'a InfoSetPartition) -> Result<Self, SolverError> {
        let players = check_partition(game, partition)?;
        let state = RegretState::new(partition);
        let strat = (0..partition.sets.len()).map(|i| state.current(i)).collect();
        let delta = state.regrets.clone();
        Ok(CfrPlus { game, partition, players, flat: Flat::new(game, partition, players), state, strat, delta })
    }

    pub fn players(&self) -> [PlayerId; 2] {
        self.players
    }

    pub fn state(&self) -> &RegretState {
        &self.state
    }

    pub fn iteration(&self) -> u64 {
        self.state.iteration
    }

    pub fn average(&self) -> BehavioralProfile {
        self.state.average_profile()
    }

    /// Exploitability of the current average profile.
    pub fn exploitability(&self) -> f64 {
        exploitability_unchecked(self.game, self.partition, self.players, &self.average())
    }

    /// One iteration: the first player updates on odd iterations, the
    /// second on even ones.
    pub fn step(&mut self) {
        self.state.iteration += 1;
        let t = self.state.iteration;
        let who = if t % 2 == 1 { 0 } else { 1 };
        for i in 0..self.partition.sets.len() {
            self.strat[i] = self.state.current(i);
            self.delta[i].iter_mut().for_each(|x| *x = 0.0);
        }
        self.traverse(self.game.root, who, 1.0, 1.0, t as f64);
        for (i, s) in self.partition.sets.iter().enumerate() {
            if s.player == self.players[who] {
                for (r, d) in self.state.regrets[i].iter_mut().zip(&self.delta[i]) {
                    *r = (*r + d).max(0.0);
                }
            }
        }
    }

    /// Returns the updating player's expected value below `h`, weighted by
    /// the other player's and chance's reach `other`.
    fn traverse(&mut self, h: usize, who: usize, own: f64, other: f64, weight: f64) -> f64 {
        match self.flat.kind[h] {
            NodeKind::Terminal => self.flat.payoff[h][who],
            NodeKind::Chance => {
                let mut v = 0.0;
                for k in 0..self.flat.children[h].len() {
                    let p = self.flat.probs[h][k];
                    if p > 0.0 {
                        let c = self.flat.children[h][k];
                        v += p * self.traverse(c, who, own, other * p, weight);
                    }
                }
                v
            }
            NodeKind::Decision => {
                let set = self.flat.set[h];
                let n = self.flat.children[h].len();
                if self.flat.actor[h] == who {
                    let mut vals = vec![0.0; n];
                    let mut v = 0.0;
                    for k in 0..n {
                        let p = self.strat[set][k];
                        let c = self.flat.children[h][k];
                        vals[k] = self.traverse(c, who, own * p, other, weight);
                        v += p * vals[k];
                    }
                    for k in 0..n {
                        self.delta[set][k] += other * (vals[k] - v);
                        self.state.strategy_sum[set][k] += weight * own * self.strat[set][k];
                    }
                    v
                } else {
                    let mut v = 0.0;
                    for k in 0..n {
                        // Zero-probability branches still feed the average strategy.
                        let p = self.strat[set][k];
                        let c = self.flat.children[h][k];
                        v += p * self.traverse(c, who, own, other * p, weight);
                    }
                    v
                }
            }
        }
    }
}

/// Runs `iterations` CFR+ iterations, logging exploitability of the
/// average profile at the log's cadence and once at the end.
pub fn cfr_plus(
    game: &GameTree,
    partition: &InfoSetPartition,
    iterations: u64,
    log: &mut ConvergenceLog,
) -> Result<BehavioralProfile, SolverError> {
    let mut cfr = CfrPlus::new(game, partition)?;
    log.restart_clock();
    for _ in 0..iterations {
        cfr.step();
        if log.due(cfr.iteration()) {
            let e = cfr.exploitability();
            log.record(cfr.iteration(), e);
        }
    }
    let e = cfr.exploitability();
    log.record(cfr.iteration(), e);
    Ok(cfr.average())
}
