//! Two-player zero-sum transforms of team games: MPTA (private-information
//! pre-branches) and the TPICA prescription baseline.

mod formulas;
mod mpta;
mod tpica;

pub use formulas::{mpta_episode_size, mpta_episode_size_closed, tpica_episode_size, tpica_episode_size_closed};
pub use mpta::{build_coordinator_infosets, coordinator_partition, mpta};
pub use tpica::{tpica, tpica_count};

use crate::game_core::NodeKind;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game_core::{
    compute_infosets, validate_perfect_recall, validate_public_turn_taking, Diagnostics, GameError, GameTree, NodeId,
    Obs, Player, PlayerId, Role, TreeBuilder,
};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("node {node}: cannot identify the teammates' private states")]
    UnknownPrivateState { node: NodeId },
    #[error("coordinator infosets violate perfect recall: {0:?}")]
    PerfectRecall(Diagnostics),
    #[error("projected {projected} nodes exceeds the budget of {budget}")]
    Budget { projected: u128, budget: u128 },
    #[error("argument error: {0}")]
    Argument(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mpta,
    Tpica,
}

/// How coordinator nodes are grouped into information sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InfosetRule {
    /// All replicas of one source node form one infoset.
    #[serde(rename = "rule-a")]
    A,
    /// Key by the acting member's source infoset (public actions plus own
    /// private state) and the dummy assignment directly above.
    #[serde(rename = "rule-b")]
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DummyOwner {
    ChanceUniform,
    CoordinatorOwned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformConfig {
    pub method: Method,
    pub rule: InfosetRule,
    pub dummy: DummyOwner,
    /// Refuse to build outputs projected above this many nodes.
    pub node_budget: u128,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig {
            method: Method::Mpta,
            rule: InfosetRule::B,
            dummy: DummyOwner::ChanceUniform,
            node_budget: 50_000_000,
        }
    }
}

impl TransformConfig {
    pub fn tpica() -> Self {
        TransformConfig { method: Method::Tpica, ..Default::default() }
    }

    pub fn with_rule(rule: InfosetRule) -> Self {
        TransformConfig { rule, ..Default::default() }
    }
}

/// Episode size together with how many episodes have it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeSize {
    pub size: u64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub method: Method,
    pub rule: Option<InfosetRule>,
    pub total: u64,
    pub coordinator: u64,
    pub adversary: u64,
    pub dummy: u64,
    pub chance: u64,
    pub terminal: u64,
    pub episodes: Vec<EpisodeSize>,
    /// Transformed payoff = scale * original team payoff.
    pub payoff_scale: f64,
}

impl TransformReport {
    pub fn accounting_ok(&self) -> bool {
        self.chance + self.adversary + self.coordinator + self.dummy + self.terminal == self.total
    }
}

/// Player ids in every transformed game.
pub const CHANCE: PlayerId = 0;
pub const OPPONENT: PlayerId = 1;
pub const COORDINATOR: PlayerId = 2;
pub const DUMMY: PlayerId = 3;

pub(crate) fn transformed_players(source: &GameTree, opponent: PlayerId) -> Vec<Player> {
    vec![
        Player { name: "chance".into(), role: Role::Chance },
        Player { name: source.players[opponent].name.clone(), role: Role::Opponent },
        Player { name: "coordinator".into(), role: Role::Coordinator },
        Player { name: "dummy".into(), role: Role::Dummy },
    ]
}

/// Checks the shared preconditions and returns the single opponent.
pub(crate) fn check_source(game: &GameTree) -> Result<PlayerId, TransformError> {
    let team = game.team();
    if team.len() < 2 {
        return Err(TransformError::Precondition("the team needs at least two members".into()));
    }
    let opp = game.players_with(Role::Opponent);
    if opp.len() != 1 {
        return Err(TransformError::Precondition("exactly one opponent is supported".into()));
    }
    let tt = validate_public_turn_taking(game);
    if !tt.ok {
        return Err(TransformError::Precondition(format!(
            "input is not public-turn-taking: {:?}",
            tt.messages.first()
        )));
    }
    let part = compute_infosets(game)?;
    for p in game.strategic_players() {
        let d = validate_perfect_recall(game, &part, p);
        if !d.ok {
            return Err(TransformError::Precondition(format!(
                "player {} lacks perfect recall: {:?}",
                game.players[p].name,
                d.messages.first()
            )));
        }
    }
    Ok(opp[0])
}

/// Re-interns source labels and observation vectors into a transformed
/// game. The opponent keeps its own view; the coordinator sees what is
/// common to all team members.
pub(crate) struct ObsMapper<'a> {
    source: &'a GameTree,
    opponent: PlayerId,
    team: Vec<PlayerId>,
    obs_cache: HashMap<u32, u32>,
    label_cache: HashMap<u32, u32>,
}

impl<'a> ObsMapper<'a> {
    pub(crate) fn new(source: &'a GameTree, opponent: PlayerId) -> Self {
        ObsMapper { source, opponent, team: source.team(), obs_cache: HashMap::new(), label_cache: HashMap::new() }
    }

    pub(crate) fn label(&mut self, b: &mut TreeBuilder, label: u32) -> u32 {
        let source = self.source;
        *self.label_cache.entry(label).or_insert_with(|| b.intern(source.strings.get(label)))
    }

    pub(crate) fn obs(&mut self, b: &mut TreeBuilder, obs: u32) -> u32 {
        if let Some(&o) = self.obs_cache.get(&obs) {
            return o;
        }
        let v = &self.source.obs_table[obs as usize];
        let mut tr = |o: Obs| match o {
            Obs::Token(t) => Obs::Token(b.intern(self.source.strings.get(t))),
            x => x,
        };
        let first = v[self.team[0]];
        let coord =
            if first != Obs::Hidden && self.team.iter().all(|&p| v[p] == first) { tr(first) } else { Obs::Hidden };
        let opp = tr(v[self.opponent]);
        let id = b.obs_id(vec![Obs::Hidden, opp, coord, Obs::Hidden]);
        self.obs_cache.insert(obs, id);
        id
    }
}

/// Every root-to-terminal path must cross as many dummy nodes as every
/// other path with the same public action sequence.
pub fn check_uniform_replication(g: &GameTree) -> Diagnostics {
    let strategic = g.strategic_players();
    let n = g.nodes.len();
    // Public sequences interned as trie paths; 0 is the empty sequence.
    let mut trie: HashMap<(u32, PlayerId, Obs), u32> = HashMap::new();
    let mut public = vec![0u32; n];
    let mut dummies = vec![0u32; n];
    let mut seen: HashMap<u32, (u32, NodeId)> = HashMap::new();
    let mut pairs = Vec::new();
    let mut messages = Vec::new();
    for id in 0..n {
        let node = &g.nodes[id];
        let is_dummy = node.player == DUMMY || node.coord.is_some_and(|t| g.strings.get(t.assignment) == "*");
        for (k, &c) in node.children.iter().enumerate() {
            let obs = g.obs(&node.actions[k]);
            let first = obs[strategic[0]];
            public[c] = if first != Obs::Hidden && strategic.iter().all(|&p| obs[p] == first) {
                let item = if first == Obs::Full { Obs::Token(node.actions[k].label) } else { first };
                let next = trie.len() as u32 + 1;
                *trie.entry((public[id], node.player, item)).or_insert(next)
            } else {
                public[id]
            };
            dummies[c] = dummies[id] + is_dummy as u32;
        }
        if node.kind == NodeKind::Terminal {
            match seen.get(&public[id]) {
                Some(&(d, other)) if d != dummies[id] => {
                    pairs.push((other, id));
                    if messages.len() < 20 {
                        messages.push(format!("terminals {other} and {id} cross {d} and {} dummies", dummies[id]));
                    }
                }
                Some(_) => {}
                None => {
                    seen.insert(public[id], (dummies[id], id));
                }
            }
        }
    }
    Diagnostics::from_pairs(pairs, messages)
}
