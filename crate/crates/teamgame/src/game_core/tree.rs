use std::collections::HashMap;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::GameError;

pub type NodeId = usize;
pub type PlayerId = usize;
pub type Rational = Ratio<i64>;

/// Role of a seat in a game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Chance,
    Opponent,
    Team,
    Coordinator,
    Dummy,
}

impl Role {
    /// Chance and dummy seats never choose strategically.
    pub fn is_chance_like(self) -> bool {
        matches!(self, Role::Chance | Role::Dummy)
    }

    pub fn is_strategic(self) -> bool {
        !self.is_chance_like()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Player {
    pub name: String,
    pub role: Role,
}

/// What one observer learns when an action is taken.
///
/// `Full` reveals the action label, `Token` reveals only an interned
/// string (e.g. the receiver's own card out of a joint deal), `Hidden`
/// reveals nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Obs {
    Hidden,
    Full,
    Token(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Chance,
    Decision,
    Terminal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Action {
    /// Interned label.
    pub label: u32,
    /// Interned observation vector, one entry per player.
    pub obs: u32,
}

/// Bookkeeping a transform attaches to coordinator nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoordTag {
    /// Infoset index of the replicated team node in the source game.
    pub source_infoset: u32,
    /// Team member that acted at the source node.
    pub member: PlayerId,
    /// Interned label of the dummy action directly above this node.
    pub assignment: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub player: PlayerId,
    pub parent: Option<NodeId>,
    pub actions: Vec<Action>,
    pub children: Vec<NodeId>,
    pub probs: Vec<Rational>,
    pub payoff: Vec<Rational>,
    /// Team decision nodes: interned labels of the teammates' private-state
    /// assignments consistent with what the actor knows.
    pub pipb: Vec<u32>,
    /// For transformed games, the source node this node replicates.
    pub origin: Option<NodeId>,
    pub coord: Option<CoordTag>,
}

impl Node {
    pub fn new(kind: NodeKind, player: PlayerId, parent: Option<NodeId>) -> Self {
        Node {
            kind,
            player,
            parent,
            actions: Vec::new(),
            children: Vec::new(),
            probs: Vec::new(),
            payoff: Vec::new(),
            pipb: Vec::new(),
            origin: None,
            coord: None,
        }
    }
}

/// String interner shared by labels and observation tokens.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Interner {
    strings: Vec<String>,
    index: HashMap<String, u32>,
}

impl Interner {
    pub fn intern(&mut self, s: &str) -> u32 {
        if let Some(&i) = self.index.get(s) {
            return i;
        }
        let i = self.strings.len() as u32;
        self.strings.push(s.to_string());
        self.index.insert(s.to_string(), i);
        i
    }

    pub fn get(&self, i: u32) -> &str {
        &self.strings[i as usize]
    }

    pub fn lookup(&self, s: &str) -> Option<u32> {
        self.index.get(s).copied()
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }
}

/// Immutable arena game tree. Node ids are depth-first pre-order.
#[derive(Clone, Debug, PartialEq)]
pub struct GameTree {
    pub players: Vec<Player>,
    pub omega: Vec<String>,
    pub nodes: Vec<Node>,
    pub root: NodeId,
    pub strings: Interner,
    pub obs_table: Vec<Vec<Obs>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCounts {
    pub total: usize,
    pub chance: usize,
    pub dummy: usize,
    pub decision: usize,
    pub terminal: usize,
    /// Decision nodes per player name.
    pub by_player: Vec<(String, usize)>,
}

impl GameTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn role(&self, p: PlayerId) -> Role {
        self.players[p].role
    }

    pub fn label(&self, a: &Action) -> &str {
        self.strings.get(a.label)
    }

    pub fn obs(&self, a: &Action) -> &[Obs] {
        &self.obs_table[a.obs as usize]
    }

    pub fn players_with(&self, role: Role) -> Vec<PlayerId> {
        (0..self.players.len()).filter(|&p| self.players[p].role == role).collect()
    }

    pub fn team(&self) -> Vec<PlayerId> {
        self.players_with(Role::Team)
    }

    pub fn strategic_players(&self) -> Vec<PlayerId> {
        (0..self.players.len()).filter(|&p| self.players[p].role.is_strategic()).collect()
    }

    pub fn player_by_name(&self, name: &str) -> Option<PlayerId> {
        self.players.iter().position(|p| p.name == name)
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(p) = n.parent {
                d[i] = d[p] + 1;
            }
        }
        d
    }

    pub fn is_chance_node(&self, id: NodeId) -> bool {
        self.nodes[id].kind == NodeKind::Chance
    }

    pub fn counts(&self) -> NodeCounts {
        let mut c = NodeCounts { total: self.nodes.len(), ..Default::default() };
        let mut per = vec![0usize; self.players.len()];
        for n in &self.nodes {
            match n.kind {
                NodeKind::Terminal => c.terminal += 1,
                NodeKind::Chance => {
                    if self.players[n.player].role == Role::Dummy {
                        c.dummy += 1
                    } else {
                        c.chance += 1
                    }
                }
                NodeKind::Decision => {
                    c.decision += 1;
                    per[n.player] += 1;
                }
            }
        }
        c.by_player = self
            .players
            .iter()
            .zip(per)
            .filter(|(p, _)| p.role.is_strategic())
            .map(|(p, k)| (p.name.clone(), k))
            .collect();
        c
    }

    /// Structural checks: tree shape, pre-order ids, action/child alignment,
    /// probabilities, payoff and visibility widths.
    pub fn check(&self) -> Result<(), GameError> {
        let np = self.players.len();
        if self.nodes.is_empty() {
            return Err(GameError::Invalid("empty tree".into()));
        }
        if self.root != 0 || self.nodes[0].parent.is_some() {
            return Err(GameError::Invalid("root must be node 0 without parent".into()));
        }
        let mut seen_parent = vec![false; self.nodes.len()];
        let mut stack = vec![0usize];
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(id) = stack.pop() {
            order.push(id);
            let n = &self.nodes[id];
            for &c in n.children.iter().rev() {
                if c >= self.nodes.len() {
                    return Err(GameError::Invalid(format!("node {id}: child {c} out of range")));
                }
                if seen_parent[c] {
                    return Err(GameError::Invalid(format!("node {c} has several parents")));
                }
                seen_parent[c] = true;
                if self.nodes[c].parent != Some(id) {
                    return Err(GameError::Invalid(format!("node {c}: parent link mismatch")));
                }
                stack.push(c);
            }
        }
        if order.len() != self.nodes.len() {
            return Err(GameError::Invalid("unreachable nodes in arena".into()));
        }
        for (i, &id) in order.iter().enumerate() {
            if i != id {
                return Err(GameError::Invalid(format!("node {id} is not in pre-order position")));
            }
        }
        for (id, n) in self.nodes.iter().enumerate() {
            if n.player >= np {
                return Err(GameError::Invalid(format!("node {id}: unknown player")));
            }
            if n.actions.len() != n.children.len() {
                return Err(GameError::Invalid(format!("node {id}: action/child count mismatch")));
            }
            for (k, a) in n.actions.iter().enumerate() {
                let ok = (a.obs as usize) < self.obs_table.len() && self.obs_table[a.obs as usize].len() == np;
                if !ok {
                    return Err(GameError::Visibility { node: id, action: k });
                }
            }
            match n.kind {
                NodeKind::Terminal => {
                    if !n.actions.is_empty() {
                        return Err(GameError::Invalid(format!("terminal {id} has actions")));
                    }
                    if n.payoff.len() != np {
                        return Err(GameError::Invalid(format!("terminal {id}: payoff width")));
                    }
                }
                NodeKind::Chance => {
                    if n.actions.is_empty() || n.probs.len() != n.actions.len() {
                        return Err(GameError::Invalid(format!("chance {id}: probabilities")));
                    }
                    let s: Rational = n.probs.iter().sum();
                    if s != Rational::one() || n.probs.iter().any(|p| *p < Rational::zero()) {
                        return Err(GameError::Invalid(format!("chance {id}: probabilities do not sum to 1")));
                    }
                    if !self.players[n.player].role.is_chance_like() {
                        return Err(GameError::Invalid(format!("chance {id}: strategic owner")));
                    }
                }
                NodeKind::Decision => {
                    if n.actions.is_empty() {
                        return Err(GameError::Invalid(format!("decision {id} has no actions")));
                    }
                    if !self.players[n.player].role.is_strategic() {
                        return Err(GameError::Invalid(format!("decision {id}: non-strategic owner")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Incremental pre-order construction.
#[derive(Clone, Debug)]
pub struct TreeBuilder {
    pub players: Vec<Player>,
    pub omega: Vec<String>,
    pub nodes: Vec<Node>,
    pub strings: Interner,
    obs_table: Vec<Vec<Obs>>,
    obs_index: HashMap<Vec<Obs>, u32>,
}

impl TreeBuilder {
    pub fn new(players: Vec<Player>, omega: Vec<String>) -> Self {
        TreeBuilder {
            players,
            omega,
            nodes: Vec::new(),
            strings: Interner::default(),
            obs_table: Vec::new(),
            obs_index: HashMap::new(),
        }
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    /// Allocates the next pre-order id. Children must be created after
    /// their parent and before any later sibling subtree.
    pub fn open(&mut self, kind: NodeKind, player: PlayerId, parent: Option<NodeId>) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node::new(kind, player, parent));
        id
    }

    pub fn intern(&mut self, s: &str) -> u32 {
        self.strings.intern(s)
    }

    pub fn obs_id(&mut self, obs: Vec<Obs>) -> u32 {
        if let Some(&i) = self.obs_index.get(&obs) {
            return i;
        }
        let i = self.obs_table.len() as u32;
        self.obs_table.push(obs.clone());
        self.obs_index.insert(obs, i);
        i
    }

    pub fn obs_vec(&self, id: u32) -> &[Obs] {
        &self.obs_table[id as usize]
    }

    /// Registers an action of `parent` leading to `child`.
    pub fn link(&mut self, parent: NodeId, label: u32, obs: u32, child: NodeId) {
        let n = &mut self.nodes[parent];
        n.actions.push(Action { label, obs });
        n.children.push(child);
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut Node {
        &mut self.nodes[id]
    }

    pub fn finish(self) -> GameTree {
        GameTree {
            players: self.players,
            omega: self.omega,
            nodes: self.nodes,
            root: 0,
            strings: self.strings,
            obs_table: self.obs_table,
        }
    }
}
