use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::tree::{GameTree, NodeId, NodeKind, Obs, PlayerId};
use super::GameError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfoSet {
    pub player: PlayerId,
    pub nodes: Vec<NodeId>,
    /// Interned action labels shared by every member node.
    pub actions: Vec<u32>,
}

/// Grouping of decision nodes into information sets. Ids follow the
/// pre-order position of each set's first node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfoSetPartition {
    pub sets: Vec<InfoSet>,
    /// Infoset of every node; `u32::MAX` for chance and terminal nodes.
    pub of_node: Vec<u32>,
}

pub const NO_SET: u32 = u32::MAX;

impl InfoSetPartition {
    pub fn infoset(&self, node: NodeId) -> Option<usize> {
        let i = self.of_node[node];
        (i != NO_SET).then_some(i as usize)
    }

    pub fn of_player(&self, p: PlayerId) -> Vec<usize> {
        (0..self.sets.len()).filter(|&i| self.sets[i].player == p).collect()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Builds a partition from one key per decision node; nodes with equal
    /// `(player, key)` share a set. Action lists must agree.
    pub fn from_keys<K: std::hash::Hash + Eq>(
        game: &GameTree,
        mut key: impl FnMut(NodeId) -> K,
    ) -> Result<Self, GameError> {
        let mut index: HashMap<(PlayerId, K), u32> = HashMap::new();
        let mut sets: Vec<InfoSet> = Vec::new();
        let mut of_node = vec![NO_SET; game.nodes.len()];
        for (id, n) in game.nodes.iter().enumerate() {
            if n.kind != NodeKind::Decision {
                continue;
            }
            let labels: Vec<u32> = n.actions.iter().map(|a| a.label).collect();
            let next = sets.len() as u32;
            let s = *index.entry((n.player, key(id))).or_insert(next);
            if s == next {
                sets.push(InfoSet { player: n.player, nodes: Vec::new(), actions: labels });
            } else if sets[s as usize].actions != labels {
                return Err(GameError::Invalid(format!("node {id}: action list differs from the rest of its infoset")));
            }
            sets[s as usize].nodes.push(id);
            of_node[id] = s;
        }
        Ok(InfoSetPartition { sets, of_node })
    }
}

/// Interns sequences as trie paths.
#[derive(Default)]
struct SeqTrie {
    map: HashMap<(u32, u64), u32>,
}

impl SeqTrie {
    const EMPTY: u32 = 0;

    fn push(&mut self, parent: u32, item: u64) -> u32 {
        let next = self.map.len() as u32 + 1;
        *self.map.entry((parent, item)).or_insert(next)
    }
}

fn item(actor: PlayerId, tag: u64, value: u32) -> u64 {
    ((actor as u64) << 40) | (tag << 32) | value as u64
}

fn obs_item(actor: PlayerId, label: u32, o: Obs) -> Option<u64> {
    match o {
        Obs::Hidden => None,
        Obs::Full => Some(item(actor, 1, label)),
        Obs::Token(t) => Some(item(actor, 2, t)),
    }
}

/// Interned observation sequence of every (node, player), row-major.
fn observation_sequences(game: &GameTree) -> Vec<u32> {
    let np = game.players.len();
    let n = game.nodes.len();
    let mut trie = SeqTrie::default();
    let mut seq = vec![SeqTrie::EMPTY; n * np];
    for id in 0..n {
        let node = &game.nodes[id];
        for (k, &c) in node.children.iter().enumerate() {
            let a = node.actions[k];
            let obs = game.obs(&a);
            for p in 0..np {
                let cur = seq[id * np + p];
                seq[c * np + p] = match obs_item(node.player, a.label, obs[p]) {
                    Some(it) => trie.push(cur, it),
                    None => cur,
                };
            }
        }
    }
    seq
}

/// Infosets from observation sequences: two decision nodes of one player
/// share a set iff the player observed the same sequence on both root
/// paths and both expose the same action list.
pub fn compute_infosets(game: &GameTree) -> Result<InfoSetPartition, GameError> {
    compute_pooled_infosets(game, &[])
}

/// As [`compute_infosets`], except that nodes of players in `pool` are
/// keyed by the observation sequences of every pool member, as if the
/// pool shared all information.
pub fn compute_pooled_infosets(game: &GameTree, pool: &[PlayerId]) -> Result<InfoSetPartition, GameError> {
    game.check()?;
    let np = game.players.len();
    let seq = observation_sequences(game);
    let mut sig_index: HashMap<Vec<u32>, u32> = HashMap::new();
    InfoSetPartition::from_keys(game, |id| {
        let node = &game.nodes[id];
        let mut sig: Vec<u32> = node.actions.iter().map(|a| a.label).collect();
        sig.push(u32::MAX);
        if pool.contains(&node.player) {
            sig.extend(pool.iter().map(|&p| seq[id * np + p]));
        } else {
            sig.push(seq[id * np + node.player]);
        }
        let next = sig_index.len() as u32;
        *sig_index.entry(sig).or_insert(next)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicStatePartition {
    pub playerset: Vec<PlayerId>,
    pub states: Vec<Vec<NodeId>>,
    pub of_node: Vec<u32>,
}

impl PublicStatePartition {
    pub fn state(&self, node: NodeId) -> usize {
        self.of_node[node] as usize
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// Public states for `playerset`. An action is public when every member of
/// the set receives the same non-hidden observation; every other action
/// still reveals publicly that its actor moved. Classes are then merged so
/// that each infoset of a member lies in a single state.
pub fn compute_public_states(
    game: &GameTree,
    partition: &InfoSetPartition,
    playerset: &[PlayerId],
) -> Result<PublicStatePartition, GameError> {
    if playerset.is_empty() {
        return Err(GameError::Argument("playerset is empty".into()));
    }
    if playerset.iter().any(|&p| p >= game.players.len()) {
        return Err(GameError::Argument("playerset names an unknown player".into()));
    }
    let n = game.nodes.len();
    let mut trie = SeqTrie::default();
    let mut seq = vec![SeqTrie::EMPTY; n];
    for id in 0..n {
        let node = &game.nodes[id];
        for (k, &c) in node.children.iter().enumerate() {
            let a = node.actions[k];
            let obs = game.obs(&a);
            let first = obs[playerset[0]];
            let public = first != Obs::Hidden && playerset.iter().all(|&p| obs[p] == first);
            let it = if public { obs_item(node.player, a.label, first).unwrap() } else { item(node.player, 0, 0) };
            seq[c] = trie.push(seq[id], it);
        }
    }
    // Dense class ids in order of first appearance.
    let mut class_of_seq: HashMap<u32, u32> = HashMap::new();
    let mut class = vec![0u32; n];
    for id in 0..n {
        let next = class_of_seq.len() as u32;
        class[id] = *class_of_seq.entry(seq[id]).or_insert(next);
    }
    let k = class_of_seq.len();
    let mut uf: Vec<u32> = (0..k as u32).collect();
    for set in &partition.sets {
        if !playerset.contains(&set.player) {
            continue;
        }
        let a = find(&mut uf, class[set.nodes[0]]);
        for &h in &set.nodes[1..] {
            let b = find(&mut uf, class[h]);
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                uf[hi as usize] = lo;
            }
        }
    }
    let mut dense: HashMap<u32, u32> = HashMap::new();
    let mut states: Vec<Vec<NodeId>> = Vec::new();
    let mut of_node = vec![0u32; n];
    for id in 0..n {
        let r = find(&mut uf, class[id]);
        let next = dense.len() as u32;
        let s = *dense.entry(r).or_insert(next);
        if s as usize == states.len() {
            states.push(Vec::new());
        }
        states[s as usize].push(id);
        of_node[id] = s;
    }
    Ok(PublicStatePartition { playerset: playerset.to_vec(), states, of_node })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub ok: bool,
    pub messages: Vec<String>,
    /// Offending node pairs (reference node, violating node).
    pub pairs: Vec<(NodeId, NodeId)>,
}

impl Diagnostics {
    pub fn from_pairs(pairs: Vec<(NodeId, NodeId)>, messages: Vec<String>) -> Self {
        Diagnostics { ok: pairs.is_empty() && messages.is_empty(), messages, pairs }
    }
}

/// Within every public state over all strategic players, all nodes must
/// share the acting player and the root-path length.
pub fn validate_public_turn_taking(game: &GameTree) -> Diagnostics {
    let partition = match compute_infosets(game) {
        Ok(p) => p,
        Err(e) => return Diagnostics::from_pairs(Vec::new(), vec![e.to_string()]),
    };
    validate_public_turn_taking_with(game, &partition)
}

/// As [`validate_public_turn_taking`] with an explicit infoset partition.
pub fn validate_public_turn_taking_with(game: &GameTree, partition: &InfoSetPartition) -> Diagnostics {
    let players = game.strategic_players();
    if players.is_empty() {
        return Diagnostics::from_pairs(Vec::new(), Vec::new());
    }
    let ps = match compute_public_states(game, partition, &players) {
        Ok(p) => p,
        Err(e) => return Diagnostics::from_pairs(Vec::new(), vec![e.to_string()]),
    };
    let depth = game.depths();
    let actor = |id: NodeId| {
        let n = &game.nodes[id];
        if n.kind == NodeKind::Terminal {
            usize::MAX
        } else {
            n.player
        }
    };
    let mut pairs = Vec::new();
    let mut messages = Vec::new();
    for s in &ps.states {
        let r = s[0];
        for &h in &s[1..] {
            if actor(h) != actor(r) || depth[h] != depth[r] {
                pairs.push((r, h));
                if messages.len() < 20 {
                    messages.push(format!("nodes {r} and {h} share a public state but differ in actor or depth"));
                }
            }
        }
    }
    Diagnostics::from_pairs(pairs, messages)
}

/// Every node of an infoset of `player` must share the sequence of the
/// player's earlier (infoset, action) pairs.
pub fn validate_perfect_recall(game: &GameTree, partition: &InfoSetPartition, player: PlayerId) -> Diagnostics {
    let n = game.nodes.len();
    let mut trie = SeqTrie::default();
    let mut hist = vec![SeqTrie::EMPTY; n];
    for id in 0..n {
        let node = &game.nodes[id];
        let own = node.kind == NodeKind::Decision && node.player == player;
        for (k, &c) in node.children.iter().enumerate() {
            hist[c] = if own {
                let set = partition.of_node[id];
                trie.push(hist[id], ((set as u64) << 24) | k as u64)
            } else {
                hist[id]
            };
        }
    }
    let mut pairs = Vec::new();
    let mut messages = Vec::new();
    for (i, set) in partition.sets.iter().enumerate() {
        if set.player != player {
            continue;
        }
        let r = set.nodes[0];
        for &h in &set.nodes[1..] {
            if hist[h] != hist[r] {
                pairs.push((r, h));
                if messages.len() < 20 {
                    messages.push(format!("infoset {i}: nodes {r} and {h} have different own histories"));
                }
            }
        }
    }
    Diagnostics::from_pairs(pairs, messages)
}
