use std::collections::BTreeMap;

use num_traits::Zero;

use crate::game_core::{
    compute_infosets, validate_perfect_recall, CoordTag, GameTree, InfoSetPartition, NodeId, NodeKind, Obs, Rational,
    Role, TreeBuilder,
};

use super::{
    check_source, transformed_players, DummyOwner, EpisodeSize, InfosetRule, Method, ObsMapper, TransformConfig,
    TransformError, TransformReport, CHANCE, COORDINATOR, DUMMY, OPPONENT,
};

/// Assignment label marking a coordinator-owned dummy decision.
const OWNED_DUMMY: &str = "*";

/// Projected MPTA size without building it.
pub(crate) fn mpta_count(game: &GameTree) -> u128 {
    fn f(game: &GameTree, h: NodeId) -> u128 {
        let n = &game.nodes[h];
        let below = n.children.iter().fold(0u128, |acc, &c| acc.saturating_add(f(game, c)));
        if n.kind == NodeKind::Decision && game.role(n.player) == Role::Team {
            let k = n.pipb.len().max(1) as u128;
            1u128.saturating_add(k.saturating_mul(1u128.saturating_add(below)))
        } else {
            1u128.saturating_add(below)
        }
    }
    f(game, game.root)
}

struct Builder<'a> {
    src: &'a GameTree,
    part: InfoSetPartition,
    b: TreeBuilder,
    map: ObsMapper<'a>,
    config: TransformConfig,
    dummy_obs: u32,
    counts: [u64; 5],
}

const C_CHANCE: usize = 0;
const C_ADV: usize = 1;
const C_COORD: usize = 2;
const C_DUMMY: usize = 3;
const C_TERM: usize = 4;

impl<'a> Builder<'a> {
    fn copy(&mut self, h: NodeId, parent: Option<NodeId>) -> Result<NodeId, TransformError> {
        let src = self.src;
        let n = &src.nodes[h];
        match n.kind {
            NodeKind::Terminal => {
                let ut: Rational = src.team().iter().map(|&p| n.payoff[p]).sum();
                let id = self.b.open(NodeKind::Terminal, CHANCE, parent);
                let node = self.b.node_mut(id);
                node.payoff = vec![Rational::zero(), -ut, ut, Rational::zero()];
                node.origin = Some(h);
                self.counts[C_TERM] += 1;
                Ok(id)
            }
            NodeKind::Chance => {
                let id = self.b.open(NodeKind::Chance, CHANCE, parent);
                self.b.node_mut(id).origin = Some(h);
                self.b.node_mut(id).probs = n.probs.clone();
                self.counts[C_CHANCE] += 1;
                self.copy_actions(h, id)?;
                Ok(id)
            }
            NodeKind::Decision if src.role(n.player) != Role::Team => {
                let id = self.b.open(NodeKind::Decision, OPPONENT, parent);
                self.b.node_mut(id).origin = Some(h);
                self.counts[C_ADV] += 1;
                self.copy_actions(h, id)?;
                Ok(id)
            }
            NodeKind::Decision => self.team_node(h, parent),
        }
    }

    fn copy_actions(&mut self, h: NodeId, id: NodeId) -> Result<(), TransformError> {
        let src = self.src;
        for (k, &c) in src.nodes[h].children.iter().enumerate() {
            let a = src.nodes[h].actions[k];
            let child = self.copy(c, Some(id))?;
            let label = self.map.label(&mut self.b, a.label);
            let obs = self.map.obs(&mut self.b, a.obs);
            self.b.link(id, label, obs, child);
        }
        Ok(())
    }

    /// Dummy parent enumerating teammate private states, with a coordinator
    /// replica of `h` under each assignment.
    fn team_node(&mut self, h: NodeId, parent: Option<NodeId>) -> Result<NodeId, TransformError> {
        let src = self.src;
        let n = &src.nodes[h];
        if n.pipb.is_empty() {
            return Err(TransformError::UnknownPrivateState { node: h });
        }
        let source_infoset = self.part.of_node[h];
        let owned = self.config.dummy == DummyOwner::CoordinatorOwned;
        let d = if owned {
            let d = self.b.open(NodeKind::Decision, COORDINATOR, parent);
            let assignment = self.b.intern(OWNED_DUMMY);
            self.b.node_mut(d).coord = Some(CoordTag { source_infoset, member: n.player, assignment });
            d
        } else {
            self.b.open(NodeKind::Chance, DUMMY, parent)
        };
        self.b.node_mut(d).origin = Some(h);
        self.counts[C_DUMMY] += 1;
        let k = n.pipb.len() as i64;
        for &alpha in &n.pipb {
            let label = self.b.intern(src.strings.get(alpha));
            let c = self.b.open(NodeKind::Decision, COORDINATOR, Some(d));
            let node = self.b.node_mut(c);
            node.origin = Some(h);
            node.coord = Some(CoordTag { source_infoset, member: n.player, assignment: label });
            self.counts[C_COORD] += 1;
            self.copy_actions(h, c)?;
            self.b.link(d, label, self.dummy_obs, c);
            if !owned {
                self.b.node_mut(d).probs.push(Rational::new(1, k));
            }
        }
        Ok(d)
    }
}

/// MPTA: every team decision gains a dummy parent whose actions enumerate
/// the teammates' private states; the subtree is replicated under each.
pub fn mpta(game: &GameTree, config: &TransformConfig) -> Result<(GameTree, TransformReport), TransformError> {
    let opponent = check_source(game)?;
    let projected = mpta_count(game);
    if projected > config.node_budget {
        return Err(TransformError::Budget { projected, budget: config.node_budget });
    }
    let part = compute_infosets(game)?;
    let mut b = TreeBuilder::new(transformed_players(game, opponent), game.omega.clone());
    let dummy_obs = b.obs_id(vec![Obs::Hidden, Obs::Hidden, Obs::Full, Obs::Hidden]);
    let mut st =
        Builder { src: game, part, b, map: ObsMapper::new(game, opponent), config: *config, dummy_obs, counts: [0; 5] };
    st.copy(game.root, None)?;
    let counts = st.counts;
    let out = st.b.finish();
    let report = TransformReport {
        method: Method::Mpta,
        rule: Some(config.rule),
        total: out.nodes.len() as u64,
        coordinator: counts[C_COORD],
        adversary: counts[C_ADV],
        dummy: counts[C_DUMMY],
        chance: counts[C_CHANCE],
        terminal: counts[C_TERM],
        episodes: episode_sizes(&out),
        payoff_scale: 1.0,
    };
    Ok((out, report))
}

fn is_team_side(g: &GameTree, id: NodeId) -> bool {
    let p = g.nodes[id].player;
    g.nodes[id].kind != NodeKind::Terminal && (p == COORDINATOR || p == DUMMY)
}

fn is_owned_dummy(g: &GameTree, id: NodeId) -> bool {
    g.nodes[id].coord.is_some_and(|t| g.strings.get(t.assignment) == OWNED_DUMMY)
}

/// Episode sizes: for each maximal team-side region, the coordinator
/// decisions plus their children.
pub(crate) fn episode_sizes(g: &GameTree) -> Vec<EpisodeSize> {
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for id in 0..g.nodes.len() {
        let starts = is_team_side(g, id) && g.nodes[id].parent.map_or(true, |p| !is_team_side(g, p));
        if !starts {
            continue;
        }
        let mut size = 0u64;
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            let n = &g.nodes[x];
            if n.kind == NodeKind::Decision && n.player == COORDINATOR && !is_owned_dummy(g, x) {
                size += 1 + n.children.len() as u64;
            }
            stack.extend(n.children.iter().copied().filter(|&c| is_team_side(g, c)));
        }
        *hist.entry(size).or_default() += 1;
    }
    hist.into_iter().map(|(size, count)| EpisodeSize { size, count }).collect()
}

#[derive(Hash, PartialEq, Eq)]
enum Key {
    Observed(u32),
    Replica(NodeId, bool),
    Keyed(u32, u32),
}

/// Full partition of a transformed game: opponent (and TPICA coordinator)
/// infosets from observations, MPTA coordinator infosets by `rule`.
pub fn coordinator_partition(g: &GameTree, rule: InfosetRule) -> Result<InfoSetPartition, TransformError> {
    let observed = compute_infosets(g)?;
    Ok(InfoSetPartition::from_keys(g, |id| match (g.nodes[id].coord, rule) {
        (Some(tag), InfosetRule::A) => {
            Key::Replica(g.nodes[id].origin.unwrap_or(id), g.strings.get(tag.assignment) == OWNED_DUMMY)
        }
        (Some(tag), InfosetRule::B) => Key::Keyed(tag.source_infoset, tag.assignment),
        (None, _) => Key::Observed(observed.of_node[id]),
    })?)
}

/// As [`coordinator_partition`], rejecting partitions without perfect
/// recall for either player.
pub fn build_coordinator_infosets(g: &GameTree, rule: InfosetRule) -> Result<InfoSetPartition, TransformError> {
    let part = coordinator_partition(g, rule)?;
    for p in [COORDINATOR, OPPONENT] {
        let d = validate_perfect_recall(g, &part, p);
        if !d.ok {
            return Err(TransformError::PerfectRecall(d));
        }
    }
    Ok(part)
}
