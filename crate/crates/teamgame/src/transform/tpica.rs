use std::collections::HashMap;

use crate::game_core::{
    compute_infosets, compute_public_states, GameTree, InfoSetPartition, NodeId, NodeKind, Obs, PublicStatePartition,
    Rational, Role, TreeBuilder,
};
use num_traits::{One, Zero};

use super::mpta::episode_sizes;
use super::{
    check_source, transformed_players, Method, ObsMapper, TransformConfig, TransformError, TransformReport, CHANCE,
    COORDINATOR, DUMMY, OPPONENT,
};

/// For each team node: the acting member's infosets in its public state
/// and the position of the node's own infoset among them.
struct Prescriptions {
    part: InfoSetPartition,
    groups: HashMap<(usize, usize), Vec<usize>>,
    ps: PublicStatePartition,
}

impl Prescriptions {
    fn new(game: &GameTree) -> Result<Self, TransformError> {
        let part = compute_infosets(game)?;
        let team = game.team();
        let ps = compute_public_states(game, &part, &team)?;
        let mut groups: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, set) in part.sets.iter().enumerate() {
            if game.role(set.player) == Role::Team {
                groups.entry((ps.state(set.nodes[0]), set.player)).or_default().push(i);
            }
        }
        Ok(Prescriptions { part, groups, ps })
    }

    /// (infosets in the group, own position).
    fn group(&self, game: &GameTree, h: NodeId) -> (&[usize], usize) {
        let own = self.part.of_node[h] as usize;
        let g = &self.groups[&(self.ps.state(h), game.nodes[h].player)];
        let pos = g.iter().position(|&i| i == own).expect("infoset in its group");
        (g, pos)
    }
}

const T_TOTAL: usize = 0;
const T_COORD: usize = 1;
const T_ADV: usize = 2;
const T_DUMMY: usize = 3;
const T_CHANCE: usize = 4;
const T_TERM: usize = 5;

type Counts = [u128; 6];

fn add(a: &mut Counts, b: &Counts, mult: u128) {
    for i in 0..6 {
        a[i] = a[i].saturating_add(b[i].saturating_mul(mult));
    }
}

/// Projected TPICA node counts (total, coordinator, adversary, dummy,
/// chance, terminal) without building the tree.
pub fn tpica_count(game: &GameTree) -> Result<TransformReport, TransformError> {
    check_source(game)?;
    let pr = Prescriptions::new(game)?;
    fn f(game: &GameTree, pr: &Prescriptions, h: NodeId) -> Counts {
        let n = &game.nodes[h];
        let mut c = [0u128; 6];
        c[T_TOTAL] = 1;
        match n.kind {
            NodeKind::Terminal => c[T_TERM] = 1,
            NodeKind::Chance => {
                c[T_CHANCE] = 1;
                for &ch in &n.children {
                    let sub = f(game, pr, ch);
                    add(&mut c, &sub, 1);
                }
            }
            NodeKind::Decision if game.role(n.player) != Role::Team => {
                c[T_ADV] = 1;
                for &ch in &n.children {
                    let sub = f(game, pr, ch);
                    add(&mut c, &sub, 1);
                }
            }
            NodeKind::Decision => {
                c[T_COORD] = 1;
                let (group, _) = pr.group(game, h);
                let total: u128 =
                    group.iter().fold(1u128, |acc, &i| acc.saturating_mul(pr.part.sets[i].actions.len() as u128));
                let per_action = total / n.actions.len() as u128;
                c[T_TOTAL] = c[T_TOTAL].saturating_add(total);
                c[T_DUMMY] = total;
                for &ch in &n.children {
                    let sub = f(game, pr, ch);
                    add(&mut c, &sub, per_action);
                }
            }
        }
        c
    }
    let c = f(game, &pr, game.root);
    let clamp = |x: u128| u64::try_from(x).unwrap_or(u64::MAX);
    Ok(TransformReport {
        method: Method::Tpica,
        rule: None,
        total: clamp(c[T_TOTAL]),
        coordinator: clamp(c[T_COORD]),
        adversary: clamp(c[T_ADV]),
        dummy: clamp(c[T_DUMMY]),
        chance: clamp(c[T_CHANCE]),
        terminal: clamp(c[T_TERM]),
        episodes: Vec::new(),
        payoff_scale: 1.0,
    })
}

struct Builder<'a> {
    src: &'a GameTree,
    pr: Prescriptions,
    b: TreeBuilder,
    map: ObsMapper<'a>,
    presc_obs: u32,
}

impl<'a> Builder<'a> {
    fn copy(&mut self, h: NodeId, parent: Option<NodeId>) -> NodeId {
        let src = self.src;
        let n = &src.nodes[h];
        match n.kind {
            NodeKind::Terminal => {
                let ut: Rational = src.team().iter().map(|&p| n.payoff[p]).sum();
                let id = self.b.open(NodeKind::Terminal, CHANCE, parent);
                let node = self.b.node_mut(id);
                node.payoff = vec![Rational::zero(), -ut, ut, Rational::zero()];
                node.origin = Some(h);
                id
            }
            NodeKind::Decision if src.role(n.player) == Role::Team => self.team_node(h, parent),
            _ => {
                let player = if n.kind == NodeKind::Chance { CHANCE } else { OPPONENT };
                let id = self.b.open(n.kind, player, parent);
                self.b.node_mut(id).origin = Some(h);
                self.b.node_mut(id).probs = n.probs.clone();
                for (k, &c) in n.children.iter().enumerate() {
                    let a = n.actions[k];
                    let child = self.copy(c, Some(id));
                    let label = self.map.label(&mut self.b, a.label);
                    let obs = self.map.obs(&mut self.b, a.obs);
                    self.b.link(id, label, obs, child);
                }
                id
            }
        }
    }

    /// Coordinator picks one action per infoset of the public state; a
    /// dummy forwards the component of the node's own infoset.
    fn team_node(&mut self, h: NodeId, parent: Option<NodeId>) -> NodeId {
        let src = self.src;
        let n = &src.nodes[h];
        let (group, pos) = self.pr.group(src, h);
        let sizes: Vec<usize> = group.iter().map(|&i| self.pr.part.sets[i].actions.len()).collect();
        let labels: Vec<Vec<u32>> = group.iter().map(|&i| self.pr.part.sets[i].actions.clone()).collect();
        let id = self.b.open(NodeKind::Decision, COORDINATOR, parent);
        self.b.node_mut(id).origin = Some(h);
        let mut digits = vec![0usize; sizes.len()];
        loop {
            let name = digits
                .iter()
                .enumerate()
                .map(|(j, &d)| src.strings.get(labels[j][d]).to_string())
                .collect::<Vec<_>>()
                .join("|");
            let chosen = digits[pos];
            let d = self.b.open(NodeKind::Chance, DUMMY, Some(id));
            self.b.node_mut(d).origin = Some(h);
            self.b.node_mut(d).probs = vec![Rational::one()];
            let a = n.actions[chosen];
            let child = self.copy(n.children[chosen], Some(d));
            let label = self.map.label(&mut self.b, a.label);
            let obs = self.map.obs(&mut self.b, a.obs);
            self.b.link(d, label, obs, child);
            let pl = self.b.intern(&name);
            self.b.link(id, pl, self.presc_obs, d);
            // Next prescription in lexicographic order.
            let mut j = sizes.len();
            loop {
                if j == 0 {
                    return id;
                }
                j -= 1;
                digits[j] += 1;
                if digits[j] < sizes[j] {
                    break;
                }
                digits[j] = 0;
            }
        }
    }
}

/// TPICA: the coordinator plays prescriptions over the acting member's
/// infosets in the current public state.
pub fn tpica(game: &GameTree, config: &TransformConfig) -> Result<(GameTree, TransformReport), TransformError> {
    let projected = tpica_count(game)?;
    if projected.total as u128 > config.node_budget {
        return Err(TransformError::Budget { projected: projected.total as u128, budget: config.node_budget });
    }
    let opponent = check_source(game)?;
    let pr = Prescriptions::new(game)?;
    let mut b = TreeBuilder::new(transformed_players(game, opponent), game.omega.clone());
    let presc_obs = b.obs_id(vec![Obs::Hidden, Obs::Hidden, Obs::Full, Obs::Hidden]);
    let mut st = Builder { src: game, pr, b, map: ObsMapper::new(game, opponent), presc_obs };
    st.copy(game.root, None);
    let out = st.b.finish();
    let c = out.counts();
    let per = |name: &str| c.by_player.iter().find(|(n, _)| n == name).map_or(0, |x| x.1) as u64;
    let report = TransformReport {
        method: Method::Tpica,
        rule: None,
        total: c.total as u64,
        coordinator: per("coordinator"),
        adversary: per(&out.players[OPPONENT].name),
        dummy: c.dummy as u64,
        chance: c.chance as u64,
        terminal: c.terminal as u64,
        episodes: episode_sizes(&out),
        payoff_scale: 1.0,
    };
    Ok((out, report))
}
