use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::game_core::{compute_infosets, GameTree, InfoSetPartition, NodeId, NodeKind, PlayerId, Role};
use crate::oracle::Plan;
use crate::transform::{coordinator_partition, InfosetRule, COORDINATOR, OPPONENT};

use super::MetricsError;

/// One coordinator infoset of the transformed game and the original team
/// infoset it plays for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingEntry {
    pub coordinator_infoset: usize,
    pub member: PlayerId,
    pub source_infoset: usize,
    /// Dummy assignment above the infoset (rule-B), or the original node
    /// replicated into it (rule-A).
    pub assignment: Option<String>,
    pub origin: Option<NodeId>,
}

/// Correspondence between coordinator infosets of G' and team infosets of
/// G, plus the opponent infoset correspondence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanMapping {
    pub rule: InfosetRule,
    pub entries: Vec<MappingEntry>,
    /// (infoset in G', infoset in G) for the opponent.
    pub opponent: Vec<(usize, usize)>,
}

impl PlanMapping {
    fn by_assignment(&self) -> HashMap<(usize, &str), usize> {
        self.entries
            .iter()
            .filter_map(|e| e.assignment.as_deref().map(|a| ((e.source_infoset, a), e.coordinator_infoset)))
            .collect()
    }

    fn by_origin(&self) -> HashMap<NodeId, usize> {
        self.entries.iter().filter_map(|e| e.origin.map(|o| (o, e.coordinator_infoset))).collect()
    }
}

/// Builds the mapping for `g2 = mpta(g)` under `rule`, with `part2` the
/// coordinator partition of `g2` for that rule.
pub fn build_mapping(
    g: &GameTree,
    g2: &GameTree,
    rule: InfosetRule,
) -> Result<(PlanMapping, InfoSetPartition), MetricsError> {
    let part = compute_infosets(g)?;
    let part2 = coordinator_partition(g2, rule)?;
    let mut entries: BTreeMap<usize, MappingEntry> = BTreeMap::new();
    let mut opponent: BTreeMap<usize, usize> = BTreeMap::new();
    for (id, n) in g2.nodes.iter().enumerate() {
        if n.kind != NodeKind::Decision {
            continue;
        }
        let s2 = part2.of_node[id] as usize;
        let origin = n.origin.ok_or_else(|| MetricsError::Mapping(format!("node {id} has no origin")))?;
        if n.player == OPPONENT {
            let s = part.of_node[origin] as usize;
            if *opponent.entry(s2).or_insert(s) != s {
                return Err(MetricsError::Mapping(format!("opponent infoset {s2} spans several original infosets")));
            }
            continue;
        }
        let tag = n.coord.ok_or_else(|| MetricsError::Mapping(format!("coordinator node {id} lacks its tag")))?;
        let assignment = g2.strings.get(tag.assignment);
        if assignment == "*" {
            return Err(MetricsError::Mapping("coordinator-owned dummies are not mappable".into()));
        }
        let entry = MappingEntry {
            coordinator_infoset: s2,
            member: tag.member,
            source_infoset: tag.source_infoset as usize,
            assignment: (rule == InfosetRule::B).then(|| assignment.to_string()),
            origin: (rule == InfosetRule::A).then_some(origin),
        };
        let old = entries.entry(s2).or_insert_with(|| entry.clone());
        if *old != entry {
            return Err(MetricsError::Mapping(format!("coordinator infoset {s2} maps to several team infosets")));
        }
    }
    let mut images: Vec<usize> = opponent.values().copied().collect();
    images.sort_unstable();
    if images.windows(2).any(|w| w[0] == w[1]) {
        return Err(MetricsError::Mapping("opponent infosets are not preserved one-to-one".into()));
    }
    let mapping =
        PlanMapping { rule, entries: entries.into_values().collect(), opponent: opponent.into_iter().collect() };
    Ok((mapping, part2))
}

/// Team behavior in G induced by a coordinator plan: for every team node,
/// a distribution over its actions.
#[derive(Clone, Debug, PartialEq)]
pub struct MappedTeamStrategy {
    pub rule: InfosetRule,
    /// Indexed by node of G; `None` for non-team or unreached nodes.
    pub node_probs: Vec<Option<Vec<BigRational>>>,
}

impl MappedTeamStrategy {
    /// Deterministic joint plan over original infosets, if the strategy is
    /// pure and agrees across the nodes of every infoset.
    pub fn as_joint_plan(&self, part: &InfoSetPartition) -> Result<Option<Plan>, MetricsError> {
        let mut plan: Plan = vec![None; part.sets.len()];
        let mut witness: Vec<Option<NodeId>> = vec![None; part.sets.len()];
        for (h, p) in self.node_probs.iter().enumerate() {
            let Some(p) = p else { continue };
            let Some(a) = p.iter().position(|x| x.is_one()) else { return Ok(None) };
            let s = part.of_node[h] as usize;
            match plan[s] {
                Some(b) if b != a => return Err(MetricsError::Inconsistent(witness[s].unwrap(), h)),
                _ => {
                    plan[s] = Some(a);
                    witness[s] = Some(h);
                }
            }
        }
        Ok(Some(plan))
    }

    /// Rule-B components: for every team infoset, its (assignment, action)
    /// pairs; each assignment carries the same weight.
    pub fn assignment_table(
        &self,
        g: &GameTree,
        part: &InfoSetPartition,
    ) -> BTreeMap<usize, Vec<(String, BigRational)>> {
        let mut out = BTreeMap::new();
        for (h, p) in self.node_probs.iter().enumerate() {
            if let Some(p) = p {
                let s = part.of_node[h] as usize;
                out.entry(s).or_insert_with(|| {
                    g.nodes[h].actions.iter().zip(p).map(|(a, w)| (g.label(a).to_string(), w.clone())).collect()
                });
            }
        }
        out
    }
}

/// Coordinator plan to team behavior: rule-A plays each replica's action at its
/// original node; rule-B draws a dummy assignment uniformly at every team
/// node and plays the action of the matching coordinator infoset.
pub fn map_coordinator_plan(
    g: &GameTree,
    mapping: &PlanMapping,
    plan_t: &Plan,
) -> Result<MappedTeamStrategy, MetricsError> {
    let part = compute_infosets(g)?;
    let by_assignment = mapping.by_assignment();
    let by_origin = mapping.by_origin();
    let mut node_probs = vec![None; g.nodes.len()];
    // Only team nodes reachable under the team's own choices matter.
    let mut stack = vec![(g.root, true)];
    while let Some((h, live)) = stack.pop() {
        let n = &g.nodes[h];
        if n.kind != NodeKind::Decision || g.role(n.player) != Role::Team {
            stack.extend(n.children.iter().map(|&c| (c, live)));
            continue;
        }
        let s = part.of_node[h] as usize;
        let mut probs = vec![BigRational::zero(); n.children.len()];
        let lookup = |c: Option<&usize>| -> Result<Option<usize>, MetricsError> {
            let c = *c.ok_or_else(|| MetricsError::Mapping(format!("team node {h} has no coordinator infoset")))?;
            Ok(plan_t.get(c).copied().flatten())
        };
        match mapping.rule {
            InfosetRule::A => {
                if let Some(a) = lookup(by_origin.get(&h))? {
                    probs[a] = BigRational::one();
                }
            }
            InfosetRule::B => {
                let w = BigRational::new(1.into(), (n.pipb.len() as i64).into());
                for &d in &n.pipb {
                    if let Some(a) = lookup(by_assignment.get(&(s, g.strings.get(d))))? {
                        probs[a] += &w;
                    }
                }
            }
        }
        let covered = probs.iter().fold(BigRational::zero(), |acc, x| acc + x);
        if covered.is_zero() {
            if live {
                return Err(MetricsError::Oracle(crate::oracle::OracleError::IncompletePlan { node: h }));
            }
        } else if !covered.is_one() {
            return Err(MetricsError::Mapping(format!(
                "team node {h}: coordinator plan covers only part of the alphabet"
            )));
        }
        for (k, &c) in n.children.iter().enumerate() {
            stack.push((c, live && !probs[k].is_zero()));
        }
        if live {
            node_probs[h] = Some(probs);
        }
    }
    Ok(MappedTeamStrategy { rule: mapping.rule, node_probs })
}

/// Image of a joint team plan: every coordinator infoset copies the action
/// of its original infoset. Unreachable coordinator infosets are dropped.
pub fn map_team_plan(
    g2: &GameTree,
    part2: &InfoSetPartition,
    mapping: &PlanMapping,
    plan_team: &Plan,
) -> Result<Plan, MetricsError> {
    let mut full: Plan = vec![None; part2.sets.len()];
    for e in &mapping.entries {
        full[e.coordinator_infoset] = plan_team.get(e.source_infoset).copied().flatten();
    }
    Ok(reduce(g2, part2, &full, COORDINATOR))
}

/// Restricts `plan` to the player's infosets reachable under it.
fn reduce(g: &GameTree, part: &InfoSetPartition, plan: &Plan, player: PlayerId) -> Plan {
    let mut out: Plan = vec![None; plan.len()];
    let mut stack = vec![g.root];
    while let Some(h) = stack.pop() {
        let n = &g.nodes[h];
        if n.kind == NodeKind::Decision && n.player == player {
            let s = part.of_node[h] as usize;
            if let Some(a) = plan[s] {
                out[s] = Some(a);
                stack.push(n.children[a]);
            }
        } else {
            stack.extend(n.children.iter().copied());
        }
    }
    out
}

/// Pushes a finite mixture of joint team plans through [`map_team_plan`],
/// summing the masses of plans with equal images.
pub fn map_team_mixture(
    g2: &GameTree,
    part2: &InfoSetPartition,
    mapping: &PlanMapping,
    mixture: &[(Plan, BigRational)],
) -> Result<Vec<(Plan, BigRational)>, MetricsError> {
    let total = mixture.iter().fold(BigRational::zero(), |acc, (_, w)| acc + w);
    if !total.is_one() || mixture.iter().any(|(_, w)| *w < BigRational::zero()) {
        return Err(MetricsError::Weights(total.to_string()));
    }
    let mut out: Vec<(Plan, BigRational)> = Vec::new();
    for (p, w) in mixture {
        let image = map_team_plan(g2, part2, mapping, p)?;
        match out.iter_mut().find(|(q, _)| *q == image) {
            Some((_, acc)) => *acc += w,
            None => out.push((image, w.clone())),
        }
    }
    Ok(out)
}

/// Opponent plan of G' carried to G.
pub(crate) fn map_opponent_plan(mapping: &PlanMapping, part: &InfoSetPartition, plan2: &Plan) -> Plan {
    let mut out: Plan = vec![None; part.sets.len()];
    for &(s2, s) in &mapping.opponent {
        if let Some(a) = plan2[s2] {
            out[s] = Some(a);
        }
    }
    out
}
