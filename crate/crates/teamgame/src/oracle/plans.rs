use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::game_core::{validate_perfect_recall, GameTree, InfoSetPartition, NodeKind, PlayerId, Scalar};

use super::OracleError;

/// A pure reduced plan: `plan[infoset]` holds the action index for every
/// infoset of the playerset reachable under the plan's own choices, and
/// `None` elsewhere.
pub type Plan = Vec<Option<usize>>;

/// Reduced-plan count per player with perfect recall, by recursion over
/// the player's infoset tree. `None` if some player lacks perfect recall.
pub fn projected_plan_count(game: &GameTree, partition: &InfoSetPartition, playerset: &[PlayerId]) -> Option<u128> {
    let mut total: u128 = 1;
    for &p in playerset {
        if !validate_perfect_recall(game, partition, p).ok {
            return None;
        }
        // Last own (infoset, action) above each infoset.
        let mut parent: HashMap<usize, Option<(usize, usize)>> = HashMap::new();
        let mut last: Vec<Option<(usize, usize)>> = vec![None; game.nodes.len()];
        for (id, node) in game.nodes.iter().enumerate() {
            let own = node.kind == NodeKind::Decision && node.player == p;
            if own {
                parent.entry(partition.of_node[id] as usize).or_insert(last[id]);
            }
            for (k, &c) in node.children.iter().enumerate() {
                last[c] = if own { Some((partition.of_node[id] as usize, k)) } else { last[id] };
            }
        }
        let mut below: HashMap<Option<(usize, usize)>, Vec<usize>> = HashMap::new();
        let mut sets: Vec<usize> = parent.keys().copied().collect();
        sets.sort_unstable();
        for s in sets {
            below.entry(parent[&s]).or_default().push(s);
        }
        fn count(
            partition: &InfoSetPartition,
            below: &HashMap<Option<(usize, usize)>, Vec<usize>>,
            at: Option<(usize, usize)>,
        ) -> u128 {
            below.get(&at).map_or(1, |children| {
                children.iter().fold(1u128, |acc, &s| {
                    let n = partition.sets[s].actions.len();
                    let options = (0..n).fold(0u128, |a, k| a.saturating_add(count(partition, below, Some((s, k)))));
                    acc.saturating_mul(options)
                })
            })
        }
        total = total.saturating_mul(count(partition, &below, None));
    }
    Some(total)
}

/// All reduced plans of `playerset`, in lexicographic order of (lowest
/// open infoset, action index). Joint plans of several players are
/// enumerated directly, so members' infosets may interleave freely.
pub fn enumerate_reduced_plans(
    game: &GameTree,
    partition: &InfoSetPartition,
    playerset: &[PlayerId],
    budget: u128,
) -> Result<Vec<Plan>, OracleError> {
    if let Some(projected) = projected_plan_count(game, partition, playerset) {
        if projected > budget {
            return Err(OracleError::Budget { projected, budget });
        }
    }
    let mut out = Vec::new();
    let mut plan: Plan = vec![None; partition.sets.len()];
    extend(game, partition, playerset, &mut plan, &mut out, budget)?;
    Ok(out)
}

/// Lowest-id infoset of the playerset reachable under `plan` but not yet
/// assigned.
fn open_infoset(game: &GameTree, partition: &InfoSetPartition, playerset: &[PlayerId], plan: &Plan) -> Option<usize> {
    let mut best: Option<usize> = None;
    let mut stack = vec![game.root];
    while let Some(h) = stack.pop() {
        let node = &game.nodes[h];
        if node.kind == NodeKind::Decision && playerset.contains(&node.player) {
            let s = partition.of_node[h] as usize;
            match plan[s] {
                Some(a) => stack.push(node.children[a]),
                None => best = Some(best.map_or(s, |b| b.min(s))),
            }
        } else {
            stack.extend(node.children.iter().copied());
        }
    }
    best
}

fn extend(
    game: &GameTree,
    partition: &InfoSetPartition,
    playerset: &[PlayerId],
    plan: &mut Plan,
    out: &mut Vec<Plan>,
    budget: u128,
) -> Result<(), OracleError> {
    match open_infoset(game, partition, playerset, plan) {
        None => {
            if out.len() as u128 >= budget {
                return Err(OracleError::Budget { projected: budget + 1, budget });
            }
            out.push(plan.clone());
        }
        Some(s) => {
            for a in 0..partition.sets[s].actions.len() {
                plan[s] = Some(a);
                extend(game, partition, playerset, plan, out, budget)?;
            }
            plan[s] = None;
        }
    }
    Ok(())
}

/// Union of plans over disjoint infosets.
pub fn merge_plans(plans: &[&Plan]) -> Plan {
    let n = plans.first().map_or(0, |p| p.len());
    (0..n).map(|i| plans.iter().find_map(|p| p[i])).collect()
}

/// Expected payoff vector when every decision follows `plan` (which must
/// cover every reached decision node).
pub fn pure_payoff<T: Scalar>(
    game: &GameTree,
    partition: &InfoSetPartition,
    plan: &Plan,
) -> Result<Vec<T>, OracleError> {
    let np = game.players.len();
    let mut total = vec![T::zero(); np];
    let one = T::from_rational(&crate::game_core::Rational::one());
    let mut stack = vec![(game.root, one)];
    while let Some((h, w)) = stack.pop() {
        let node = &game.nodes[h];
        match node.kind {
            NodeKind::Terminal => {
                for (p, t) in total.iter_mut().enumerate() {
                    *t = t.clone() + w.clone() * &T::from_rational(&node.payoff[p]);
                }
            }
            NodeKind::Chance => {
                for (k, &c) in node.children.iter().enumerate() {
                    stack.push((c, w.clone() * &T::from_rational(&node.probs[k])));
                }
            }
            NodeKind::Decision => {
                let s = partition.of_node[h] as usize;
                let a = plan[s].ok_or(OracleError::IncompletePlan { node: h })?;
                stack.push((node.children[a], w));
            }
        }
    }
    Ok(total)
}

/// Exact payoff summed over `players`.
pub fn pure_value(
    game: &GameTree,
    partition: &InfoSetPartition,
    plan: &Plan,
    players: &[PlayerId],
) -> Result<BigRational, OracleError> {
    let v = pure_payoff::<BigRational>(game, partition, plan)?;
    Ok(players.iter().fold(BigRational::zero(), |acc, &p| acc + &v[p]))
}

pub(crate) fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A uniformly random action at each open infoset, in the same order the
/// enumeration branches.
pub fn sample_reduced_plan<R: rand::Rng>(
    game: &GameTree,
    partition: &InfoSetPartition,
    playerset: &[PlayerId],
    rng: &mut R,
) -> Plan {
    let mut plan: Plan = vec![None; partition.sets.len()];
    while let Some(s) = open_infoset(game, partition, playerset, &plan) {
        plan[s] = Some(rng.gen_range(0..partition.sets[s].actions.len()));
    }
    plan
}
