use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::game_core::{compute_infosets, GameTree, InfoSetPartition, NodeKind, Rational, Scalar};
use crate::oracle::{merge_plans, pure_value, sample_reduced_plan, Plan};
use crate::transform::{coordinator_partition, InfosetRule, COORDINATOR, OPPONENT};

use super::mapping::{map_coordinator_plan, map_opponent_plan, map_team_plan, MappedTeamStrategy};
use super::{MetricsError, PlanMapping};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    /// "coordinator-plan" or "team-plan", the side that was sampled.
    pub direction: String,
    /// (infoset, action) pairs of the sampled plans.
    pub team_side: Vec<(usize, usize)>,
    pub opponent: Vec<(usize, usize)>,
    pub original: String,
    pub transformed: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub trials: usize,
    pub seed: u64,
    pub rule: InfosetRule,
    pub semantics: String,
    pub payoff_scale: String,
    /// Pairs checked (two per trial: one sampled on each side).
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl EquivalenceReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn pairs(plan: &Plan) -> Vec<(usize, usize)> {
    plan.iter().enumerate().filter_map(|(s, a)| a.map(|a| (s, a))).collect()
}

/// Summed team payoff in G with node-level team distributions and a pure
/// opponent plan.
fn original_value(
    g: &GameTree,
    part: &InfoSetPartition,
    team: &MappedTeamStrategy,
    opp: &Plan,
) -> Result<BigRational, MetricsError> {
    let members = g.team();
    let mut total = BigRational::zero();
    let mut stack = vec![(g.root, BigRational::one())];
    while let Some((h, w)) = stack.pop() {
        if w.is_zero() {
            continue;
        }
        let n = &g.nodes[h];
        match n.kind {
            NodeKind::Terminal => {
                for &p in &members {
                    total += &w * BigRational::from_rational(&n.payoff[p]);
                }
            }
            NodeKind::Chance => {
                for (k, &c) in n.children.iter().enumerate() {
                    stack.push((c, &w * BigRational::from_rational(&n.probs[k])));
                }
            }
            NodeKind::Decision => {
                if let Some(p) = &team.node_probs[h] {
                    for (k, &c) in n.children.iter().enumerate() {
                        stack.push((c, &w * &p[k]));
                    }
                } else {
                    let s = part.of_node[h] as usize;
                    let a = opp[s].ok_or(crate::oracle::OracleError::IncompletePlan { node: h })?;
                    stack.push((n.children[a], w));
                }
            }
        }
    }
    Ok(total)
}

/// A violation skeleton when the values differ or the plans could not be
/// mapped and evaluated (e.g. a corrupted mapping leaves a reached node
/// without an action).
fn compare(side: Result<(BigRational, BigRational), MetricsError>, scale: &BigRational) -> Option<Violation> {
    let (original, transformed) = match side {
        Ok((o, t)) if t == &o * scale => return None,
        Ok((o, t)) => (o.to_string(), t.to_string()),
        Err(e) => ("unmappable".to_string(), e.to_string()),
    };
    Some(Violation {
        trial: 0,
        direction: String::new(),
        team_side: Vec::new(),
        opponent: Vec::new(),
        original,
        transformed,
    })
}

/// Samples `trials` coordinator plans and `trials` joint team plans, each
/// against a random opponent plan, and compares the team's value in G
/// with the coordinator's value in G' exactly.
pub fn check_payoff_equivalence(
    g: &GameTree,
    g2: &GameTree,
    mapping: &PlanMapping,
    trials: usize,
    seed: u64,
) -> Result<EquivalenceReport, MetricsError> {
    let part = compute_infosets(g)?;
    let part2 = coordinator_partition(g2, mapping.rule)?;
    let scale = BigRational::from_rational(&Rational::one());
    let team = g.team();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut checked = 0;
    for trial in 0..trials {
        let opp2 = sample_reduced_plan(g2, &part2, &[OPPONENT], &mut rng);
        let opp = map_opponent_plan(mapping, &part, &opp2);

        let coord = sample_reduced_plan(g2, &part2, &[COORDINATOR], &mut rng);
        let side = (|| -> Result<_, MetricsError> {
            let mapped = map_coordinator_plan(g, mapping, &coord)?;
            let original = original_value(g, &part, &mapped, &opp)?;
            let transformed = pure_value(g2, &part2, &merge_plans(&[&coord, &opp2]), &[COORDINATOR])?;
            Ok((original, transformed))
        })();
        checked += 1;
        if let Some(v) = compare(side, &scale) {
            violations.push(Violation {
                trial,
                direction: "coordinator-plan".into(),
                team_side: pairs(&coord),
                opponent: pairs(&opp2),
                ..v
            });
        }

        let joint = sample_reduced_plan(g, &part, &team, &mut rng);
        let side = (|| -> Result<_, MetricsError> {
            let original = pure_value(g, &part, &merge_plans(&[&joint, &opp]), &team)?;
            let image = map_team_plan(g2, &part2, mapping, &joint)?;
            let transformed = pure_value(g2, &part2, &merge_plans(&[&image, &opp2]), &[COORDINATOR])?;
            Ok((original, transformed))
        })();
        checked += 1;
        if let Some(v) = compare(side, &scale) {
            violations.push(Violation {
                trial,
                direction: "team-plan".into(),
                team_side: pairs(&joint),
                opponent: pairs(&opp2),
                ..v
            });
        }
    }
    let semantics = match mapping.rule {
        InfosetRule::A => "rule-A: each coordinator infoset fixes the action of one original team node",
        InfosetRule::B => {
            "rule-B: at every team node the member draws a dummy assignment uniformly and plays the \
             matching coordinator action; compared with the dummy-averaged transformed value"
        }
    };
    Ok(EquivalenceReport {
        trials,
        seed,
        rule: mapping.rule,
        semantics: semantics.into(),
        payoff_scale: scale.to_string(),
        checked,
        violations,
    })
}
