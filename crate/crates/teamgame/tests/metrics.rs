mod common;

use common::{build, dec, leaf, players, Vis};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teamgame::game_core::{compute_infosets, GameTree, InfoSetPartition, NodeId, NodeKind, Rational, Role};
use teamgame::games::{generate, micro, GameSpec};
use teamgame::metrics::*;
use teamgame::oracle::{merge_plans, pure_value, sample_reduced_plan, Plan};
use teamgame::transform::{mpta, DummyOwner, InfosetRule, TransformConfig, COORDINATOR, OPPONENT};

fn kuhn() -> GameTree {
    generate(&GameSpec::parse("12K3").unwrap()).unwrap()
}

struct Setup {
    g: GameTree,
    part: InfoSetPartition,
    g2: GameTree,
    part2: InfoSetPartition,
    mapping: PlanMapping,
}

fn setup(g: GameTree, rule: InfosetRule) -> Setup {
    let part = compute_infosets(&g).unwrap();
    let (g2, _) = mpta(&g, &TransformConfig::with_rule(rule)).unwrap();
    let (mapping, part2) = build_mapping(&g, &g2, rule).unwrap();
    Setup { g, part, g2, part2, mapping }
}

fn big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl Setup {
    fn opponent_plan(&self, rng: &mut ChaCha8Rng) -> Plan {
        sample_reduced_plan(&self.g, &self.part, &[1], rng)
    }

    /// The same opponent plan on the transformed game's infosets.
    fn lift_opponent(&self, plan: &Plan) -> Plan {
        let mut out = vec![None; self.part2.sets.len()];
        for &(s2, s) in &self.mapping.opponent {
            out[s2] = plan[s];
        }
        out
    }

    /// Coordinator payoff in G'; dummies are chance nodes.
    fn transformed(&self, coord: &Plan, opp: &Plan) -> BigRational {
        pure_value(&self.g2, &self.part2, &merge_plans(&[coord, &self.lift_opponent(opp)]), &[COORDINATOR]).unwrap()
    }

    /// Team payoff in G with node-level team behavior.
    fn original(&self, team: &MappedTeamStrategy, opp: &Plan) -> BigRational {
        fn go(s: &Setup, team: &MappedTeamStrategy, opp: &Plan, h: NodeId) -> BigRational {
            let n = &s.g.nodes[h];
            match n.kind {
                NodeKind::Terminal => s.g.team().iter().map(|&p| big(&n.payoff[p])).sum(),
                NodeKind::Chance => n.children.iter().zip(&n.probs).map(|(&c, p)| big(p) * go(s, team, opp, c)).sum(),
                NodeKind::Decision if s.g.role(n.player) == Role::Team => {
                    let probs = team.node_probs[h].as_ref().expect("reached team node has a distribution");
                    n.children
                        .iter()
                        .zip(probs)
                        .filter(|(_, p)| !p.is_zero())
                        .map(|(&c, p)| p * go(s, team, opp, c))
                        .sum()
                }
                NodeKind::Decision => go(s, team, opp, n.children[opp[s.part.of_node[h] as usize].unwrap()]),
            }
        }
        go(self, team, opp, self.g.root)
    }
}

#[test]
fn rule_a_round_trip_preserves_payoffs() {
    let s = setup(kuhn(), InfosetRule::A);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let team = sample_reduced_plan(&s.g, &s.part, &[2, 3], &mut rng);
        let coord = map_team_plan(&s.g2, &s.part2, &s.mapping, &team).unwrap();
        let back = map_coordinator_plan(&s.g, &s.mapping, &coord).unwrap();
        assert_eq!(back.as_joint_plan(&s.part).unwrap(), Some(team.clone()));
        for _ in 0..20 {
            let opp = s.opponent_plan(&mut rng);
            let v = pure_value(&s.g, &s.part, &merge_plans(&[&team, &opp]), &[2, 3]).unwrap();
            assert_eq!(s.transformed(&coord, &opp), v);
            assert_eq!(s.original(&back, &opp), v);
        }
    }
}

#[test]
fn assignment_independent_plan_collapses_to_one_joint_plan() {
    let s = setup(kuhn(), InfosetRule::B);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..20 {
        let team = sample_reduced_plan(&s.g, &s.part, &[2, 3], &mut rng);
        let coord = map_team_plan(&s.g2, &s.part2, &s.mapping, &team).unwrap();
        let back = map_coordinator_plan(&s.g, &s.mapping, &coord).unwrap();
        assert!(back.node_probs.iter().flatten().all(|p| p.iter().all(|x| x.is_zero() || x.is_one())));
        assert_eq!(back.as_joint_plan(&s.part).unwrap(), Some(team));
    }
}

#[test]
fn random_coordinator_plans_keep_their_value() {
    for rule in [InfosetRule::A, InfosetRule::B] {
        let s = setup(kuhn(), rule);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let coord = sample_reduced_plan(&s.g2, &s.part2, &[COORDINATOR], &mut rng);
            let team = map_coordinator_plan(&s.g, &s.mapping, &coord).unwrap();
            let opp = s.opponent_plan(&mut rng);
            // Scale factor 1: exact equality.
            assert_eq!(s.original(&team, &opp), s.transformed(&coord, &opp), "{rule:?}");
        }
    }
}

fn weights(n: usize, rng: &mut ChaCha8Rng) -> Vec<BigRational> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..10)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| BigRational::new(w.into(), total.into())).collect()
}

#[test]
fn mixture_images() {
    let s = setup(kuhn(), InfosetRule::B);
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let a = sample_reduced_plan(&s.g, &s.part, &[2, 3], &mut rng);
    let mut b = sample_reduced_plan(&s.g, &s.part, &[2, 3], &mut rng);
    while b == a {
        b = sample_reduced_plan(&s.g, &s.part, &[2, 3], &mut rng);
    }
    let one = BigRational::one();
    let point = map_team_mixture(&s.g2, &s.part2, &s.mapping, &[(a.clone(), one.clone())]).unwrap();
    assert_eq!(point, vec![(map_team_plan(&s.g2, &s.part2, &s.mapping, &a).unwrap(), one.clone())]);
    let half = BigRational::new(1.into(), 2.into());
    let two =
        map_team_mixture(&s.g2, &s.part2, &s.mapping, &[(a.clone(), half.clone()), (b.clone(), half.clone())]).unwrap();
    assert_eq!(two.len(), 2);
    assert!(two.iter().all(|(_, w)| *w == half));
    assert!(map_team_mixture(&s.g2, &s.part2, &s.mapping, &[(a.clone(), half.clone())]).is_err());
    // Equal plans merge their mass.
    let merged = map_team_mixture(&s.g2, &s.part2, &s.mapping, &[(a.clone(), half.clone()), (a, half)]).unwrap();
    assert_eq!(merged.len(), 1);
    assert_eq!(merged[0].1, one);
}

#[test]
fn mixture_payoffs_are_preserved() {
    let s = setup(kuhn(), InfosetRule::B);
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let mix: Vec<(Plan, BigRational)> =
        weights(5, &mut rng).into_iter().map(|w| (sample_reduced_plan(&s.g, &s.part, &[2, 3], &mut rng), w)).collect();
    let image = map_team_mixture(&s.g2, &s.part2, &s.mapping, &mix).unwrap();
    for _ in 0..50 {
        let opp = s.opponent_plan(&mut rng);
        let before: BigRational =
            mix.iter().map(|(p, w)| w * pure_value(&s.g, &s.part, &merge_plans(&[p, &opp]), &[2, 3]).unwrap()).sum();
        let after: BigRational = image.iter().map(|(p, w)| w * s.transformed(p, &opp)).sum();
        assert_eq!(before, after);
    }
}

#[test]
fn equivalence_holds_on_kuhn_and_micro_games() {
    let mut games = vec![kuhn()];
    games.extend(micro::corpus().into_iter().map(|m| m.game));
    for g in games {
        for rule in [InfosetRule::A, InfosetRule::B] {
            let s = setup(g.clone(), rule);
            let r = check_payoff_equivalence(&s.g, &s.g2, &s.mapping, 1000, 7).unwrap();
            assert!(r.ok(), "{:?}", r.violations.first());
            assert_eq!(r.checked, 2000);
            assert_eq!(r.payoff_scale, "1");
        }
    }
}

#[test]
fn equivalence_report_is_reproducible() {
    let s = setup(kuhn(), InfosetRule::B);
    let a = check_payoff_equivalence(&s.g, &s.g2, &s.mapping, 50, 3).unwrap();
    let b = check_payoff_equivalence(&s.g, &s.g2, &s.mapping, 50, 3).unwrap();
    assert_eq!(a, b);
    let json = serde_json::to_string(&s.mapping).unwrap();
    assert_eq!(serde_json::from_str::<PlanMapping>(&json).unwrap(), s.mapping);
}

#[test]
fn corrupted_mapping_is_caught() {
    for rule in [InfosetRule::A, InfosetRule::B] {
        let s = setup(kuhn(), rule);
        let mut bad = s.mapping.clone();
        // Point one coordinator infoset at a different team infoset of the same member.
        let i = 0;
        let j = bad
            .entries
            .iter()
            .position(|e| e.member == bad.entries[i].member && e.source_infoset != bad.entries[i].source_infoset)
            .unwrap();
        let (x, y) = (bad.entries[i].coordinator_infoset, bad.entries[j].coordinator_infoset);
        bad.entries[i].coordinator_infoset = y;
        bad.entries[j].coordinator_infoset = x;
        let r = check_payoff_equivalence(&s.g, &s.g2, &bad, 1000, 7).unwrap();
        assert!(!r.violations.is_empty(), "{rule:?}");
    }
}

#[test]
fn no_team_moves_means_no_violations() {
    let p = players(&[Role::Chance, Role::Opponent, Role::Team, Role::Team]);
    let g = build(p, dec(1, vec![("l", Vis::All, leaf(&[2, -1, -1])), ("r", Vis::All, leaf(&[-2, 1, 1]))]));
    let s = setup(g, InfosetRule::B);
    assert!(s.mapping.entries.is_empty());
    let r = check_payoff_equivalence(&s.g, &s.g2, &s.mapping, 100, 1).unwrap();
    assert!(r.ok());
}

#[test]
fn owned_dummies_are_not_mappable() {
    let g = kuhn();
    let cfg = TransformConfig { dummy: DummyOwner::CoordinatorOwned, ..Default::default() };
    let (g2, _) = mpta(&g, &cfg).unwrap();
    assert!(matches!(build_mapping(&g, &g2, InfosetRule::B), Err(MetricsError::Mapping(_))));
}

#[test]
fn opponent_correspondence_is_complete() {
    let s = setup(kuhn(), InfosetRule::B);
    assert_eq!(s.mapping.opponent.len(), s.part2.of_player(OPPONENT).len());
    assert_eq!(s.mapping.opponent.len(), s.part.of_player(1).len());
    assert_eq!(s.mapping.entries.len(), s.part2.of_player(COORDINATOR).len());
}
