use num_traits::{One, Zero};
use proptest::prelude::*;
use teamgame::game_core::{
    compute_infosets, validate_perfect_recall, validate_public_turn_taking, GameTree, NodeKind, Rational, Role,
};
use teamgame::games::{generate, micro, Family, GameSpec};

fn gen(name: &str) -> GameTree {
    generate(&GameSpec::parse(name).unwrap()).unwrap()
}

fn assert_total(name: &str, want: usize) {
    let g = gen(name);
    assert_eq!(g.nodes.len(), want, "{name}");
}

#[test]
fn kuhn_node_counts() {
    for (name, want) in
        [("12K3", 151), ("12K4", 601), ("12K6", 3_001), ("13K6", 23_401), ("13K8", 109_201), ("14K6", 115_921)]
    {
        assert_total(name, want);
    }
}

#[test]
fn leduc_node_counts() {
    for (name, want) in [("12L33", 13_183), ("12L43", 42_589), ("12L63", 218_011), ("13L33", 161_491)] {
        assert_total(name, want);
    }
}

#[test]
fn large_leduc_node_counts() {
    for (name, want) in [("13L43", 738_241), ("14L33", 1_673_311)] {
        assert_total(name, want);
    }
}

#[test]
fn goofspiel_node_counts() {
    assert_total("12G", 2_509);
    assert_total("13G", 15_307);
}

#[test]
fn kuhn_deal_is_uniform_over_ordered_deals() {
    let g = gen("12K3");
    let root = &g.nodes[g.root];
    assert_eq!(root.kind, NodeKind::Chance);
    assert_eq!(root.children.len(), 6);
    assert!(root.probs.iter().all(|p| *p == Rational::new(1, 6)));
}

#[test]
fn goofspiel_first_prize_is_uniform() {
    let g = gen("12G");
    let root = &g.nodes[g.root];
    assert_eq!(root.kind, NodeKind::Chance);
    let mut first = [Rational::zero(); 3];
    for (k, a) in root.actions.iter().enumerate() {
        let prize: usize = g.label(a).split(',').next().unwrap().parse().unwrap();
        first[prize - 1] += root.probs[k];
    }
    assert!(first.iter().all(|p| *p == Rational::new(1, 3)));
    assert_eq!(root.probs.iter().copied().sum::<Rational>(), Rational::one());
}

#[test]
fn leduc_cap_one_has_no_raises() {
    for name in ["12L33", "13L33"] {
        let g = gen(name);
        assert!(g.nodes.iter().all(|n| n.actions.iter().all(|a| g.label(a) != "raise")));
        // At most one bet per round: no bet follows a bet without a new board card.
        for n in &g.nodes {
            for (k, a) in n.actions.iter().enumerate() {
                if g.label(a) == "bet" {
                    let c = &g.nodes[n.children[k]];
                    assert!(c.actions.iter().all(|b| g.label(b) != "bet"));
                }
            }
        }
    }
}

fn check_well_formed(g: &GameTree) {
    g.check().unwrap();
    for n in &g.nodes {
        if n.kind == NodeKind::Terminal {
            assert!(n.payoff.iter().copied().sum::<Rational>().is_zero(), "not zero-sum");
            let team = g.team();
            assert!(team.iter().all(|&p| n.payoff[p] == n.payoff[team[0]]), "unequal team shares");
        }
        if n.kind == NodeKind::Chance {
            assert_eq!(n.probs.iter().copied().sum::<Rational>(), Rational::one());
        }
        if n.kind == NodeKind::Decision && g.role(n.player) == Role::Team {
            assert!(!n.pipb.is_empty());
        }
    }
    assert!(validate_public_turn_taking(g).ok);
    let part = compute_infosets(g).unwrap();
    for p in g.strategic_players() {
        assert!(validate_perfect_recall(g, &part, p).ok);
    }
}

#[test]
fn micro_corpus_is_small_and_well_formed() {
    let corpus = micro::corpus();
    assert_eq!(corpus.len(), 5);
    for m in corpus {
        assert!(m.game.nodes.len() <= 40, "{} has {} nodes", m.name, m.game.nodes.len());
        assert_eq!(m.game.team().len(), 2);
        assert!(m.game.omega.len() <= 3);
        check_well_formed(&m.game);
    }
}

#[test]
fn spec_names() {
    for name in ["12K3", "13K8", "12L33", "13L43", "12G", "13G"] {
        assert_eq!(GameSpec::parse(name).unwrap().name(), name);
    }
    let s = GameSpec::parse("13L43").unwrap();
    assert_eq!((s.family, s.opponents, s.team, s.ranks, s.suits), (Family::Leduc, 1, 3, 4, 3));
    for bad in ["", "1", "12X3", "12K", "11K3", "12K2", "12L2", "14G", "12Gx", "aa"] {
        assert!(GameSpec::parse(bad).is_err(), "{bad}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kuhn_instances_are_well_formed(team in 2usize..=3, extra in 0usize..=2) {
        let g = generate(&GameSpec::kuhn(1, team, 1 + team + extra)).unwrap();
        check_well_formed(&g);
    }

    #[test]
    fn leduc_instances_are_well_formed(ranks in 3usize..=4, suits in 2usize..=3) {
        let g = generate(&GameSpec::leduc(1, 2, ranks, suits)).unwrap();
        check_well_formed(&g);
    }
}

#[test]
fn goofspiel_instances_are_well_formed() {
    check_well_formed(&gen("12G"));
    check_well_formed(&gen("13G"));
}
