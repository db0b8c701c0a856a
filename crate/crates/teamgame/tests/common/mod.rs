#![allow(dead_code)]

use teamgame::game_core::{GameTree, NodeId, NodeKind, Obs, Player, Rational, Role, TreeBuilder};

/// Who observes an action.
#[derive(Clone, Copy)]
pub enum Vis {
    All,
    Only(usize),
    Nobody,
}

pub enum T {
    Chance(Vec<(&'static str, Vis, Rational, T)>),
    Dec(usize, Vec<(&'static str, Vis, T)>),
    Leaf(Vec<i64>),
}

pub fn leaf(v: &[i64]) -> T {
    T::Leaf(v.to_vec())
}

pub fn dec(p: usize, xs: Vec<(&'static str, Vis, T)>) -> T {
    T::Dec(p, xs)
}

pub fn chance(xs: Vec<(&'static str, Vis, T)>) -> T {
    let n = xs.len() as i64;
    T::Chance(xs.into_iter().map(|(l, v, t)| (l, v, Rational::new(1, n), t)).collect())
}

pub fn players(roles: &[Role]) -> Vec<Player> {
    roles
        .iter()
        .enumerate()
        .map(|(i, &role)| Player { name: if i == 0 { "chance".into() } else { format!("P{i}") }, role })
        .collect()
}

/// Chance, one opponent `P1`, one more strategic player `P2`.
pub fn two_player(t: T) -> GameTree {
    build(players(&[Role::Chance, Role::Opponent, Role::Team]), t)
}

pub fn build(players: Vec<Player>, t: T) -> GameTree {
    let np = players.len();
    let mut b = TreeBuilder::new(players, Vec::new());
    go(&mut b, np, None, &t);
    let g = b.finish();
    g.check().expect("well-formed test game");
    g
}

fn obs_vec(np: usize, v: Vis) -> Vec<Obs> {
    (0..np)
        .map(|p| match v {
            Vis::All if p > 0 => Obs::Full,
            Vis::Only(q) if q == p => Obs::Full,
            _ => Obs::Hidden,
        })
        .collect()
}

fn go(b: &mut TreeBuilder, np: usize, parent: Option<NodeId>, t: &T) -> NodeId {
    match t {
        T::Leaf(v) => {
            let id = b.open(NodeKind::Terminal, 0, parent);
            let mut payoff = vec![Rational::from_integer(0); np];
            for (p, &x) in v.iter().enumerate() {
                payoff[p + 1] = Rational::from_integer(x);
            }
            b.node_mut(id).payoff = payoff;
            id
        }
        T::Chance(xs) => {
            let id = b.open(NodeKind::Chance, 0, parent);
            for (l, v, p, sub) in xs {
                let c = go(b, np, Some(id), sub);
                let (l, o) = (b.intern(l), b.obs_id(obs_vec(np, *v)));
                b.link(id, l, o, c);
                b.node_mut(id).probs.push(*p);
            }
            id
        }
        T::Dec(player, xs) => {
            let id = b.open(NodeKind::Decision, *player, parent);
            for (l, v, sub) in xs {
                let c = go(b, np, Some(id), sub);
                let (l, o) = (b.intern(l), b.obs_id(obs_vec(np, *v)));
                b.link(id, l, o, c);
            }
            id
        }
    }
}

/// Simultaneous matching pennies: `P1` moves unseen, `P2` wins on a match.
pub fn matching_pennies() -> GameTree {
    let row = |a: i64| dec(2, vec![("h", Vis::All, leaf(&[-a, a])), ("t", Vis::All, leaf(&[a, -a]))]);
    two_player(dec(1, vec![("H", Vis::Only(1), row(1)), ("T", Vis::Only(1), row(-1))]))
}
