//! Hand-built calibration games: one opponent (`P1`), a two-member team
//! (`P2`, `P3`), at most 40 nodes each.

use crate::game_core::{GameTree, NodeId, NodeKind, Obs, Rational, TreeBuilder};

use super::goofspiel::goofspiel_with_cards;
use super::{seat_players, team_payoff, GameSpec};

/// Who observes a layer's action.
#[derive(Clone, Copy)]
enum Vis {
    All,
    Only(usize),
}

struct Layer {
    /// 0 = chance, otherwise the seat's player id.
    player: usize,
    labels: &'static [&'static str],
    vis: Vis,
    /// Teammate private-state assignments for team layers.
    pipb: fn(&[usize]) -> Vec<String>,
}

fn none(_: &[usize]) -> Vec<String> {
    vec!["none".to_string()]
}

/// Builds a game where every path visits the same sequence of layers.
/// `team_value` maps the full action history to the team's total payoff.
fn layered(name: &str, omega: &[&str], layers: &[Layer], team_value: fn(&[usize]) -> Rational) -> MicroGame {
    let players = seat_players(1, 2);
    let mut b = TreeBuilder::new(players, omega.iter().map(|s| s.to_string()).collect());
    let mut hist = Vec::new();
    build(&mut b, None, layers, &mut hist, team_value);
    MicroGame { name: name.to_string(), game: b.finish() }
}

fn build(
    b: &mut TreeBuilder,
    parent: Option<NodeId>,
    layers: &[Layer],
    hist: &mut Vec<usize>,
    team_value: fn(&[usize]) -> Rational,
) -> NodeId {
    let depth = hist.len();
    if depth == layers.len() {
        let t = team_value(hist);
        let mut net = vec![Rational::from_integer(0); 4];
        net[1] = -t;
        net[2] = t / Rational::from_integer(2);
        net[3] = t / Rational::from_integer(2);
        let payoff = team_payoff(&b.players, &net);
        let id = b.open(NodeKind::Terminal, 0, parent);
        b.node_mut(id).payoff = payoff;
        return id;
    }
    let layer = &layers[depth];
    let kind = if layer.player == 0 { NodeKind::Chance } else { NodeKind::Decision };
    let id = b.open(kind, layer.player, parent);
    if layer.player >= 2 {
        let pipb = (layer.pipb)(hist).iter().map(|s| b.intern(s)).collect();
        b.node_mut(id).pipb = pipb;
    }
    let k = layer.labels.len() as i64;
    for (i, l) in layer.labels.iter().enumerate() {
        hist.push(i);
        let child = build(b, Some(id), layers, hist, team_value);
        hist.pop();
        let obs = match layer.vis {
            Vis::All => {
                let mut v = vec![Obs::Full; 4];
                v[0] = Obs::Hidden;
                v
            }
            Vis::Only(p) => {
                let mut v = vec![Obs::Hidden; 4];
                v[p] = Obs::Full;
                v
            }
        };
        let o = b.obs_id(obs);
        let label = b.intern(l);
        b.link(id, label, o, child);
        if kind == NodeKind::Chance {
            b.node_mut(id).probs.push(Rational::new(1, k));
        }
    }
    id
}

fn p2_bit(_: &[usize]) -> Vec<String> {
    vec!["P2=0".to_string(), "P2=1".to_string()]
}

#[derive(Clone, Debug)]
pub struct MicroGame {
    pub name: String,
    pub game: GameTree,
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// `P2` privately learns a bit and sends a public signal; `P3` guesses the
/// bit. The opponent secretly picks a signal to penalize.
pub fn signaling() -> MicroGame {
    layered(
        "signaling",
        &["0", "1"],
        &[
            Layer { player: 1, labels: &["o0", "o1"], vis: Vis::Only(1), pipb: none },
            Layer { player: 0, labels: &["x0", "x1"], vis: Vis::Only(2), pipb: none },
            Layer { player: 2, labels: &["s0", "s1"], vis: Vis::All, pipb: none },
            Layer { player: 3, labels: &["g0", "g1"], vis: Vis::All, pipb: p2_bit },
        ],
        |h| {
            let (o, x, s, g) = (h[0], h[1], h[2], h[3]);
            let mut v = if g == x { r(2) } else { r(0) };
            if s == o {
                v -= r(1);
            }
            v
        },
    )
}

/// Separates independent play, correlated play and full information
/// sharing: `P2` sees a private bit, nobody sees the opponent's move or
/// the teammate's action.
pub fn correlation() -> MicroGame {
    const U: [[[[i64; 2]; 2]; 2]; 2] = [[[[1, 0], [0, 1]], [[0, 0], [0, 1]]], [[[0, 0], [1, 0]], [[0, 1], [1, 1]]]];
    layered(
        "correlation",
        &["0", "1"],
        &[
            Layer { player: 1, labels: &["o0", "o1"], vis: Vis::Only(1), pipb: none },
            Layer { player: 0, labels: &["x0", "x1"], vis: Vis::Only(2), pipb: none },
            Layer { player: 2, labels: &["a0", "a1"], vis: Vis::Only(2), pipb: none },
            Layer { player: 3, labels: &["b0", "b1"], vis: Vis::Only(3), pipb: p2_bit },
        ],
        |h| {
            let (o, x, a, b) = (h[0], h[1], h[2], h[3]);
            r(U[x][o][a][b])
        },
    )
}

/// The opponent hides a bit first; the team scores only if both members
/// name it.
pub fn opponent_first() -> MicroGame {
    layered(
        "opponent-first",
        &[],
        &[
            Layer { player: 1, labels: &["o0", "o1"], vis: Vis::Only(1), pipb: none },
            Layer { player: 2, labels: &["a0", "a1"], vis: Vis::Only(2), pipb: none },
            Layer { player: 3, labels: &["b0", "b1"], vis: Vis::Only(3), pipb: none },
        ],
        |h| if h[0] == h[1] && h[1] == h[2] { r(1) } else { r(0) },
    )
}

/// Both team members act publicly, then the opponent guesses `P2`'s bit.
pub fn opponent_last() -> MicroGame {
    layered(
        "opponent-last",
        &["0", "1"],
        &[
            Layer { player: 0, labels: &["x0", "x1"], vis: Vis::Only(2), pipb: none },
            Layer { player: 2, labels: &["a0", "a1"], vis: Vis::All, pipb: none },
            Layer { player: 3, labels: &["b0", "b1"], vis: Vis::All, pipb: p2_bit },
            Layer { player: 1, labels: &["o0", "o1"], vis: Vis::All, pipb: none },
        ],
        |h| {
            let (x, a, b, o) = (h[0], h[1], h[2], h[3]);
            let mut v = r(0);
            if b == x {
                v += r(2);
            }
            if a == b {
                v += r(1);
            }
            if o == x {
                v -= r(2);
            }
            v
        },
    )
}

/// Two-card Goofspiel: hands shrink as cards are bid.
pub fn dynamic() -> MicroGame {
    MicroGame { name: "dynamic".to_string(), game: goofspiel_with_cards(&GameSpec::goofspiel(1, 2), 2) }
}

pub fn corpus() -> Vec<MicroGame> {
    vec![signaling(), correlation(), opponent_first(), opponent_last(), dynamic()]
}
