//! `teamgame/1` text format: one JSON document per game.
//!
//! Visibility codes per (action, player): `-` hidden, `*` full label,
//! `=tok` only the token `tok`. Vectors are aligned with the player list.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tree::{CoordTag, GameTree, Node, NodeKind, Obs, Player, Rational, TreeBuilder};
use super::GameError;

pub const FORMAT_VERSION: &str = "teamgame/1";

#[derive(Serialize, Deserialize)]
struct Doc {
    version: String,
    players: Vec<Player>,
    omega: Vec<String>,
    nodes: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
struct ActionDoc {
    label: String,
    vis: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CoordDoc {
    source_infoset: u32,
    member: usize,
    assignment: String,
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    id: usize,
    kind: String,
    player: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    actions: Vec<ActionDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    probs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    payoff: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pipb: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    origin: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coord: Option<CoordDoc>,
}

fn rat_str(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rat(s: &str) -> Result<Rational, GameError> {
    let bad = || GameError::Format(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn to_doc(game: &GameTree) -> Doc {
    let s = |i: u32| game.strings.get(i).to_string();
    let nodes = game
        .nodes
        .iter()
        .enumerate()
        .map(|(id, n)| NodeDoc {
            id,
            kind: match n.kind {
                NodeKind::Chance => "chance",
                NodeKind::Decision => "decision",
                NodeKind::Terminal => "terminal",
            }
            .to_string(),
            player: n.player,
            actions: n
                .actions
                .iter()
                .map(|a| ActionDoc {
                    label: s(a.label),
                    vis: game
                        .obs(a)
                        .iter()
                        .map(|o| match o {
                            Obs::Hidden => "-".to_string(),
                            Obs::Full => "*".to_string(),
                            Obs::Token(t) => format!("={}", s(*t)),
                        })
                        .collect(),
                })
                .collect(),
            children: n.children.clone(),
            probs: n.probs.iter().map(rat_str).collect(),
            payoff: n.payoff.iter().map(rat_str).collect(),
            pipb: n.pipb.iter().map(|&i| s(i)).collect(),
            origin: n.origin,
            coord: n.coord.map(|c| CoordDoc {
                source_infoset: c.source_infoset,
                member: c.member,
                assignment: s(c.assignment),
            }),
        })
        .collect();
    Doc { version: FORMAT_VERSION.to_string(), players: game.players.clone(), omega: game.omega.clone(), nodes }
}

fn from_doc(doc: Doc) -> Result<GameTree, GameError> {
    if doc.version != FORMAT_VERSION {
        return Err(GameError::Format(format!("unsupported version {:?}", doc.version)));
    }
    let np = doc.players.len();
    let mut b = TreeBuilder::new(doc.players, doc.omega);
    for (i, nd) in doc.nodes.iter().enumerate() {
        if nd.id != i {
            return Err(GameError::Format(format!("node ids must be dense; found {} at {i}", nd.id)));
        }
        let kind = match nd.kind.as_str() {
            "chance" => NodeKind::Chance,
            "decision" => NodeKind::Decision,
            "terminal" => NodeKind::Terminal,
            k => return Err(GameError::Format(format!("node {i}: unknown kind {k:?}"))),
        };
        b.nodes.push(Node::new(kind, nd.player, None));
    }
    for (i, nd) in doc.nodes.into_iter().enumerate() {
        if nd.actions.len() != nd.children.len() {
            return Err(GameError::Format(format!("node {i}: action/child count mismatch")));
        }
        for (k, (a, &c)) in nd.actions.iter().zip(&nd.children).enumerate() {
            if a.vis.len() != np {
                return Err(GameError::Visibility { node: i, action: k });
            }
            let mut obs = Vec::with_capacity(np);
            for v in &a.vis {
                obs.push(match v.as_str() {
                    "-" => Obs::Hidden,
                    "*" => Obs::Full,
                    t if t.starts_with('=') => Obs::Token(b.intern(&t[1..])),
                    _ => return Err(GameError::Visibility { node: i, action: k }),
                });
            }
            let label = b.intern(&a.label);
            let oid = b.obs_id(obs);
            if c >= b.nodes.len() {
                return Err(GameError::Format(format!("node {i}: child {c} out of range")));
            }
            b.link(i, label, oid, c);
            b.nodes[c].parent = Some(i);
        }
        let probs = nd.probs.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>()?;
        let payoff = nd.payoff.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>()?;
        let pipb = nd.pipb.iter().map(|s| b.intern(s)).collect();
        let coord = nd.coord.map(|c| CoordTag {
            source_infoset: c.source_infoset,
            member: c.member,
            assignment: b.intern(&c.assignment),
        });
        let n = b.node_mut(i);
        n.probs = probs;
        n.payoff = payoff;
        n.pipb = pipb;
        n.origin = nd.origin;
        n.coord = coord;
    }
    let g = b.finish();
    g.check()?;
    Ok(g)
}

pub fn save_string(game: &GameTree) -> String {
    serde_json::to_string(&to_doc(game)).expect("game serializes")
}

pub fn load_str(s: &str) -> Result<GameTree, GameError> {
    let doc: Doc = serde_json::from_str(s).map_err(|e| GameError::Format(e.to_string()))?;
    from_doc(doc)
}

pub fn save(game: &GameTree, path: impl AsRef<Path>) -> Result<(), GameError> {
    let f = std::fs::File::create(path)?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer(&mut w, &to_doc(game)).map_err(|e| GameError::Format(e.to_string()))?;
    w.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<GameTree, GameError> {
    let f = std::fs::File::open(path)?;
    let mut s = String::new();
    BufReader::new(f).read_to_string(&mut s)?;
    load_str(&s)
}
