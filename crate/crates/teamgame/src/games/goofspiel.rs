//! Goofspiel for one opponent and a team.
//!
//! The prize order is drawn at the root. In each round every player bids
//! a card from their hand in seat order without seeing the other bids;
//! the round's last bid announces who took the prize (or the tie set) and
//! the next prize. The last round is forced and folded into the terminal.

use crate::game_core::{GameTree, NodeId, NodeKind, Obs, Rational, TreeBuilder};

use super::{seat_players, team_payoff, Family, GameSpec, GenError};

pub fn gen_goofspiel(spec: &GameSpec) -> Result<GameTree, GenError> {
    if spec.family != Family::Goofspiel {
        return Err(GenError::Argument("not a goofspiel spec".into()));
    }
    spec.validate()?;
    Ok(goofspiel_with_cards(spec, spec.ranks))
}

/// Goofspiel with `cards` cards per hand and prize stack.
pub(crate) fn goofspiel_with_cards(spec: &GameSpec, cards: usize) -> GameTree {
    let seats = spec.players();
    let players = seat_players(spec.opponents, spec.team);
    let omega = (1..=cards).map(|c| c.to_string()).collect();
    let mut g = Goof {
        b: TreeBuilder::new(players, omega),
        cards,
        seats,
        team_seats: (spec.opponents..seats).collect(),
        prizes: Vec::new(),
    };
    let root = g.b.open(NodeKind::Chance, 0, None);
    let orders = permutations(cards);
    let n = orders.len() as i64;
    for order in orders {
        g.prizes = order.iter().map(|&p| p + 1).collect();
        let st = State {
            round: 0,
            hands: vec![(1..=cards).collect(); seats],
            bids: Vec::new(),
            rewards: vec![Rational::from_integer(0); seats],
        };
        let child = g.bid(root, st);
        let label = g.b.intern(&order.iter().map(|p| (p + 1).to_string()).collect::<Vec<_>>().join(","));
        let tok = g.b.intern(&format!("prize={}", g.prizes[0]));
        let mut obs = vec![Obs::Token(tok); seats + 1];
        obs[0] = Obs::Hidden;
        let o = g.b.obs_id(obs);
        g.b.link(root, label, o, child);
        g.b.node_mut(root).probs.push(Rational::new(1, n));
    }
    g.b.finish()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut v = vec![first];
            v.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(v);
        }
    }
    out
}

#[derive(Clone)]
struct State {
    round: usize,
    hands: Vec<Vec<usize>>,
    bids: Vec<usize>,
    rewards: Vec<Rational>,
}

struct Goof {
    b: TreeBuilder,
    cards: usize,
    seats: usize,
    team_seats: Vec<usize>,
    prizes: Vec<usize>,
}

impl Goof {
    fn bid(&mut self, parent: NodeId, st: State) -> NodeId {
        let seat = st.bids.len();
        let id = self.b.open(NodeKind::Decision, seat + 1, Some(parent));
        if self.team_seats.contains(&seat) {
            let pipb = self.pipb(seat, &st);
            let pipb = pipb.iter().map(|s| self.b.intern(s)).collect();
            self.b.node_mut(id).pipb = pipb;
        }
        for &card in &st.hands[seat].clone() {
            let mut next = st.clone();
            next.bids.push(card);
            next.hands[seat].retain(|&c| c != card);
            let label = format!("bid={card}");
            let last = seat + 1 == self.seats;
            let (child, obs) = if last {
                let outcome = self.settle(&mut next);
                let child = if next.round + 1 == self.cards - 1 {
                    self.terminal(id, next)
                } else {
                    next.round += 1;
                    next.bids.clear();
                    self.bid(id, next)
                };
                let others = self.b.intern(&outcome);
                let own = self.b.intern(&format!("{label};{outcome}"));
                let mut v = vec![Obs::Token(others); self.seats + 1];
                v[0] = Obs::Hidden;
                v[seat + 1] = Obs::Token(own);
                (child, self.b.obs_id(v))
            } else {
                let child = self.bid(id, next);
                let mut v = vec![Obs::Hidden; self.seats + 1];
                v[seat + 1] = Obs::Full;
                (child, self.b.obs_id(v))
            };
            let l = self.b.intern(&label);
            self.b.link(id, l, obs, child);
        }
        id
    }

    /// Awards the current round's prize and returns the public announcement.
    fn settle(&self, st: &mut State) -> String {
        let prize = self.prizes[st.round];
        let best = *st.bids.iter().max().unwrap();
        let winners: Vec<usize> = (0..self.seats).filter(|&s| st.bids[s] == best).collect();
        let share = Rational::new(prize as i64, winners.len() as i64);
        for &w in &winners {
            st.rewards[w] += share;
        }
        let who = winners.iter().map(|w| format!("P{}", w + 1)).collect::<Vec<_>>().join("+");
        let mut s = if winners.len() == 1 {
            format!("r{}:win={who}", st.round + 1)
        } else {
            format!("r{}:tie={who}", st.round + 1)
        };
        if st.round + 1 < self.cards {
            s.push_str(&format!(";prize={}", self.prizes[st.round + 1]));
        }
        s
    }

    fn terminal(&mut self, parent: NodeId, mut st: State) -> NodeId {
        // Forced final round.
        st.bids = st.hands.iter().map(|h| h[0]).collect();
        st.round = self.cards - 1;
        self.settle(&mut st);
        let n = self.team_seats.len() as i64;
        let team_mean: Rational =
            self.team_seats.iter().map(|&s| st.rewards[s]).sum::<Rational>() / Rational::from_integer(n);
        let total: i64 = self.prizes.iter().map(|&p| p as i64).sum();
        let fair = Rational::new(total, n + 1);
        // Team members score the team mean; shift to zero-sum.
        let mut net = vec![Rational::from_integer(0); self.seats + 1];
        for s in 0..self.seats {
            net[s + 1] = if self.team_seats.contains(&s) { team_mean - fair } else { st.rewards[s] - fair };
        }
        let payoff = team_payoff(&self.b.players, &net);
        let id = self.b.open(NodeKind::Terminal, 0, Some(parent));
        self.b.node_mut(id).payoff = payoff;
        id
    }

    /// Hand of the next teammate (cyclically) at the start of the round.
    fn pipb(&self, seat: usize, st: &State) -> Vec<String> {
        let pos = self.team_seats.iter().position(|&s| s == seat).unwrap();
        let o = self.team_seats[(pos + 1) % self.team_seats.len()];
        let mut hand = st.hands[o].clone();
        if o < st.bids.len() {
            hand.push(st.bids[o]);
            hand.sort_unstable();
        }
        hand.iter().map(|c| format!("P{}={c}", o + 1)).collect()
    }
}
