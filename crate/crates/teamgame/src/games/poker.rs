//! Kuhn and Leduc poker for one or more opponents and a team.
//!
//! Betting: players act in seat order and may check or bet. A bet makes
//! every other active player respond in seat order after the bettor
//! (wrapping around) with fold or call, or raise while under the cap.
//! Folded players never act again.

use crate::game_core::{GameTree, NodeId, NodeKind, Obs, Rational, TreeBuilder};

use super::{seat_players, team_payoff, Family, GameSpec, GenError};

pub fn gen_kuhn(spec: &GameSpec) -> Result<GameTree, GenError> {
    if spec.family != Family::Kuhn {
        return Err(GenError::Argument("not a kuhn spec".into()));
    }
    spec.validate()?;
    Ok(Poker::new(spec, false).build())
}

pub fn gen_leduc(spec: &GameSpec) -> Result<GameTree, GenError> {
    if spec.family != Family::Leduc {
        return Err(GenError::Argument("not a leduc spec".into()));
    }
    spec.validate()?;
    Ok(Poker::new(spec, true).build())
}

#[derive(Clone, Debug)]
struct RoundState {
    round: usize,
    contrib: Vec<i64>,
    active: Vec<bool>,
    queue: Vec<usize>,
    bets: usize,
    level: i64,
}

impl RoundState {
    fn alive(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Active seats other than `from`, in seat order starting after it.
    fn others_after(&self, from: usize) -> Vec<usize> {
        let n = self.active.len();
        (1..n).map(|k| (from + k) % n).filter(|&s| self.active[s]).collect()
    }
}

struct Poker<'a> {
    b: TreeBuilder,
    spec: &'a GameSpec,
    leduc: bool,
    seats: usize,
    team_seats: Vec<usize>,
    cards: Vec<usize>,
    board: usize,
    full_obs: u32,
}

fn rank_name(r: usize) -> String {
    (r + 1).to_string()
}

fn falling(n: i64, k: usize) -> i64 {
    (0..k as i64).map(|i| n - i).product()
}

impl<'a> Poker<'a> {
    fn new(spec: &'a GameSpec, leduc: bool) -> Self {
        let players = seat_players(spec.opponents, spec.team);
        let omega = (0..spec.ranks).map(rank_name).collect();
        let mut b = TreeBuilder::new(players, omega);
        let seats = spec.players();
        let mut full = vec![Obs::Full; seats + 1];
        full[0] = Obs::Hidden;
        let full_obs = b.obs_id(full);
        Poker {
            b,
            spec,
            leduc,
            seats,
            team_seats: (spec.opponents..seats).collect(),
            cards: vec![0; seats],
            board: 0,
            full_obs,
        }
    }

    fn rounds(&self) -> usize {
        if self.leduc {
            2
        } else {
            1
        }
    }

    fn bet_size(&self, round: usize) -> i64 {
        if !self.leduc {
            1
        } else if round == 0 {
            2
        } else {
            4
        }
    }

    fn cap(&self) -> usize {
        if self.leduc {
            self.spec.bet_cap
        } else {
            1
        }
    }

    /// Deal outcomes with integer weights: private ranks per seat, then
    /// the board rank for Leduc.
    fn deals(&self) -> (Vec<Vec<usize>>, Vec<i64>, i64) {
        let r = self.spec.ranks;
        let len = self.seats + usize::from(self.leduc);
        let copies = if self.leduc { self.spec.suits } else { 1 };
        let mut out = Vec::new();
        let mut weights = Vec::new();
        let mut cur = Vec::with_capacity(len);
        let mut used = vec![0usize; r];
        fn rec(
            len: usize,
            r: usize,
            copies: usize,
            cur: &mut Vec<usize>,
            used: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
            weights: &mut Vec<i64>,
        ) {
            if cur.len() == len {
                out.push(cur.clone());
                weights.push(used.iter().map(|&k| falling(copies as i64, k)).product());
                return;
            }
            for x in 0..r {
                if used[x] < copies {
                    used[x] += 1;
                    cur.push(x);
                    rec(len, r, copies, cur, used, out, weights);
                    cur.pop();
                    used[x] -= 1;
                }
            }
        }
        rec(len, r, copies, &mut cur, &mut used, &mut out, &mut weights);
        let total = falling((r * copies) as i64, len);
        (out, weights, total)
    }

    fn build(mut self) -> GameTree {
        let root = self.b.open(NodeKind::Chance, 0, None);
        let (deals, weights, total) = self.deals();
        for (deal, w) in deals.iter().zip(weights) {
            self.cards = deal[..self.seats].to_vec();
            if self.leduc {
                self.board = deal[self.seats];
            }
            let label = if self.leduc {
                format!(
                    "{}|{}",
                    self.cards.iter().map(|&c| rank_name(c)).collect::<Vec<_>>().join(","),
                    rank_name(self.board)
                )
            } else {
                self.cards.iter().map(|&c| rank_name(c)).collect::<Vec<_>>().join(",")
            };
            let mut obs = vec![Obs::Hidden];
            for s in 0..self.seats {
                obs.push(Obs::Token(self.b.intern(&format!("own={}", rank_name(self.cards[s])))));
            }
            let st = RoundState {
                round: 0,
                contrib: vec![1; self.seats],
                active: vec![true; self.seats],
                queue: (0..self.seats).collect(),
                bets: 0,
                level: 1,
            };
            let child = self.decision(root, st);
            let l = self.b.intern(&label);
            let o = self.b.obs_id(obs);
            self.b.link(root, l, o, child);
            self.b.node_mut(root).probs.push(Rational::new(w, total));
        }
        self.b.finish()
    }

    fn decision(&mut self, parent: NodeId, st: RoundState) -> NodeId {
        if st.queue.is_empty() {
            return self.round_end(parent, st);
        }
        let seat = st.queue[0];
        let id = self.b.open(NodeKind::Decision, seat + 1, Some(parent));
        if self.team_seats.contains(&seat) {
            let pipb = self.pipb(seat, st.round);
            let pipb = pipb.iter().map(|s| self.b.intern(s)).collect();
            self.b.node_mut(id).pipb = pipb;
        }
        let mut moves = Vec::new();
        if st.bets == 0 {
            moves.push("check");
            moves.push("bet");
        } else {
            moves.push("fold");
            moves.push("call");
            if st.bets < self.cap() {
                moves.push("raise");
            }
        }
        for mv in moves {
            let next = self.apply(&st, seat, mv);
            let closes_round = next.queue.is_empty() && next.round + 1 < self.rounds() && next.alive() > 1;
            let child = self.decision(id, next);
            let label = self.b.intern(mv);
            let obs = if closes_round {
                let tok = self.b.intern(&format!("{mv}|board={}", rank_name(self.board)));
                let mut v = vec![Obs::Token(tok); self.seats + 1];
                v[0] = Obs::Hidden;
                self.b.obs_id(v)
            } else {
                self.full_obs
            };
            self.b.link(id, label, obs, child);
        }
        id
    }

    fn apply(&self, st: &RoundState, seat: usize, mv: &str) -> RoundState {
        let mut s = st.clone();
        s.queue.remove(0);
        match mv {
            "check" => {}
            "bet" | "raise" => {
                s.bets += 1;
                s.level += self.bet_size(s.round);
                s.contrib[seat] = s.level;
                s.queue = s.others_after(seat);
            }
            "call" => s.contrib[seat] = s.level,
            "fold" => s.active[seat] = false,
            _ => unreachable!(),
        }
        s
    }

    fn round_end(&mut self, parent: NodeId, st: RoundState) -> NodeId {
        if st.alive() == 1 || st.round + 1 == self.rounds() {
            return self.terminal(parent, &st);
        }
        let next = RoundState {
            round: st.round + 1,
            queue: (0..self.seats).filter(|&s| st.active[s]).collect(),
            bets: 0,
            ..st
        };
        self.decision(parent, next)
    }

    fn strength(&self, seat: usize) -> usize {
        let c = self.cards[seat];
        if self.leduc && c == self.board {
            self.spec.ranks + c
        } else {
            c
        }
    }

    fn terminal(&mut self, parent: NodeId, st: &RoundState) -> NodeId {
        let live: Vec<usize> = (0..self.seats).filter(|&s| st.active[s]).collect();
        let best = live.iter().map(|&s| self.strength(s)).max().unwrap();
        let winners: Vec<usize> = live.into_iter().filter(|&s| self.strength(s) == best).collect();
        let pot: i64 = st.contrib.iter().sum();
        let share = Rational::new(pot, winners.len() as i64);
        let mut net = vec![Rational::from_integer(0); self.seats + 1];
        for s in 0..self.seats {
            net[s + 1] = -Rational::from_integer(st.contrib[s]);
            if winners.contains(&s) {
                net[s + 1] += share;
            }
        }
        let payoff = team_payoff(&self.b.players, &net);
        let id = self.b.open(NodeKind::Terminal, 0, Some(parent));
        self.b.node_mut(id).payoff = payoff;
        id
    }

    /// Teammate rank assignments consistent with what `seat` knows.
    fn pipb(&self, seat: usize, round: usize) -> Vec<String> {
        let others: Vec<usize> = self.team_seats.iter().copied().filter(|&s| s != seat).collect();
        let r = self.spec.ranks;
        let copies = if self.leduc { self.spec.suits } else { 1 };
        let mut used = vec![0usize; r];
        used[self.cards[seat]] += 1;
        if self.leduc && round >= 1 {
            used[self.board] += 1;
        }
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(
            others: &[usize],
            r: usize,
            copies: usize,
            used: &mut Vec<usize>,
            cur: &mut Vec<String>,
            out: &mut Vec<String>,
        ) {
            if cur.len() == others.len() {
                out.push(cur.join(","));
                return;
            }
            let who = others[cur.len()];
            for x in 0..r {
                if used[x] < copies {
                    used[x] += 1;
                    cur.push(format!("P{}={}", who + 1, rank_name(x)));
                    rec(others, r, copies, used, cur, out);
                    cur.pop();
                    used[x] -= 1;
                }
            }
        }
        rec(&others, r, copies, &mut used, &mut cur, &mut out);
        out
    }
}
