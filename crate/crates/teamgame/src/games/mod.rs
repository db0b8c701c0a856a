//! Parametric generators for Kuhn, Leduc and Goofspiel team games.

mod goofspiel;
pub mod micro;
mod poker;

pub use goofspiel::gen_goofspiel;
pub use poker::{gen_kuhn, gen_leduc};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game_core::{GameTree, Player, Rational, Role};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("argument error: {0}")]
    Argument(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Kuhn,
    Leduc,
    Goofspiel,
}

/// Instance parameters, named like `12K3` (1 opponent, 2 team members,
/// 3 ranks) or `12L33` (Leduc with 3 ranks and 3 suits).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    pub family: Family,
    pub opponents: usize,
    pub team: usize,
    pub ranks: usize,
    pub suits: usize,
    pub bet_cap: usize,
}

impl GameSpec {
    pub fn kuhn(opponents: usize, team: usize, ranks: usize) -> Self {
        GameSpec { family: Family::Kuhn, opponents, team, ranks, suits: 1, bet_cap: 1 }
    }

    pub fn leduc(opponents: usize, team: usize, ranks: usize, suits: usize) -> Self {
        GameSpec { family: Family::Leduc, opponents, team, ranks, suits, bet_cap: 1 }
    }

    pub fn goofspiel(opponents: usize, team: usize) -> Self {
        GameSpec { family: Family::Goofspiel, opponents, team, ranks: 3, suits: 1, bet_cap: 1 }
    }

    pub fn players(&self) -> usize {
        self.opponents + self.team
    }

    /// Parses names such as `12K3`, `13L43` and `12G`.
    pub fn parse(name: &str) -> Result<Self, GenError> {
        let bad = || GenError::Argument(format!("cannot parse instance name {name:?}"));
        let chars: Vec<char> = name.chars().collect();
        if chars.len() < 3 {
            return Err(bad());
        }
        let m = chars[0].to_digit(10).ok_or_else(bad)? as usize;
        let n = chars[1].to_digit(10).ok_or_else(bad)? as usize;
        let rest: String = chars[3..].iter().collect();
        let spec = match chars[2] {
            'K' => GameSpec::kuhn(m, n, rest.parse().map_err(|_| bad())?),
            'L' => {
                if rest.len() < 2 {
                    return Err(bad());
                }
                let (r, c) = rest.split_at(rest.len() - 1);
                GameSpec::leduc(m, n, r.parse().map_err(|_| bad())?, c.parse().map_err(|_| bad())?)
            }
            'G' if rest.is_empty() => GameSpec::goofspiel(m, n),
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn name(&self) -> String {
        match self.family {
            Family::Kuhn => format!("{}{}K{}", self.opponents, self.team, self.ranks),
            Family::Leduc => format!("{}{}L{}{}", self.opponents, self.team, self.ranks, self.suits),
            Family::Goofspiel => format!("{}{}G", self.opponents, self.team),
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let err = |s: &str| Err(GenError::Argument(s.to_string()));
        if self.opponents < 1 {
            return err("at least one opponent is required");
        }
        if self.team < 2 {
            return err("the team needs at least two members");
        }
        match self.family {
            Family::Kuhn => {
                if self.ranks < self.players() {
                    return err("kuhn needs at least as many ranks as players");
                }
            }
            Family::Leduc => {
                if self.ranks < 3 {
                    return err("leduc needs at least three ranks");
                }
                if self.suits < 1 || self.ranks * self.suits < self.players() + 1 {
                    return err("leduc deck too small for the players and the board card");
                }
                if self.bet_cap < 1 {
                    return err("bet cap must be at least one");
                }
            }
            Family::Goofspiel => {
                if self.opponents != 1 || !(2..=3).contains(&self.team) || self.ranks != 3 {
                    return err("goofspiel supports one opponent, two or three team members, three ranks");
                }
            }
        }
        Ok(())
    }
}

pub fn generate(spec: &GameSpec) -> Result<GameTree, GenError> {
    match spec.family {
        Family::Kuhn => gen_kuhn(spec),
        Family::Leduc => gen_leduc(spec),
        Family::Goofspiel => gen_goofspiel(spec),
    }
}

/// Seats: chance first, then opponents, then team members.
pub(crate) fn seat_players(opponents: usize, team: usize) -> Vec<Player> {
    let mut v = vec![Player { name: "chance".into(), role: Role::Chance }];
    for i in 0..opponents + team {
        let role = if i < opponents { Role::Opponent } else { Role::Team };
        v.push(Player { name: format!("P{}", i + 1), role });
    }
    v
}

/// Zero-sum payoff vector: opponents keep their own result, team members
/// share the team's total equally.
pub(crate) fn team_payoff(players: &[Player], net: &[Rational]) -> Vec<Rational> {
    let team: Vec<usize> = (0..players.len()).filter(|&p| players[p].role == Role::Team).collect();
    let total: Rational = team.iter().map(|&p| net[p]).sum();
    let share = total / Rational::from_integer(team.len() as i64);
    (0..players.len())
        .map(|p| match players[p].role {
            Role::Team => share,
            Role::Chance | Role::Dummy => Rational::from_integer(0),
            _ => net[p],
        })
        .collect()
}
