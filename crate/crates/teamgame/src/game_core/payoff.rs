use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::infosets::InfoSetPartition;
use super::tree::{GameTree, NodeKind, Rational};
use super::GameError;

/// Numeric type usable for reach-weighted payoff sums.
pub trait Scalar: Clone + Zero + Add<Output = Self> + for<'a> Mul<&'a Self, Output = Self> {
    fn from_rational(r: &Rational) -> Self;
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        *r.numer() as f64 / *r.denom() as f64
    }
}

impl Scalar for BigRational {
    fn from_rational(r: &Rational) -> Self {
        BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    f64::from_rational(r)
}

pub fn big_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Per-infoset action distributions, indexed by infoset id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehavioralProfile {
    pub probs: Vec<Vec<f64>>,
}

impl BehavioralProfile {
    pub fn uniform(partition: &InfoSetPartition) -> Self {
        BehavioralProfile {
            probs: partition.sets.iter().map(|s| vec![1.0 / s.actions.len() as f64; s.actions.len()]).collect(),
        }
    }

    pub fn validate(&self, partition: &InfoSetPartition, tol: f64) -> Result<(), GameError> {
        if self.probs.len() != partition.sets.len() {
            return Err(GameError::Profile(format!(
                "profile covers {} infosets, partition has {}",
                self.probs.len(),
                partition.sets.len()
            )));
        }
        for (i, (p, s)) in self.probs.iter().zip(&partition.sets).enumerate() {
            if p.len() != s.actions.len() {
                return Err(GameError::Profile(format!("infoset {i}: wrong action count")));
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > tol || p.iter().any(|&x| x < -tol || !x.is_finite()) {
                return Err(GameError::Profile(format!("infoset {i}: distribution sums to {sum}")));
            }
        }
        Ok(())
    }
}

/// Expected payoff vector under a behavioral profile, by one tree pass.
pub fn expected_payoff(
    game: &GameTree,
    partition: &InfoSetPartition,
    profile: &BehavioralProfile,
) -> Result<Vec<f64>, GameError> {
    profile.validate(partition, 1e-9)?;
    Ok(expected_payoff_with(game, partition, &profile.probs))
}

/// Generic expected payoff; `probs[infoset][action]` must already be a
/// valid distribution for every reachable decision node.
pub fn expected_payoff_with<T: Scalar>(game: &GameTree, partition: &InfoSetPartition, probs: &[Vec<T>]) -> Vec<T> {
    let np = game.players.len();
    let mut total = vec![T::zero(); np];
    let mut stack: Vec<(usize, T)> = vec![(game.root, T::from_rational(&Rational::from_integer(1)))];
    while let Some((id, reach)) = stack.pop() {
        if reach.is_zero() {
            continue;
        }
        let node = &game.nodes[id];
        match node.kind {
            NodeKind::Terminal => {
                for p in 0..np {
                    let v = T::from_rational(&node.payoff[p]);
                    total[p] = total[p].clone() + reach.clone() * &v;
                }
            }
            NodeKind::Chance => {
                for (k, &c) in node.children.iter().enumerate() {
                    let pr = T::from_rational(&node.probs[k]);
                    stack.push((c, reach.clone() * &pr));
                }
            }
            NodeKind::Decision => {
                let set = partition.of_node[id] as usize;
                for (k, &c) in node.children.iter().enumerate() {
                    stack.push((c, reach.clone() * &probs[set][k]));
                }
            }
        }
    }
    total
}
