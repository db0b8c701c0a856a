use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use teamgame::game_core::BehavioralProfile;
use teamgame::transform::InfosetRule;

/// A behavioral profile on disk: infoset id to probability vector, with
/// the infoset rule needed to rebuild the partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SavedProfile {
    pub rule: InfosetRule,
    pub payoff_scale: f64,
    pub infosets: BTreeMap<usize, Vec<f64>>,
}

impl SavedProfile {
    pub fn new(rule: InfosetRule, payoff_scale: f64, profile: &BehavioralProfile) -> Self {
        SavedProfile { rule, payoff_scale, infosets: profile.probs.iter().cloned().enumerate().collect() }
    }

    pub fn profile(&self) -> BehavioralProfile {
        BehavioralProfile { probs: self.infosets.values().cloned().collect() }
    }
}
