//! Adversarial team games: generators, the MPTA and TPICA transforms,
//! CFR+ solving, strategy mapping and a brute-force TMECor oracle.

pub mod game_core;
pub mod games;
pub mod metrics;
pub mod oracle;
pub mod solver;
pub mod transform;
