//! Experiment pipeline behind the `teamgame` binary: generate, transform,
//! solve, evaluate and compare.

pub mod experiment;
pub mod profile;

pub use experiment::{
    compare_methods, environment, run_experiment, Comparison, ComparisonRow, Environment, ExperimentSpec, RunRecord,
};
pub use profile::SavedProfile;

use thiserror::Error;

use teamgame::game_core::GameError;
use teamgame::games::GenError;
use teamgame::metrics::MetricsError;
use teamgame::oracle::OracleError;
use teamgame::solver::SolverError;
use teamgame::transform::TransformError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Argument(String),
    #[error("size estimate rejected: {0}")]
    Size(String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Writes pretty JSON to `path`.
pub fn write_json<T: serde::Serialize>(path: &std::path::Path, value: &T) -> Result<(), CliError> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, CliError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
