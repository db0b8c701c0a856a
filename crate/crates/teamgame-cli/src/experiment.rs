use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use teamgame::game_core::{expected_payoff, save, GameTree};
use teamgame::games::{generate, GameSpec};
use teamgame::metrics::build_mapping;
use teamgame::solver::{CfrPlus, ConvergenceLog, LogRow};
use teamgame::transform::{
    coordinator_partition, mpta, tpica, tpica_count, DummyOwner, InfosetRule, Method, TransformConfig, TransformReport,
    COORDINATOR,
};

use crate::{write_json, CliError, SavedProfile};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Instance name such as `12K3`.
    pub game: String,
    pub config: TransformConfig,
    pub iterations: Option<u64>,
    pub wall_clock_ms: Option<u64>,
    /// Exploitability is logged every `cadence` iterations.
    pub cadence: u64,
    pub out_dir: Option<PathBuf>,
    /// Recorded for reproducibility; the pipeline itself is deterministic.
    pub seed: u64,
    /// Report projected sizes without building or solving.
    pub size_only: bool,
}

impl ExperimentSpec {
    pub fn new(game: &str, config: TransformConfig, iterations: u64) -> Self {
        ExperimentSpec {
            game: game.to_string(),
            config,
            iterations: Some(iterations),
            wall_clock_ms: None,
            cadence: 10,
            out_dir: None,
            seed: 0,
            size_only: false,
        }
    }

    pub fn validate(&self) -> Result<GameSpec, CliError> {
        if self.iterations.is_none() && self.wall_clock_ms.is_none() && !self.size_only {
            return Err(CliError::Argument("set an iteration or wall-clock budget".into()));
        }
        Ok(GameSpec::parse(&self.game)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub cores: usize,
    pub memory_bytes: Option<u64>,
}

pub fn environment() -> Environment {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let memory_bytes = std::fs::read_to_string("/proc/meminfo").ok().and_then(|s| {
        s.lines()
            .find(|l| l.starts_with("MemTotal:"))
            .and_then(|l| l.split_whitespace().nth(1))
            .and_then(|kb| kb.parse::<u64>().ok())
            .map(|kb| kb * 1024)
    });
    Environment { cores, memory_bytes }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub spec: ExperimentSpec,
    pub report: TransformReport,
    pub log: Vec<LogRow>,
    /// Coordinator value of the average profile, divided by the scale.
    pub final_value: Option<f64>,
    pub final_exploitability: Option<f64>,
    pub environment: Environment,
}

fn transform(game: &GameTree, config: &TransformConfig) -> Result<(GameTree, TransformReport), CliError> {
    Ok(match config.method {
        Method::Mpta => mpta(game, config)?,
        Method::Tpica => tpica(game, config)?,
    })
}

/// Projected transformed size, rejected early when above the budget.
fn size_check(spec: &GameSpec, game: &GameTree, config: &TransformConfig) -> Result<Option<TransformReport>, CliError> {
    let actions = game.nodes.iter().map(|n| n.children.len()).max().unwrap_or(1);
    let inputs = format!("|Ω|={}, |T|={}, max |A|={}", game.omega.len(), spec.team, actions);
    match config.method {
        Method::Tpica => {
            let r = tpica_count(game)?;
            if r.total as u128 > config.node_budget {
                return Err(CliError::Size(format!(
                    "{inputs}: projected {} nodes exceeds the budget of {}",
                    r.total, config.node_budget
                )));
            }
            Ok(Some(r))
        }
        Method::Mpta => Ok(None),
    }
}

/// Runs generate, transform and (optionally) CFR+, writing artifacts to
/// `out_dir` when set.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunRecord, CliError> {
    let gspec = spec.validate()?;
    let game = generate(&gspec)?;
    let projected = size_check(&gspec, &game, &spec.config)?;
    let env = environment();
    if let Some(dir) = &spec.out_dir {
        std::fs::create_dir_all(dir)?;
        save(&game, dir.join("game.tg"))?;
    }
    if spec.size_only && spec.config.method == Method::Tpica {
        let report = projected.expect("tpica projection");
        return Ok(RunRecord {
            spec: spec.clone(),
            report,
            log: Vec::new(),
            final_value: None,
            final_exploitability: None,
            environment: env,
        });
    }
    let (g2, report) = transform(&game, &spec.config)?;
    if let Some(dir) = &spec.out_dir {
        save(&g2, dir.join("game2p.tg"))?;
        write_json(&dir.join("report.json"), &report)?;
        if spec.config.method == Method::Mpta && spec.config.dummy == DummyOwner::ChanceUniform {
            let (mapping, _) = build_mapping(&game, &g2, spec.config.rule)?;
            write_json(&dir.join("mapping.json"), &mapping)?;
        }
    }
    let iterations = spec.iterations.unwrap_or(u64::MAX);
    if spec.size_only || iterations == 0 {
        return Ok(RunRecord {
            spec: spec.clone(),
            report,
            log: Vec::new(),
            final_value: None,
            final_exploitability: None,
            environment: env,
        });
    }
    let rule = match spec.config.method {
        Method::Mpta => spec.config.rule,
        Method::Tpica => InfosetRule::B,
    };
    let part = coordinator_partition(&g2, rule)?;
    let mut cfr = CfrPlus::new(&g2, &part).map_err(|e| match (spec.config.method, rule) {
        (Method::Mpta, InfosetRule::B) => {
            CliError::Argument(format!("{e}; rule-b coordinator infosets cannot be solved by CFR+, use rule-a"))
        }
        _ => e.into(),
    })?;
    let mut log = ConvergenceLog::new(spec.cadence, report.payoff_scale);
    let start = Instant::now();
    log.restart_clock();
    log.record(0, cfr.exploitability());
    while cfr.iteration() < iterations {
        if spec.wall_clock_ms.is_some_and(|ms| start.elapsed().as_millis() as u64 >= ms) {
            break;
        }
        cfr.step();
        if log.due(cfr.iteration()) {
            log.record(cfr.iteration(), cfr.exploitability());
        }
    }
    let final_exploitability = cfr.exploitability();
    log.record(cfr.iteration(), final_exploitability);
    let avg = cfr.average();
    let value = expected_payoff(&g2, &part, &avg)?[COORDINATOR] / report.payoff_scale;
    if let Some(dir) = &spec.out_dir {
        log.save_csv(&dir.join("log.csv"))?;
        write_json(&dir.join("profile.json"), &SavedProfile::new(rule, report.payoff_scale, &avg))?;
    }
    let record = RunRecord {
        spec: spec.clone(),
        report,
        log: log.rows,
        final_value: Some(value),
        final_exploitability: Some(final_exploitability),
        environment: env,
    };
    if let Some(dir) = &spec.out_dir {
        write_json(&dir.join("record.json"), &record)?;
    }
    Ok(record)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub method: Method,
    pub rule: Option<InfosetRule>,
    pub total: u64,
    /// Total nodes relative to the reference record.
    pub node_ratio: f64,
    pub time_to_threshold_ms: Option<f64>,
    pub time_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub game: String,
    /// Index of the record ratios are taken against (the first MPTA run,
    /// else the first record).
    pub reference: usize,
    pub threshold: Option<f64>,
    pub rows: Vec<ComparisonRow>,
    /// Instances where MPTA is not strictly smaller than TPICA.
    pub flags: Vec<String>,
}

fn time_to(record: &RunRecord, threshold: f64) -> Option<f64> {
    record.log.iter().find(|r| r.exploitability / r.payoff_scale <= threshold).map(|r| r.elapsed_ms)
}

/// Node-count and time-to-threshold ratios over runs of one game.
pub fn compare_methods(records: &[RunRecord], threshold: Option<f64>) -> Result<Comparison, CliError> {
    if records.len() < 2 {
        return Err(CliError::Argument("compare needs at least two run records".into()));
    }
    let game = records[0].spec.game.clone();
    if let Some(r) = records.iter().find(|r| r.spec.game != game) {
        return Err(CliError::Argument(format!("mismatched games: {} and {}", game, r.spec.game)));
    }
    let reference = records.iter().position(|r| r.report.method == Method::Mpta).unwrap_or(0);
    let base = &records[reference];
    let base_time = threshold.and_then(|t| time_to(base, t));
    let rows = records
        .iter()
        .map(|r| {
            let t = threshold.and_then(|th| time_to(r, th));
            ComparisonRow {
                method: r.report.method,
                rule: r.report.rule,
                total: r.report.total,
                node_ratio: r.report.total as f64 / base.report.total as f64,
                time_to_threshold_ms: t,
                time_ratio: t.zip(base_time).map(|(a, b)| a / b),
            }
        })
        .collect();
    let mut flags = Vec::new();
    for m in records.iter().filter(|r| r.report.method == Method::Mpta) {
        for t in records.iter().filter(|r| r.report.method == Method::Tpica) {
            if m.report.total >= t.report.total {
                flags.push(format!("{game}: MPTA {} nodes is not below TPICA {}", m.report.total, t.report.total));
            }
        }
    }
    Ok(Comparison { game, reference, threshold, rows, flags })
}
