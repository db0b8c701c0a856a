use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use teamgame::game_core::{
    compute_infosets, expected_payoff, load, save, validate_perfect_recall, validate_public_turn_taking,
};
use teamgame::games::{generate, micro, GameSpec};
use teamgame::metrics::{check_payoff_equivalence, PlanMapping};
use teamgame::oracle::{ne_value_2p0s, tmecor_value, DEFAULT_BUDGET};
use teamgame::solver::{cfr_plus, exploitability, ConvergenceLog};
use teamgame::transform::{
    check_uniform_replication, coordinator_partition, mpta, tpica, DummyOwner, InfosetRule, Method, TransformConfig,
};
use teamgame_cli::{
    compare_methods, read_json, run_experiment, write_json, CliError, ExperimentSpec, RunRecord, SavedProfile,
};

#[derive(Parser)]
#[command(name = "teamgame", version, about = "Adversarial team games: generate, transform, solve, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mpta,
    Tpica,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    RuleA,
    RuleB,
}

#[derive(Clone, Copy, ValueEnum)]
enum DummyArg {
    ChanceUniform,
    CoordinatorOwned,
}

impl From<RuleArg> for InfosetRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::RuleA => InfosetRule::A,
            RuleArg::RuleB => InfosetRule::B,
        }
    }
}

#[derive(clap::Args)]
struct TransformArgs {
    #[arg(long, value_enum, default_value = "mpta")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "rule-b")]
    rule: RuleArg,
    #[arg(long, value_enum, default_value = "chance-uniform")]
    dummy: DummyArg,
    /// Refuse outputs projected above this many nodes.
    #[arg(long, default_value_t = 50_000_000)]
    budget: u128,
}

impl TransformArgs {
    fn config(&self) -> TransformConfig {
        TransformConfig {
            method: match self.method {
                MethodArg::Mpta => Method::Mpta,
                MethodArg::Tpica => Method::Tpica,
            },
            rule: self.rule.into(),
            dummy: match self.dummy {
                DummyArg::ChanceUniform => DummyOwner::ChanceUniform,
                DummyArg::CoordinatorOwned => DummyOwner::CoordinatorOwned,
            },
            node_budget: self.budget,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build an instance such as 12K3, 12L33 or 12G, or a micro game
    /// (signaling, correlation, opponent-first, opponent-last, dynamic).
    Generate {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn a team game into a two-player zero-sum game.
    Transform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write the coordinator/team plan mapping (MPTA only).
        #[arg(long)]
        mapping: Option<PathBuf>,
        #[command(flatten)]
        args: TransformArgs,
    },
    /// Node counts, infosets and structural validation.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "rule-b")]
        rule: RuleArg,
    },
    /// CFR+ on a transformed game.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1000)]
        iters: u64,
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        cadence: u64,
        #[arg(long, value_enum, default_value = "rule-b")]
        rule: RuleArg,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Accepted for compatibility; CFR+ here never samples.
        #[arg(long)]
        seedless: bool,
    },
    /// Exploitability of a saved profile.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        profile: PathBuf,
    },
    /// Exact payoff equivalence between a game and its MPTA transform.
    Verify {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        transformed: PathBuf,
        #[arg(long)]
        mapping: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force values by plan enumeration and exact LP.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
    /// Run the whole pipeline on one instance.
    Run {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 1000)]
        iters: u64,
        #[arg(long)]
        wall_clock_ms: Option<u64>,
        #[arg(long, default_value_t = 10)]
        cadence: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        size_only: bool,
        #[command(flatten)]
        args: TransformArgs,
    },
    /// Compare run records of one game.
    Compare {
        #[arg(long, num_args = 2.., required = true)]
        records: Vec<PathBuf>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// TMECor value of a team game.
    Tmecor {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Value of a two-player zero-sum game.
    Nevalue {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "rule-b")]
        rule: RuleArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
}

fn emit(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<(), CliError> {
    match out {
        Some(p) => write_json(p, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

/// Ok(true) on success, Ok(false) when an acceptance-relevant check failed.
fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Generate { spec, out } => {
            let g = match micro::corpus().into_iter().find(|m| m.name == spec) {
                Some(m) => m.game,
                None => generate(&GameSpec::parse(&spec)?)?,
            };
            save(&g, &out)?;
            println!("{spec}: {} nodes", g.len());
            Ok(true)
        }
        Command::Transform { input, out, report, mapping, args } => {
            let g = load(&input)?;
            let config = args.config();
            let (g2, rep) = match config.method {
                Method::Mpta => mpta(&g, &config)?,
                Method::Tpica => tpica(&g, &config)?,
            };
            save(&g2, &out)?;
            if let Some(p) = mapping {
                let (m, _) = teamgame::metrics::build_mapping(&g, &g2, config.rule)?;
                write_json(&p, &m)?;
            }
            emit(&report, &serde_json::to_value(&rep)?)?;
            Ok(rep.accounting_ok())
        }
        Command::Stats { input, rule } => {
            let g = load(&input)?;
            let transformed = g.players.iter().any(|p| p.role == teamgame::game_core::Role::Coordinator);
            let part = if transformed { coordinator_partition(&g, rule.into())? } else { compute_infosets(&g)? };
            let tt = validate_public_turn_taking(&g);
            let recall: Vec<_> = g
                .strategic_players()
                .into_iter()
                .map(|p| json!({"player": g.players[p].name, "perfect_recall": validate_perfect_recall(&g, &part, p).ok}))
                .collect();
            let c = g.counts();
            let mut v = json!({
                "nodes": c.total, "chance": c.chance, "dummy": c.dummy, "decision": c.decision,
                "terminal": c.terminal, "by_player": c.by_player, "infosets": part.len(),
                "public_turn_taking": tt.ok, "recall": recall,
            });
            if transformed {
                v["uniform_replication"] = json!(check_uniform_replication(&g).ok);
            }
            println!("{}", serde_json::to_string_pretty(&v)?);
            Ok(tt.ok)
        }
        Command::Solve { input, iters, log, profile, cadence, rule, scale, seedless: _ } => {
            let g = load(&input)?;
            let part = coordinator_partition(&g, rule.into())?;
            let mut clog = ConvergenceLog::new(cadence, scale);
            let avg = cfr_plus(&g, &part, iters, &mut clog)?;
            if let Some(p) = &log {
                clog.save_csv(p)?;
            }
            if let Some(p) = &profile {
                write_json(p, &SavedProfile::new(rule.into(), scale, &avg))?;
            }
            let value = expected_payoff(&g, &part, &avg)?;
            let last = clog.rows.last().map(|r| r.exploitability);
            println!("{}", json!({"iterations": iters, "exploitability": last, "payoffs": value}));
            Ok(true)
        }
        Command::Eval { input, profile } => {
            let g = load(&input)?;
            let saved: SavedProfile = read_json(&profile)?;
            let part = coordinator_partition(&g, saved.rule)?;
            let e = exploitability(&g, &part, &saved.profile())?;
            println!("{}", json!({"exploitability": e, "payoff_scale": saved.payoff_scale}));
            Ok(true)
        }
        Command::Verify { original, transformed, mapping, trials, seed, out } => {
            let g = load(&original)?;
            let g2 = load(&transformed)?;
            let m: PlanMapping = read_json(&mapping)?;
            let r = check_payoff_equivalence(&g, &g2, &m, trials, seed)?;
            emit(&out, &serde_json::to_value(&r)?)?;
            Ok(r.ok())
        }
        Command::Oracle { which } => match which {
            OracleCommand::Tmecor { input, out, budget } => {
                let g = load(&input)?;
                let v = tmecor_value(&g, budget)?;
                emit(&out, &serde_json::to_value(v.report())?)?;
                Ok(v.certificate.ok())
            }
            OracleCommand::Nevalue { input, rule, out, budget } => {
                let g = load(&input)?;
                let part = coordinator_partition(&g, rule.into())?;
                let v = ne_value_2p0s(&g, &part, budget)?;
                emit(&out, &serde_json::to_value(v.report())?)?;
                Ok(v.certificate.ok())
            }
        },
        Command::Run { spec, iters, wall_clock_ms, cadence, out, seed, size_only, args } => {
            let spec = ExperimentSpec {
                game: spec,
                config: args.config(),
                iterations: Some(iters),
                wall_clock_ms,
                cadence,
                out_dir: out,
                seed,
                size_only,
            };
            let r = run_experiment(&spec)?;
            println!(
                "{}",
                json!({"report": r.report, "final_value": r.final_value, "final_exploitability": r.final_exploitability, "log_rows": r.log.len()})
            );
            Ok(r.report.accounting_ok())
        }
        Command::Compare { records, threshold, out } => {
            let recs: Vec<RunRecord> = records.iter().map(|p| read_json(p)).collect::<Result<_, _>>()?;
            let c = compare_methods(&recs, threshold)?;
            emit(&out, &serde_json::to_value(&c)?)?;
            Ok(c.flags.is_empty())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
