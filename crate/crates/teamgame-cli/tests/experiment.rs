use teamgame::transform::{InfosetRule, Method, TransformConfig};
use teamgame_cli::{compare_methods, run_experiment, CliError, ExperimentSpec};

#[test]
fn kuhn_mpta_run_converges() {
    let spec = ExperimentSpec::new("12K3", TransformConfig::with_rule(InfosetRule::A), 20_000);
    let r = run_experiment(&spec).unwrap();
    assert_eq!((r.report.total, r.report.coordinator, r.report.adversary), (811, 216, 78));
    assert_eq!(r.log.first().unwrap().iteration, 0);
    assert_eq!(r.log.last().unwrap().iteration, 20_000);
    let first = r.log[0].exploitability;
    let last = r.log.last().unwrap().exploitability;
    assert!(last < first / 100.0, "{first} -> {last}");
    // Downward trend: every tenth of the log is below the previous one at its end.
    let chunk = r.log.len() / 10;
    for w in r.log.chunks(chunk).collect::<Vec<_>>().windows(2) {
        assert!(w[1].last().unwrap().exploitability <= w[0].last().unwrap().exploitability);
    }
    assert!(r.log.windows(2).all(|w| w[0].iteration < w[1].iteration && w[0].elapsed_ms < w[1].elapsed_ms));
}

#[test]
fn kuhn_tpica_report() {
    let r = run_experiment(&ExperimentSpec::new("12K3", TransformConfig::tpica(), 0)).unwrap();
    assert_eq!((r.report.total, r.report.coordinator, r.report.adversary), (5_395, 300, 294));
    assert_eq!(r.report.method, Method::Tpica);
}

#[test]
fn zero_iterations_gives_report_only() {
    let r = run_experiment(&ExperimentSpec::new("12K3", TransformConfig::default(), 0)).unwrap();
    assert!(r.log.is_empty());
    assert!(r.final_value.is_none());
    assert_eq!(r.report.total, 811);
}

#[test]
fn size_only_tpica_uses_the_projection() {
    let mut spec =
        ExperimentSpec::new("12K6", TransformConfig { node_budget: u128::MAX, ..TransformConfig::tpica() }, 0);
    spec.size_only = true;
    let r = run_experiment(&spec).unwrap();
    assert_eq!(r.report.total, 34_191_721);
    spec.config.node_budget = 1_000_000;
    assert!(matches!(run_experiment(&spec), Err(CliError::Size(_))));
}

#[test]
fn artifacts_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::new("12K3", TransformConfig::with_rule(InfosetRule::A), 50);
    spec.out_dir = Some(dir.path().to_path_buf());
    spec.cadence = 10;
    let r = run_experiment(&spec).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("log.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + r.log.len());
    let back: teamgame_cli::RunRecord =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("record.json")).unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn comparison_of_a_run_with_itself() {
    let r = run_experiment(&ExperimentSpec::new("12K3", TransformConfig::with_rule(InfosetRule::A), 100)).unwrap();
    let c = compare_methods(&[r.clone(), r.clone()], Some(1.0)).unwrap();
    assert!(c.rows.iter().all(|x| x.node_ratio == 1.0 && x.time_ratio == Some(1.0)));
    assert!(c.flags.is_empty());
    assert!(compare_methods(&[r], None).is_err());
}

#[test]
fn budget_and_spec_errors() {
    let mut spec = ExperimentSpec::new("12K3", TransformConfig::default(), 10);
    spec.iterations = None;
    assert!(matches!(run_experiment(&spec), Err(CliError::Argument(_))));
    assert!(run_experiment(&ExperimentSpec::new("nope", TransformConfig::default(), 0)).is_err());
}
