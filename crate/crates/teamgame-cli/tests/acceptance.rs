//! Acceptance report: one PASS/FAIL line per criterion. Failures are
//! reported, not hidden; the process exits 0 either way so the report is
//! always printed in full.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigUint;
use teamgame::game_core::{
    compute_infosets, expected_payoff, validate_perfect_recall, validate_public_turn_taking, BehavioralProfile,
    GameTree, InfoSetPartition,
};
use teamgame::games::{generate, micro, GameSpec};
use teamgame::metrics::{build_mapping, check_payoff_equivalence};
use teamgame::oracle::{full_info_value, independent_value, ne_value_2p0s, tmecor_value, DEFAULT_BUDGET};
use teamgame::solver::{exploitability, CfrPlus, ConvergenceLog};
use teamgame::transform::*;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = Result<Outcome, String>;

fn gen(name: &str) -> Result<GameTree, String> {
    let spec = GameSpec::parse(name).map_err(|e| e.to_string())?;
    generate(&spec).map_err(|e| e.to_string())
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn report(n: usize, title: &str, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(o)) => o,
        Ok(Err(msg)) => Outcome { pass: false, detail: format!("error: {msg}") },
        Err(_) => Outcome { pass: false, detail: "panicked".into() },
    };
    let verdict = if outcome.pass { "PASS" } else { "FAIL" };
    println!("criterion {n} [{title}]: {verdict} ({:.1}s) {}", start.elapsed().as_secs_f64(), outcome.detail);
    outcome.pass
}

/// Published instance sizes: original total, then MPTA and TPICA
/// (total, team, adversary) where reported.
const TABLE: &[(&str, u64, (u64, u64, u64), Option<u64>)] = &[
    ("12K3", 151, (583, 144, 72), Some(5_395)),
    ("12K4", 601, (3_097, 768, 384), Some(1_337_051)),
    ("12K6", 3_001, (23_161, 5_760, 2_880), Some(34_191_721)),
    ("13K6", 23_401, (271_441, 75_240, 22_680), None),
    ("12L33", 13_183, (57_799, 14_664, 6_864), Some(10_777_963)),
    ("12L43", 42_589, (251_749, 64_008, 29_736), None),
    ("12G", 2_509, (92_581, 29_700, 1_464), None),
    ("13G", 15_307, (3_352_669, 1_107_162, 13_128), None),
];

fn table(name: &str) -> (u64, (u64, u64, u64), Option<u64>) {
    let row = TABLE.iter().find(|r| r.0 == name).expect("instance in table");
    (row.1, row.2, row.3)
}

fn criterion_1() -> Check {
    let mut bad = Vec::new();
    for &(name, want, _, _) in TABLE {
        let got = gen(name)?.nodes.len() as u64;
        if got != want {
            bad.push(format!("{name} {got} != {want}"));
        }
    }
    Ok(Outcome { pass: bad.is_empty(), detail: summary(TABLE.len(), &bad) })
}

fn summary(total: usize, bad: &[String]) -> String {
    if bad.is_empty() {
        format!("{total}/{total} match")
    } else {
        format!("{}/{total} match; {}", total - bad.len(), bad.join("; "))
    }
}

fn criterion_2() -> Check {
    let names = ["12K3", "12K4", "12K6", "12L33", "12G"];
    let mut bad = Vec::new();
    for name in names {
        let (_, r) = mpta(&gen(name)?, &TransformConfig::default()).map_err(e)?;
        let got = (r.total, r.coordinator, r.adversary);
        let want = table(name).1;
        if got != want {
            bad.push(format!("{name} {}/{}/{} != {}/{}/{}", got.0, got.1, got.2, want.0, want.1, want.2));
        }
    }
    Ok(Outcome { pass: bad.is_empty(), detail: summary(names.len(), &bad) })
}

fn criterion_3() -> Check {
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    let (_, r) = tpica(&gen("12K3")?, &TransformConfig::tpica()).map_err(e)?;
    if (r.total, r.coordinator, r.adversary) != (5_395, 300, 294) {
        bad.push(format!("12K3 {}/{}/{} != 5395/300/294", r.total, r.coordinator, r.adversary));
    }
    let (_, r) = tpica(&gen("12K4")?, &TransformConfig::tpica()).map_err(e)?;
    if r.total != 1_337_051 {
        bad.push(format!("12K4 {} != 1337051", r.total));
    }
    let need = 64u64 << 30;
    let env = teamgame_cli::environment();
    match env.memory_bytes {
        Some(m) if m >= need => {
            let (_, r) = tpica(&gen("12K6")?, &TransformConfig { node_budget: 40_000_000, ..TransformConfig::tpica() })
                .map_err(e)?;
            if r.total != 34_191_721 {
                bad.push(format!("12K6 {} != 34191721", r.total));
            }
        }
        m => {
            let projected = tpica_count(&gen("12K6")?).map_err(e)?.total;
            notes.push(format!(
                "12K6 build skipped: {} GiB memory found, 64 GiB required (projected count {projected})",
                m.map_or("unknown".to_string(), |b| format!("{:.1}", b as f64 / (1u64 << 30) as f64))
            ));
        }
    }
    let mut detail = if bad.is_empty() { "12K3 and 12K4 match".to_string() } else { bad.join("; ") };
    for n in notes {
        detail.push_str("; ");
        detail.push_str(&n);
    }
    Ok(Outcome { pass: bad.is_empty(), detail })
}

/// Ordered choices of `pick` distinct values out of `free`, enumerated.
fn arrangements(free: usize, pick: usize) -> u128 {
    fn go(used: &mut [bool], left: usize) -> u128 {
        if left == 0 {
            return 1;
        }
        let mut n = 0;
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                n += go(used, left - 1);
                used[i] = false;
            }
        }
        n
    }
    go(&mut vec![false; free], pick)
}

/// Direct summation over team levels: a dummy over the teammate
/// assignments, then a decision with `a` children per assignment.
fn mpta_direct(omega: usize, team: usize, a: u128) -> u128 {
    let r = arrangements(omega - 1, team - 1);
    (1..=team as u32).map(|n| (r * a).pow(n - 1) * r * (1 + a)).sum()
}

/// Direct summation: |A|^|Ω| prescriptions per level, each with its dummy.
fn tpica_direct(omega: usize, team: usize, a: u128) -> u128 {
    let p = a.pow(omega as u32);
    (1..=team as u32).map(|n| 2 * p.pow(n)).sum()
}

fn criterion_4() -> Check {
    let mut bad = Vec::new();
    let mut cases = 0;
    for omega in 1..=6 {
        for team in 1..=4.min(omega) {
            for a in 1..=4usize {
                cases += 1;
                let m = BigUint::from(mpta_direct(omega, team, a as u128));
                let t = BigUint::from(tpica_direct(omega, team, a as u128));
                let gm = mpta_episode_size(omega, team, a).map_err(e)?;
                let gt = tpica_episode_size(omega, team, a).map_err(e)?;
                if gm != m || gt != t {
                    bad.push(format!("(|Ω|={omega}, |T|={team}, |A|={a}) mpta {gm} vs {m}, tpica {gt} vs {t}"));
                }
            }
        }
    }
    // Ratio tpica/mpta, compared by cross-multiplication.
    let mut monotone = true;
    for omega in 3..8 {
        let (t0, m0) = (tpica_episode_size(omega, 2, 2).map_err(e)?, mpta_episode_size(omega, 2, 2).map_err(e)?);
        let (t1, m1) =
            (tpica_episode_size(omega + 1, 2, 2).map_err(e)?, mpta_episode_size(omega + 1, 2, 2).map_err(e)?);
        if t1 * &m0 <= t0 * &m1 {
            monotone = false;
            bad.push(format!("ratio not increasing from |Ω|={omega}"));
        }
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} of {cases} cases agree with direct summation; ratio monotone for |T|=2, |A|=2, |Ω| 3..8: {monotone}{}",
            cases - bad.iter().filter(|b| b.starts_with('(')).count(),
            if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }
        ),
    })
}

fn criterion_5() -> Check {
    let mut games = vec![("12K3".to_string(), gen("12K3")?)];
    games.extend(micro::corpus().into_iter().map(|m| (m.name, m.game)));
    let mut bad = Vec::new();
    let mut checked = 0;
    for (name, g) in &games {
        for rule in [InfosetRule::B, InfosetRule::A] {
            let (g2, _) = mpta(g, &TransformConfig::with_rule(rule)).map_err(e)?;
            let (mapping, _) = build_mapping(g, &g2, rule).map_err(e)?;
            let r = check_payoff_equivalence(g, &g2, &mapping, 1000, 7).map_err(e)?;
            checked += r.checked;
            if !r.ok() {
                bad.push(format!("{name} {rule:?}: {} violations", r.violations.len()));
            }
        }
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} games x 2 rules, {checked} pairs checked, {} violations{}",
            games.len(),
            bad.len(),
            if bad.is_empty() { String::new() } else { format!(": {}", bad.join("; ")) }
        ),
    })
}

fn cfr_value(g2: &GameTree, part: &InfoSetPartition, iterations: u64) -> Result<f64, String> {
    let mut cfr = CfrPlus::new(g2, part).map_err(e)?;
    for _ in 0..iterations {
        cfr.step();
    }
    Ok(expected_payoff(g2, part, &cfr.average()).map_err(e)?[COORDINATOR])
}

fn criterion_6() -> Check {
    let mut lp_bad = Vec::new();
    let mut cfr_bad = Vec::new();
    let mut refused = Vec::new();
    let mut tpica_bad = Vec::new();
    let mut rule_a = Vec::new();
    let mut separated = Vec::new();
    let corpus = micro::corpus();
    for m in &corpus {
        let tmecor = tmecor_value(&m.game, DEFAULT_BUDGET).map_err(e)?;
        let target = tmecor.value_f64();

        let (g2, r) = mpta(&m.game, &TransformConfig::default()).map_err(e)?;
        let part = coordinator_partition(&g2, InfosetRule::B).map_err(e)?;
        let ne = ne_value_2p0s(&g2, &part, 10_000_000).map_err(e)?;
        if (ne.value_f64() / r.payoff_scale - target).abs() > 1e-6 {
            lp_bad.push(format!("{} {} vs {}", m.name, ne.value, tmecor.value));
        }

        // CFR+ needs perfect recall: rule-B is refused, rule-A is solvable.
        if CfrPlus::new(&g2, &part).is_err() {
            refused.push(m.name.clone());
        }
        let (ga, ra) = mpta(&m.game, &TransformConfig::with_rule(InfosetRule::A)).map_err(e)?;
        let pa = coordinator_partition(&ga, InfosetRule::A).map_err(e)?;
        let v = cfr_value(&ga, &pa, 100_000)? / ra.payoff_scale;
        rule_a.push(format!("{}={v:.4}", m.name));
        if (v - target).abs() > 1e-3 {
            cfr_bad.push(format!("{} rule-A CFR+ {v:.4} vs TMECor {target:.4}", m.name));
        }

        let (gt, rt) = tpica(&m.game, &TransformConfig::tpica()).map_err(e)?;
        let pt = coordinator_partition(&gt, InfosetRule::B).map_err(e)?;
        let vt = cfr_value(&gt, &pt, 20_000)? / rt.payoff_scale;
        if (vt - target).abs() > 1e-3 {
            tpica_bad.push(format!("{} {vt:.4}", m.name));
        }

        let full = full_info_value(&m.game, DEFAULT_BUDGET).map_err(e)?.value;
        if full > tmecor.value {
            let ind = independent_value(&m.game, 20, 50_000_000).map_err(e)?;
            if ind.upper < target && (ne.value_f64() / r.payoff_scale - target).abs() <= 1e-6 {
                separated.push(m.name.clone());
            }
        }
    }
    println!("  info: TPICA CFR+ reaches TMECor on {}/{} micro games", corpus.len() - tpica_bad.len(), corpus.len());
    println!("  info: rule-A MPTA CFR+ values after 1e5 iterations: {}", rule_a.join(", "));
    let lp_ok = lp_bad.is_empty();
    let sep_ok = !separated.is_empty();
    if !refused.is_empty() {
        cfr_bad.insert(0, format!("rule-B refused (coordinator lacks perfect recall) on {}", refused.join(", ")));
    }
    let cfr_ok = cfr_bad.is_empty();
    Ok(Outcome {
        pass: lp_ok && sep_ok && cfr_ok,
        detail: format!(
            "LP value gate {} ({}); separation witness {}; CFR+ within 1e-3 {}{}",
            if lp_ok { "PASS" } else { "FAIL" },
            if lp_ok { format!("{} games", corpus.len()) } else { lp_bad.join("; ") },
            if sep_ok { format!("PASS ({})", separated.join(", ")) } else { "FAIL".into() },
            if cfr_ok { "PASS" } else { "FAIL" },
            if cfr_ok { String::new() } else { format!(": {}", cfr_bad.join("; ")) }
        ),
    })
}

fn criterion_7() -> Check {
    let g = gen("12K3")?;
    let (g2, r) = mpta(&g, &TransformConfig::with_rule(InfosetRule::A)).map_err(e)?;
    let part = coordinator_partition(&g2, InfosetRule::A).map_err(e)?;
    let initial = exploitability(&g2, &part, &BehavioralProfile::uniform(&part)).map_err(e)?;
    let mut log = ConvergenceLog::new(10, r.payoff_scale);
    log.record(0, initial);
    let mut cfr = CfrPlus::new(&g2, &part).map_err(e)?;
    let mut reached = None;
    while cfr.iteration() < 100_000 {
        cfr.step();
        if log.due(cfr.iteration()) {
            let x = cfr.exploitability();
            log.record(cfr.iteration(), x);
            if x < initial / 100.0 {
                reached = Some((cfr.iteration(), x));
                break;
            }
        }
    }
    let mut csv = Vec::new();
    log.write_csv(&mut csv).map_err(e)?;
    let csv = String::from_utf8(csv).map_err(e)?;
    let header_ok = csv.lines().next() == Some("iteration,elapsed_ms,exploitability,payoff_scale");
    let rows_ok = log.rows.windows(2).all(|w| w[0].iteration < w[1].iteration && w[0].elapsed_ms < w[1].elapsed_ms);
    let detail = match reached {
        Some((it, x)) => format!("rule-A: {initial:.6} -> {x:.3e} at iteration {it}"),
        None => format!("rule-A: {initial:.6} not reduced below 1% within 1e5 iterations"),
    };
    Ok(Outcome {
        pass: reached.is_some() && header_ok && rows_ok,
        detail: format!("{detail}; {} CSV rows, schema ok: {}", log.rows.len(), header_ok && rows_ok),
    })
}

fn criterion_8() -> Check {
    let mut bad = Vec::new();
    let mut lines = Vec::new();
    for name in ["12K3", "12K4", "12K6", "12L33"] {
        let g = gen(name)?;
        let (_, table_mpta, table_tpica) = table(name);
        let table_tpica = table_tpica.expect("published TPICA size");
        let ours_mpta = mpta(&g, &TransformConfig::default()).map_err(e)?.1.total;
        // Counting agrees with the built tree (see criterion 3); 12K6 and
        // 12L33 are too large to build here.
        let ours_tpica = tpica_count(&g).map_err(e)?.total;
        let (a, b) = (ours_tpica as u128, ours_mpta as u128);
        let (c, d) = (table_tpica as u128, table_mpta.0 as u128);
        lines.push(format!("{name} {a}/{b}={:.2} vs {c}/{d}={:.2}", a as f64 / b as f64, c as f64 / d as f64));
        if a * d != c * b {
            bad.push(name);
        }
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{}; exact ratio mismatch on {}",
            lines.join(", "),
            if bad.is_empty() { "none".into() } else { bad.join(", ") }
        ),
    })
}

/// Returns failure messages for one game under `part`.
fn gates(label: &str, g: &GameTree, part: &InfoSetPartition, players: &[usize], out: &mut Vec<String>) {
    if !validate_public_turn_taking(g).ok {
        out.push(format!("{label}: public turn-taking"));
    }
    for &p in players {
        if !validate_perfect_recall(g, part, p).ok {
            out.push(format!("{label}: perfect recall of player {p}"));
        }
    }
}

fn criterion_9() -> Check {
    let mut bad = Vec::new();
    let mut games: Vec<(String, GameTree)> = Vec::new();
    for &(name, ..) in TABLE {
        games.push((name.to_string(), gen(name)?));
    }
    games.extend(micro::corpus().into_iter().map(|m| (m.name, m.game)));
    let mut transformed = 0;
    for (name, g) in &games {
        let part = compute_infosets(g).map_err(e)?;
        gates(name, g, &part, &g.strategic_players(), &mut bad);

        let mut outputs = Vec::new();
        // Transform outputs above a few million nodes are left to the
        // module tests.
        if !matches!(name.as_str(), "13K6" | "12L43" | "13G") {
            for rule in [InfosetRule::B, InfosetRule::A] {
                let (g2, r) = mpta(g, &TransformConfig::with_rule(rule)).map_err(e)?;
                outputs.push((format!("{name} mpta {rule:?}"), g2, r, rule));
            }
        }
        if tpica_count(g).map_err(e)?.total < 200_000 {
            let (g2, r) = tpica(g, &TransformConfig::tpica()).map_err(e)?;
            outputs.push((format!("{name} tpica"), g2, r, InfosetRule::B));
        }
        for (label, g2, r, rule) in outputs {
            transformed += 1;
            if !r.accounting_ok() || r.total as usize != g2.nodes.len() {
                bad.push(format!("{label}: node accounting"));
            }
            if !check_uniform_replication(&g2).ok {
                bad.push(format!("{label}: uniform replication"));
            }
            let part2 = coordinator_partition(&g2, rule).map_err(e)?;
            gates(&label, &g2, &part2, &[OPPONENT, COORDINATOR], &mut bad);
        }
    }
    let shown: Vec<&String> = bad.iter().take(8).collect();
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} generated and {transformed} transformed games, {} gate failures{}",
            games.len(),
            bad.len(),
            if bad.is_empty() {
                String::new()
            } else {
                format!(
                    ": {}{}",
                    shown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("; "),
                    if bad.len() > 8 { "; ..." } else { "" }
                )
            }
        ),
    })
}

fn main() {
    // `cargo test` passes harness flags; only a name filter would matter
    // and this target has no individual tests to filter.
    let results = [
        report(1, "generator fixtures", criterion_1),
        report(2, "MPTA fixtures", criterion_2),
        report(3, "TPICA fixtures", criterion_3),
        report(4, "size formulas", criterion_4),
        report(5, "payoff equivalence", criterion_5),
        report(6, "TMECor gate", criterion_6),
        report(7, "convergence", criterion_7),
        report(8, "size ratios", criterion_8),
        report(9, "structural gates", criterion_9),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria PASS", results.len());
}
