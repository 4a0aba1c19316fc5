//! Release gate: one PASS/FAIL line per criterion. Runs without the libtest
//! harness so the lines are always shown.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use drsmatch_core::synth::{random_form, random_pair, SynthParams};
use drsmatch_core::testing::naive_max_matched;
use drsmatch_core::{
    match_forms, optimal_match, parse_corpus, parse_document, remove_redundant_refs, serialize_form, ClausalForm,
    MatchConfig, OracleLimits, VariableId,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

struct Run {
    code: i32,
    stdout: String,
    elapsed: Duration,
}

fn drsmatch(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_drsmatch"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 output"),
        elapsed: start.elapsed(),
    }
}

fn json(run: &Run) -> Value {
    serde_json::from_str(&run.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", run.stdout))
}

fn near(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fig3() -> Outcome {
    let (sys, gold) = (fixture("fig3_sys.clf"), fixture("fig3_gold.clf"));
    let with = drsmatch(&["score", &sys, &gold, "--keep-refs", "--json"]);
    let without = drsmatch(&["score", &sys, &gold, "--json"]);
    let (a, b) = (json(&with), json(&without));
    let f_with = a["result"]["micro"]["f1"].as_f64().unwrap() * 100.0;
    let f_without = b["result"]["micro"]["f1"].as_f64().unwrap() * 100.0;
    let mapping = &a["result"]["per_doc"][0][1]["best_mapping"];
    let mapped = mapping["k0"] == "b0" && mapping["e1"] == "v1";
    let slowest = with.elapsed.max(without.elapsed);
    check(
        with.code == 0
            && without.code == 0
            && near(f_with, 54.5, 0.1)
            && near(f_without, 40.0, 0.1)
            && mapped
            && slowest < Duration::from_secs(1),
        format!(
            "F1 {f_with:.2} with REFs, {f_without:.2} without; k0->b0 and e1->v1: {mapped}; {:.0} ms",
            slowest.as_secs_f64() * 1e3
        ),
    )
}

fn fig6() -> Outcome {
    let run = drsmatch(&["score", &fixture("fig6_en.clf"), &fixture("fig6_nl.clf"), "--json"]);
    let f = json(&run)["result"]["micro"]["f1"].as_f64().unwrap() * 100.0;
    check(
        run.code == 0 && near(f, 77.8, 0.1) && run.elapsed < Duration::from_secs(1),
        format!("F1 {f:.2}; {:.0} ms", run.elapsed.as_secs_f64() * 1e3),
    )
}

fn fig4() -> Outcome {
    let run = drsmatch(&["amr2drs", &fixture("fig4.penman")]);
    let docs = parse_corpus(&run.stdout).map_err(|e| e.to_string())?;
    let produced = &docs[0].form;
    let listing = parse_document(&std::fs::read_to_string(fixture("fig4.clf")).unwrap()).unwrap();
    let r = match_forms(produced, &listing, &MatchConfig::default().with_keep_refs(true));
    check(
        run.code == 0 && docs.len() == 1 && produced.len() == 15 && r.is_perfect(),
        format!("{} clauses, F1 {:.1}", produced.len(), r.f1 * 100.0),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let params = SynthParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let config = MatchConfig::default().with_restarts(100).with_keep_refs(true);
    let n = 200;
    let (mut identical, mut exceeded, mut oracle_wrong, mut too_big) = (0, 0, 0, 0);
    for _ in 0..n {
        let (a, b) = random_pair(&mut rng, &params);
        too_big += usize::from(a.kinds().len() > 6 || b.kinds().len() > 6 || a.len() > 12 || b.len() > 12);
        let naive = naive_max_matched(&a, &b);
        let exact = optimal_match(&a, &b, &OracleLimits::default()).map_err(|e| e.to_string())?.matched;
        let approx = match_forms(&a, &b, &config).matched;
        identical += usize::from(naive == exact && exact == approx);
        exceeded += usize::from(approx > exact);
        oracle_wrong += usize::from(naive != exact);
    }
    let elapsed = start.elapsed();
    check(
        identical * 100 >= 99 * n
            && exceeded == 0
            && oracle_wrong == 0
            && too_big == 0
            && elapsed < Duration::from_secs(120),
        format!(
            "{identical}/{n} identical, matcher above oracle {exceeded}, oracle vs brute force mismatches {oracle_wrong}; {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn renamed(form: &ClausalForm, rng: &mut ChaCha8Rng) -> ClausalForm {
    let mut fresh: Vec<usize> = (0..form.kinds().len()).collect();
    fresh.shuffle(rng);
    let table: std::collections::HashMap<&VariableId, VariableId> = form
        .kinds()
        .keys()
        .zip(fresh)
        .map(|(v, i)| (v, VariableId::new(format!("r{i}")).unwrap()))
        .collect();
    ClausalForm::new(form.clauses().iter().map(|c| c.map_variables(|v| table[v].clone())))
}

fn property_suite() -> Outcome {
    let start = Instant::now();
    let params = SynthParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let config = MatchConfig::default();
    let mut failures: Vec<String> = Vec::new();
    for i in 0..1000 {
        let a = random_form(&mut rng, &params);
        let (_, b) = random_pair(&mut rng, &params);
        let base = match_forms(&a, &b, &config);
        let mut fail = |name: &str| failures.push(format!("{name} #{i}"));
        if match_forms(&renamed(&a, &mut rng), &b, &config).matched != base.matched {
            fail("alpha-invariance");
        }
        let back = match_forms(&b, &a, &config);
        if back.f1 != base.f1 || back.precision != base.recall {
            fail("symmetry");
        }
        let fewer = match_forms(&a, &b, &config.clone().with_restarts(3));
        if fewer.matched > base.matched {
            fail("restart monotonicity");
        }
        let once = remove_redundant_refs(&a);
        if remove_redundant_refs(&once) != once {
            fail("REF idempotence");
        }
        let again = parse_document(&serialize_form(&a)).map_err(|e| e.to_string())?;
        if again.clauses() != a.clauses() {
            fail("round trip");
        }
        match optimal_match(&a, &a, &OracleLimits::default()) {
            Ok(r) if r.f1 == 1.0 => {}
            _ => fail("oracle self-match"),
        }
    }
    let elapsed = start.elapsed();
    check(
        failures.is_empty() && elapsed < Duration::from_secs(120),
        format!(
            "1000 forms, {} failures{}; {:.1} s",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default(),
            elapsed.as_secs_f64()
        ),
    )
}

fn table1_conditional() -> Option<Outcome> {
    let path = std::env::var("PMB_GOLD_EN").ok()?;
    let run = drsmatch(&["stats", &path, "--json"]);
    let counts = &json(&run)["result"]["counts"];
    let expected = [
        ("REF", 7592),
        ("NOT", 204),
        ("POS", 55),
        ("NEC", 14),
        ("IMP", 104),
        ("PRP", 50),
        ("REL", 71),
        ("DRS", 84),
        ("Compare", 2100),
        ("Concept", 7545),
        ("Role", 7516),
    ];
    let wrong: Vec<String> = expected
        .iter()
        .filter(|(k, v)| counts[*k].as_u64() != Some(*v))
        .map(|(k, v)| format!("{k}={} (expected {v})", counts[*k]))
        .collect();
    Some(check(wrong.is_empty(), format!("mismatches: {wrong:?}")))
}

fn sweep_shape(dir: &Path) -> Outcome {
    let sys = dir.join("sys.clf").to_string_lossy().into_owned();
    let gold = dir.join("gold.clf").to_string_lossy().into_owned();
    let gen = drsmatch(&[
        "synth", "--large", "--pairs", "60", "--seed", "7", "--system-out", &sys, "--gold-out", &gold,
    ]);
    if gen.code != 0 {
        return Err("synth failed".into());
    }
    let run = drsmatch(&["sweep", &sys, &gold, "--restart-list", "1,2,5,10,20", "--oracle", "--json"]);
    let report = json(&run);
    let rows: Vec<f64> = report["result"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["f1"].as_f64().unwrap())
        .collect();
    let optimal = report["result"]["optimal"]["f1"].as_f64().unwrap();
    let exceeded = report["result"]["optimal"]["budget_exceeded"].as_u64().unwrap();
    let monotone = rows.windows(2).all(|w| w[0] <= w[1]);
    let bounded = rows.iter().all(|f| *f <= optimal);
    let shown: Vec<String> = rows.iter().map(|f| format!("{:.1}", f * 100.0)).collect();
    check(
        run.code == 0 && monotone && bounded && exceeded == 0,
        format!("F1 by restarts [{}], optimal {:.1}", shown.join(", "), optimal * 100.0),
    )
}

fn determinism(dir: &Path) -> Outcome {
    let sys = dir.join("sys.clf").to_string_lossy().into_owned();
    let gold = dir.join("gold.clf").to_string_lossy().into_owned();
    let gen = drsmatch(&["synth", "--pairs", "40", "--seed", "8", "--system-out", &sys, "--gold-out", &gold]);
    if gen.code != 0 {
        return Err("synth failed".into());
    }
    let penman = fixture("fig4.penman");
    let commands: Vec<Vec<&str>> = vec![
        vec!["score", &sys, &gold, "--json", "--parallel", "8"],
        vec!["score", &sys, &gold, "--json", "--parallel", "8", "--oracle"],
        vec!["translations", &sys, &gold, "--json", "--parallel", "8"],
        vec!["sweep", &sys, &gold, "--json", "--parallel", "8", "--oracle", "--by-length"],
        vec!["spar", &sys, "--json", "--parallel", "8"],
        vec!["stats", &sys, "--json"],
        vec!["validate", &gold, "--json"],
        vec!["amr2drs", &penman, "--json"],
        vec!["json", &sys],
    ];
    let mut differing = Vec::new();
    for args in &commands {
        let (first, second) = (drsmatch(args), drsmatch(args));
        if first.stdout != second.stdout || first.stdout.is_empty() {
            differing.push(args[0]);
        }
    }
    // Parallelism must not change the numbers either.
    let serial = json(&drsmatch(&["score", &sys, &gold, "--json"]));
    let parallel = json(&drsmatch(&["score", &sys, &gold, "--json", "--parallel", "8"]));
    let same_result = serial["result"] == parallel["result"];
    check(
        differing.is_empty() && same_result,
        format!(
            "{} commands repeated, differing: {differing:?}; --parallel 8 result equals serial: {same_result}",
            commands.len()
        ),
    )
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let sweep_dir = dir.path().join("sweep");
    let det_dir = dir.path().join("det");
    std::fs::create_dir_all(&sweep_dir).unwrap();
    std::fs::create_dir_all(&det_dir).unwrap();

    let mut criteria: Vec<(&str, Outcome)> = vec![
        ("1 Fig.3 reproduction", fig3()),
        ("2 Fig.6 reproduction", fig6()),
        ("3 Fig.4 reproduction", fig4()),
        ("4 oracle equivalence", oracle_equivalence()),
        ("5 property suite", property_suite()),
    ];
    match table1_conditional() {
        Some(outcome) => criteria.push(("6a Table-1 counts (PMB_GOLD_EN)", outcome)),
        None => println!("SKIP 6a Table-1 counts: PMB_GOLD_EN not set"),
    }
    criteria.push(("6b sweep shape on synthetic data", sweep_shape(&sweep_dir)));
    criteria.push(("7 determinism", determinism(&det_dir)));

    let mut failed = Vec::new();
    for (name, outcome) in &criteria {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                failed.push(*name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
