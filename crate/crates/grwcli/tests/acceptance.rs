//! Acceptance criteria, one line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the console.
//! Exits non-zero if any criterion outside `KNOWN_UNATTAINABLE` fails.

use std::process::Command;
use std::time::{Duration, Instant};

use grwcli::report::SuiteReport;
use grwcli::suites;

/// Criterion 5 asks for L recovered from A1 on warps over the Jordan fiber. At
/// those points S∘R = 0·R with a null rank-one Ricci tensor, so both sides of A1
/// vanish and L is not determined. The structural parts of the criterion pass.
const KNOWN_UNATTAINABLE: &[usize] = &[5];

const SEED: u64 = 0;

struct Outcome {
    id: usize,
    passed: bool,
    detail: String,
}

fn suite(id: usize, name: &str, limit: Option<Duration>) -> Outcome {
    let start = Instant::now();
    let reports = match suites::run(name, SEED) {
        Ok(r) => r,
        Err(e) => return Outcome { id, passed: false, detail: e.to_string() },
    };
    let elapsed = start.elapsed();
    let r: &SuiteReport = &reports[0];
    let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.label.as_str()).collect();
    let vacuous: Vec<&str> = r.checks.iter().filter(|c| c.vacuous).map(|c| c.label.as_str()).collect();
    let slow = limit.is_some_and(|l| elapsed > l);
    let passed = failed.is_empty() && vacuous.is_empty() && !slow;
    let mut detail = format!("{name}: {}/{} checks", r.checks.len() - failed.len() - vacuous.len(), r.checks.len());
    if let Some(l) = limit {
        detail += &format!(", {:.2} s (limit {} s)", elapsed.as_secs_f64(), l.as_secs());
    }
    if !failed.is_empty() {
        detail += &format!("; failed: {}", failed.join(" | "));
    }
    if !vacuous.is_empty() {
        let note = r.checks.iter().find(|c| c.vacuous).and_then(|c| c.note.clone()).unwrap_or_default();
        detail += &format!("; undetermined ({} checks): {note}", vacuous.len());
    }
    Outcome { id, passed, detail }
}

fn cli_verify_all() -> Outcome {
    let dir = std::env::temp_dir().join(format!("grw-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let start = Instant::now();
    let mut codes = Vec::new();
    let mut bodies = Vec::new();
    for k in 0..2 {
        let path = dir.join(format!("run{k}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_grw"))
            .args(["verify", "--suite", "all", "--seed", "7", "--out"])
            .arg(&path)
            .output()
            .expect("spawn grw")
            .status;
        codes.push(status.code());
        bodies.push(std::fs::read(&path).unwrap_or_default());
    }
    let elapsed = start.elapsed();
    let _ = std::fs::remove_dir_all(&dir);
    let identical = !bodies[0].is_empty() && bodies[0] == bodies[1];
    let ok_codes = codes.iter().all(|c| *c == Some(0));
    let fast = elapsed < Duration::from_secs(120);
    Outcome {
        id: 12,
        passed: identical && ok_codes && fast,
        detail: format!(
            "verify all: exit codes {codes:?}, byte-identical {identical}, two runs {:.2} s (limit 120 s)",
            elapsed.as_secs_f64()
        ),
    }
}

fn main() {
    let criteria: [(usize, &str, Option<u64>); 11] = [
        (1, "ge-random", Some(30)),
        (2, "einstein-genein1", None),
        (3, "cor42", None),
        (4, "thm51", None),
        (5, "thm42-jordan", None),
        (6, "r877-dim4", Some(60)),
        (7, "crosscheck", None),
        (8, "blocks", None),
        (9, "roter", None),
        (10, "gauss-e123", None),
        (11, "robertson-walker", None),
    ];
    let mut outcomes: Vec<Outcome> = criteria
        .iter()
        .map(|&(id, name, limit)| suite(id, name, limit.map(Duration::from_secs)))
        .collect();
    outcomes.push(cli_verify_all());

    let mut unexpected = Vec::new();
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        let known = !o.passed && KNOWN_UNATTAINABLE.contains(&o.id);
        let suffix = if known { " [known unattainable]" } else { "" };
        println!("criterion {:>2}: {tag} - {}{suffix}", o.id, o.detail);
        if !o.passed && !known {
            unexpected.push(o.id);
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} criteria pass", outcomes.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
