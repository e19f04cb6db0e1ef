mod common;

use lacecheck::check::Checker;
use lacecheck::config::Config;
use lacecheck::corpus::{run_corpus, Entry};
use lacecheck::obligations::Kind;
use lacecheck::report::ProgramStatus;
use lacecheck::solver::Status;
use lacecheck::syntax::parse_program;
use lacecheck::syntax::validate::validate_aux_discipline;
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

/// Criteria that cannot pass: the `U(P since Q)` embedding equivalence is
/// not valid under the embedding rules. Only that row may fail.
const KNOWN_FAILING: &[&str] = &["3"];

/// Wall-clock budget for one full corpus run.
const CORPUS_BUDGET: Duration = Duration::from_secs(600);

const PROOFS: &[&str] = &[
    "MP",
    "MP-SC",
    "MP-cond",
    "MP-loop",
    "MP-while",
    "almostWRC",
    "almostISA2",
    "WRC",
    "SB",
    "S",
    "CoRR2",
    "2+2W",
    "LB",
    "R",
    "no-thin-air",
    "SCreg",
    "no42",
    "PPOCA",
    "token-ring-3",
    "token-ring-4",
];

/// Program, and the obligation kind and site where it must fail.
const UNPROOFS: &[(&str, &str, &str)] = &[
    ("lo-parallel-abused", "LO", "t0:init->a"),
    ("lo-parallel-disabused", "EXT", "t1:init->c"),
    ("bo-parallel-abused", "BO", "t0:a vs b"),
    ("uext-unstable", "UEXT", "t1:init->c"),
    ("uo-self", "UO", "t0:a vs a"),
    ("PPOCA-unproof", "INHERIT", "t1:d->e"),
    ("R-uo-lo", "PMS", "final"),
    ("thin-air", "PMS", "final"),
];

/// Fixture, violated condition and offending label.
const AUX_FIXTURES: &[(&str, u8, &str)] = &[
    ("aux1-regular-from-aux-register", 1, "b"),
    ("aux2-read-into-regular", 2, "a"),
    ("aux3-control-on-aux", 3, "beta"),
    ("aux4-unmatched-aux-constraint", 4, "c"),
    ("aux5-regular-embroidery", 5, "c"),
];

fn root() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn corpus_dir() -> PathBuf {
    root().join("corpus")
}

fn fixture(name: &str) -> PathBuf {
    root().join("tests/fixtures").join(format!("{name}.lace"))
}

fn checker() -> Checker {
    Checker::new(Config::default()).expect("z3 on PATH")
}

fn entry<'a>(entries: &'a [Entry], name: &str) -> Option<&'a Entry> {
    entries.iter().find(|e| e.name == name)
}

fn has_invalid(e: &Entry, kind: Kind, site: &str) -> bool {
    e.report.as_ref().is_some_and(|r| {
        r.obligations.iter().any(|o| o.verdict == Status::Invalid && o.kind == kind && o.site().starts_with(site))
    })
}

fn status(e: &Entry) -> Option<ProgramStatus> {
    e.report.as_ref().map(|r| r.status)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(problems: Vec<String>, ok: String) -> Outcome {
    if problems.is_empty() {
        Outcome { pass: true, detail: ok }
    } else {
        Outcome { pass: false, detail: problems.join("; ") }
    }
}

fn proofs(entries: &[Entry], elapsed: Duration) -> Outcome {
    let mut bad = Vec::new();
    for name in PROOFS {
        match entry(entries, name) {
            Some(e) if status(e) == Some(ProgramStatus::Proved) => {}
            Some(e) => bad.push(format!("{name}: {:?} {}", status(e), e.problems.join(", "))),
            None => bad.push(format!("{name}: missing")),
        }
    }
    if elapsed > CORPUS_BUDGET {
        bad.push(format!("corpus took {elapsed:?}"));
    }
    outcome(bad, format!("{} proofs verified, corpus in {:.0?}", PROOFS.len(), elapsed))
}

fn unproofs(entries: &[Entry]) -> Outcome {
    let mut bad = Vec::new();
    for (name, kind, site) in UNPROOFS {
        let kind = Kind::parse(kind).unwrap();
        match entry(entries, name) {
            Some(e) if status(e) == Some(ProgramStatus::Refuted) && has_invalid(e, kind, site) => {}
            Some(e) => bad.push(format!("{name}: {:?}, no invalid {kind} at {site}", status(e))),
            None => bad.push(format!("{name}: missing")),
        }
    }
    outcome(bad, format!("{} unproofs refuted at their named obligation", UNPROOFS.len()))
}

fn modal_properties() -> Outcome {
    let solver = common::solver();
    let props = common::modal_properties();
    let bad: Vec<(String, String)> = props
        .par_iter()
        .filter_map(|(row, f)| {
            let v = common::verdict(&solver, f);
            (v != Status::Valid).then(|| (row.clone(), format!("{f} is {}", v.name())))
        })
        .collect();
    let rows: std::collections::BTreeSet<&str> = bad.iter().map(|(r, _)| r.as_str()).collect();
    let detail = format!(
        "{} of {} property instances valid; failing rows: {}",
        props.len() - bad.len(),
        props.len(),
        rows.into_iter().collect::<Vec<_>>().join(", ")
    );
    if bad.is_empty() {
        Outcome { pass: true, detail: format!("{} property instances valid", props.len()) }
    } else {
        Outcome { pass: false, detail }
    }
}

fn calculations() -> Outcome {
    let solver = common::solver();
    let bad: Vec<String> = common::CALCS
        .iter()
        .filter_map(|c| {
            let want = if c.valid { Status::Valid } else { Status::Invalid };
            let got = common::calc_verdict(&solver, c);
            (got != want).then(|| format!("{}: expected {}, got {}", c.name, want.name(), got.name()))
        })
        .collect();
    outcome(bad, format!("{} calculations reproduced", common::CALCS.len()))
}

fn differential() -> Outcome {
    let s = common::differential_suite();
    let mut bad = Vec::new();
    if !s.ok() {
        bad.push(s.line());
        bad.extend(s.differ.iter().take(20).cloned());
    }
    outcome(bad, s.line())
}

fn structural(entries: &[Entry]) -> Outcome {
    let mut bad = Vec::new();
    match entry(entries, "MP-cond") {
        Some(e) if status(e) == Some(ProgramStatus::Proved) && !has_invalid(e, Kind::Coverage, "") => {}
        _ => bad.push("MP-cond not accepted by coverage".to_string()),
    }
    match checker().check_file(&fixture("MP-cond-uncovered")) {
        Ok(r)
            if r.status == ProgramStatus::Refuted
                && r.obligations
                    .iter()
                    .any(|o| o.verdict == Status::Invalid && o.kind == Kind::Coverage && o.site().starts_with("t1:post")) => {}
        other => bad.push(format!("MP-cond-uncovered not rejected: {:?}", other.map(|r| r.status))),
    }
    let mut programs = 0;
    for p in lacecheck::corpus::programs(&corpus_dir()).unwrap() {
        let prog = parse_program(&std::fs::read_to_string(&p).unwrap()).unwrap();
        let v = validate_aux_discipline(&prog);
        if !v.is_empty() {
            bad.push(format!("{}: {:?}", p.display(), v));
        }
        programs += 1;
    }
    for (name, condition, label) in AUX_FIXTURES {
        let prog = parse_program(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        let v = validate_aux_discipline(&prog);
        if !v.iter().any(|x| x.condition == *condition && x.label == *label) {
            bad.push(format!("{name}: expected condition {condition} at {label}, got {v:?}"));
        }
    }
    outcome(bad, format!("coverage ok, aux discipline accepts {programs} programs and rejects {} fixtures", AUX_FIXTURES.len()))
}

fn determinism(first: &[Entry], second: &[Entry]) -> Outcome {
    let json = |es: &[Entry]| -> Vec<(String, Option<String>)> {
        es.iter().map(|e| (e.name.clone(), e.report.as_ref().map(|r| r.stable_json()))).collect()
    };
    let (a, b) = (json(first), json(second));
    let bad: Vec<String> =
        a.iter().zip(&b).filter(|(x, y)| x != y).map(|(x, _)| format!("{} differs", x.0)).collect();
    let bad = if a.len() != b.len() { vec!["program lists differ".to_string()] } else { bad };
    outcome(bad, format!("{} reports identical", a.len()))
}

/// Runs without the test harness so the criterion lines are always shown.
fn main() {
    let start = Instant::now();
    let first = run_corpus(&checker(), &corpus_dir()).unwrap();
    let elapsed = start.elapsed();
    let second = run_corpus(&checker(), &corpus_dir()).unwrap();

    let results = [
        ("1 proofs verified", proofs(&first, elapsed)),
        ("2 unproofs refuted at location", unproofs(&first)),
        ("3 modal property suite", modal_properties()),
        ("4 displayed calculations", calculations()),
        ("5 solver and oracle agree", differential()),
        ("6 structural checks", structural(&first)),
        ("7 deterministic reports", determinism(&first, &second)),
    ];
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let unexpected: Vec<&str> = results
        .iter()
        .filter(|(n, o)| o.pass == KNOWN_FAILING.contains(&&n[..1]))
        .map(|(n, _)| *n)
        .collect();
    assert!(unexpected.is_empty(), "unexpected outcome: {}", unexpected.join(", "));
    let c3 = &results[2].1.detail;
    assert!(c3.ends_with(&format!("failing rows: {}", common::INVALID_ROW)), "{c3}");
    assert!(first.iter().all(Entry::passed), "{}", lacecheck::corpus::table(&first));
}
