//! Corpus runs: every `NAME.lace` in a directory is checked against its
//! `NAME.expect` sidecar.
//!
//! ```text
//! # comments and blank lines are ignored
//! status: refuted
//! screg: true            # optional, per-program flags
//! pms: false
//! fail: LO t0:init->a    # an invalid obligation of this kind whose
//! fail: BO t0:a vs b     # site starts with this text must be reported
//! ```

use crate::check::{CheckError, Checker};
use crate::obligations::Kind;
use crate::report::{ProgramStatus, Report};
use crate::solver::Status;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{path}:{line}: {msg}")]
pub struct ExpectError {
    pub path: String,
    pub line: usize,
    pub msg: String,
}

/// A required failure: kind plus site prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectedFailure {
    pub kind: Kind,
    pub site: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub status: ProgramStatus,
    pub screg: Option<bool>,
    pub pms: Option<bool>,
    pub fails: Vec<ExpectedFailure>,
}

pub fn parse_expect(path: &str, text: &str) -> Result<Expectation, ExpectError> {
    let err = |line: usize, msg: String| ExpectError { path: path.to_string(), line, msg };
    let mut status = None;
    let mut screg = None;
    let mut pms = None;
    let mut fails = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, val) = line.split_once(':').ok_or_else(|| err(i + 1, format!("expected `key: value`, got `{line}`")))?;
        let val = val.trim();
        let flag = |v: &str| match v {
            "true" | "on" => Ok(true),
            "false" | "off" => Ok(false),
            _ => Err(err(i + 1, format!("expected true or false, got `{v}`"))),
        };
        match key.trim() {
            "status" => {
                status = Some(ProgramStatus::parse(val).ok_or_else(|| err(i + 1, format!("unknown status `{val}`")))?)
            }
            "screg" => screg = Some(flag(val)?),
            "pms" => pms = Some(flag(val)?),
            "fail" => {
                let (k, site) = val.split_once(char::is_whitespace).unwrap_or((val, ""));
                let kind = Kind::parse(k).ok_or_else(|| err(i + 1, format!("unknown obligation kind `{k}`")))?;
                fails.push(ExpectedFailure { kind, site: site.trim().to_string() });
            }
            k => return Err(err(i + 1, format!("unknown key `{k}`"))),
        }
    }
    let status = status.ok_or_else(|| err(0, "missing `status:`".into()))?;
    Ok(Expectation { status, screg, pms, fails })
}

/// Outcome of one corpus program.
#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub expected: Option<Expectation>,
    pub report: Option<Report>,
    /// Why the entry does not match its expectation.
    pub problems: Vec<String>,
}

impl Entry {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Compares a report with an expectation.
pub fn compare(exp: &Expectation, r: &Report) -> Vec<String> {
    let mut problems = Vec::new();
    if exp.status != r.status {
        problems.push(format!("expected {}, got {}", exp.status.name(), r.status.name()));
    }
    for f in &exp.fails {
        let hit = r
            .obligations
            .iter()
            .any(|o| o.verdict == Status::Invalid && o.kind == f.kind && o.site().starts_with(&f.site));
        if !hit {
            problems.push(format!("no invalid {} obligation at {}", f.kind, f.site));
        }
    }
    problems
}

/// `.lace` files of `dir`, sorted by name.
pub fn programs(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "lace"))
        .collect();
    v.sort();
    Ok(v)
}

/// Checks one corpus program with the flags its sidecar asks for.
pub fn run_one(checker: &Checker, path: &Path) -> Entry {
    let name = path.file_stem().map(|s| s.to_string_lossy().to_string()).unwrap_or_default();
    let exp_path = path.with_extension("expect");
    let mut entry = Entry { name, expected: None, report: None, problems: vec![] };
    let exp = match std::fs::read_to_string(&exp_path) {
        Ok(t) => match parse_expect(&exp_path.display().to_string(), &t) {
            Ok(e) => Some(e),
            Err(e) => {
                entry.problems.push(e.to_string());
                return entry;
            }
        },
        Err(_) => None,
    };
    let mut cfg = checker.config.clone();
    if let Some(e) = &exp {
        if let Some(b) = e.screg {
            cfg.options.screg = b;
        }
        if let Some(b) = e.pms {
            cfg.options.pms = b;
        }
    }
    let run = if cfg.options == checker.config.options {
        checker.check_file(path)
    } else {
        Checker::new(cfg).and_then(|c| c.check_file(path))
    };
    match run {
        Ok(r) => {
            match &exp {
                Some(e) => entry.problems = compare(e, &r),
                None => entry.problems.push("no .expect sidecar".into()),
            }
            entry.report = Some(r);
        }
        Err(CheckError::Frontend { err, .. }) => entry.problems.push(format!("frontend error: {err}")),
        Err(e) => entry.problems.push(e.to_string()),
    }
    entry.expected = exp;
    entry
}

pub fn run_corpus(checker: &Checker, dir: &Path) -> std::io::Result<Vec<Entry>> {
    Ok(programs(dir)?.iter().map(|p| run_one(checker, p)).collect())
}

/// Pass/fail matrix, one row per program.
pub fn table(entries: &[Entry]) -> String {
    let w = entries.iter().map(|e| e.name.len()).max().unwrap_or(4).max(7);
    let mut s = String::new();
    let _ = writeln!(s, "{:<w$}  {:<10}  {:<10}  result", "program", "expected", "actual");
    for e in entries {
        let exp = e.expected.as_ref().map_or("-", |x| x.status.name());
        let act = e.report.as_ref().map_or("error", |r| r.status.name());
        let _ = writeln!(s, "{:<w$}  {:<10}  {:<10}  {}", e.name, exp, act, if e.passed() { "pass" } else { "FAIL" });
        for p in &e.problems {
            let _ = writeln!(s, "{:<w$}    {p}", "");
        }
    }
    let passed = entries.iter().filter(|e| e.passed()).count();
    let _ = writeln!(s, "{passed}/{} programs match their expectations", entries.len());
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sidecar() {
        let e = parse_expect("x", "# c\nstatus: refuted\nscreg: on\nfail: LO t0:init->a\nfail: PMS final\n").unwrap();
        assert_eq!(e.status, ProgramStatus::Refuted);
        assert_eq!(e.screg, Some(true));
        assert_eq!(e.fails, vec![
            ExpectedFailure { kind: Kind::Lo, site: "t0:init->a".into() },
            ExpectedFailure { kind: Kind::Pms, site: "final".into() },
        ]);
        assert!(parse_expect("x", "status: maybe").is_err());
        assert!(parse_expect("x", "fail: LO x").is_err());
    }
}
