//! Runs queries through an external SMT-LIB2 solver, with a content-addressed
//! on-disk cache.

use crate::smt::{Query, QueryKind};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Sat,
    Unsat,
    Unknown,
    Timeout,
    Error,
}

/// Result of a validity question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Valid,
    Invalid,
    Unknown,
    Timeout,
    Error,
}

impl Status {
    pub fn from_answer(kind: QueryKind, a: Answer) -> Status {
        match (kind, a) {
            (QueryKind::Validity, Answer::Unsat) | (QueryKind::Satisfiable, Answer::Sat) => Status::Valid,
            (QueryKind::Validity, Answer::Sat) | (QueryKind::Satisfiable, Answer::Unsat) => Status::Invalid,
            (_, Answer::Unknown) => Status::Unknown,
            (_, Answer::Timeout) => Status::Timeout,
            (_, Answer::Error) => Status::Error,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Valid => "valid",
            Status::Invalid => "invalid",
            Status::Unknown => "unknown",
            Status::Timeout => "timeout",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub answer: Answer,
    /// `term = value` lines when the solver found a model.
    pub model: Option<String>,
    /// Solver diagnostics for errors.
    pub detail: Option<String>,
    #[serde(skip)]
    pub millis: u64,
    #[serde(skip)]
    pub cached: bool,
    #[serde(skip)]
    pub hash: String,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("cannot run solver `{path}`: {source}")]
    Spawn { path: String, source: std::io::Error },
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub path: PathBuf,
    pub timeout: Duration,
    pub cache_dir: Option<PathBuf>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { path: PathBuf::from("z3"), timeout: Duration::from_secs(30), cache_dir: None }
    }
}

/// A configured solver. Cheap to share between threads.
#[derive(Clone, Debug)]
pub struct Solver {
    pub config: SolverConfig,
    pub identity: String,
}

impl Solver {
    /// Checks that the solver runs and records its version string.
    pub fn new(config: SolverConfig) -> Result<Solver, SolverError> {
        let out = Command::new(&config.path)
            .arg("--version")
            .output()
            .map_err(|e| SolverError::Spawn { path: config.path.display().to_string(), source: e })?;
        let identity = String::from_utf8_lossy(&out.stdout).trim().to_string();
        Ok(Solver { config, identity })
    }

    pub fn hash(&self, q: &Query) -> String {
        let mut h = Sha256::new();
        h.update(self.identity.as_bytes());
        h.update(b"\n");
        h.update(format!("{:?}\n", q.kind).as_bytes());
        h.update(q.script.as_bytes());
        h.update(q.probes.join(" ").as_bytes());
        hex::encode(h.finalize())
    }

    pub fn run(&self, q: &Query) -> Outcome {
        let hash = self.hash(q);
        if let Some(dir) = &self.config.cache_dir {
            if let Some(mut o) = cache_lookup(dir, &hash) {
                o.cached = true;
                o.hash = hash;
                return o;
            }
        }
        let start = Instant::now();
        let mut o = self.run_process(q);
        o.millis = start.elapsed().as_millis() as u64;
        o.hash = hash.clone();
        if let (Some(dir), Answer::Sat | Answer::Unsat) = (&self.config.cache_dir, o.answer) {
            cache_store(dir, &hash, &o);
        }
        o
    }

    fn run_process(&self, q: &Query) -> Outcome {
        let fail = |answer, detail: String| Outcome {
            answer,
            model: None,
            detail: Some(detail),
            millis: 0,
            cached: false,
            hash: String::new(),
        };
        let mut child = match Command::new(&self.config.path)
            .args(["-in", "-smt2"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
        {
            Ok(c) => c,
            Err(e) => return fail(Answer::Error, format!("spawn failed: {e}")),
        };
        let ms = self.config.timeout.as_millis().max(1);
        let mut stdin = child.stdin.take().unwrap();
        let stdout = child.stdout.take().unwrap();
        let (tx, rx) = mpsc::channel::<String>();
        let reader = std::thread::spawn(move || {
            let mut lines = BufReader::new(stdout);
            let mut line = String::new();
            loop {
                line.clear();
                match lines.read_line(&mut line) {
                    Ok(0) | Err(_) => break,
                    Ok(_) => {
                        if tx.send(line.clone()).is_err() {
                            break;
                        }
                    }
                }
            }
        });
        let script = format!("(set-option :timeout {ms})\n{}(check-sat)\n", q.script);
        if let Err(e) = stdin.write_all(script.as_bytes()).and_then(|_| stdin.flush()) {
            let _ = child.kill();
            let _ = child.wait();
            return fail(Answer::Error, format!("write failed: {e}"));
        }
        let deadline = Instant::now() + self.config.timeout + Duration::from_secs(2);
        let recv = |rx: &mpsc::Receiver<String>| {
            let left = deadline.saturating_duration_since(Instant::now());
            rx.recv_timeout(left)
        };
        let mut noise = String::new();
        let first = loop {
            match recv(&rx) {
                Ok(l) => {
                    let t = l.trim();
                    if matches!(t, "sat" | "unsat" | "unknown" | "timeout") {
                        break Some(t.to_string());
                    }
                    noise.push_str(&l);
                }
                Err(mpsc::RecvTimeoutError::Timeout) => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return fail(Answer::Timeout, "killed at deadline".into());
                }
                Err(mpsc::RecvTimeoutError::Disconnected) => break None,
            }
        };
        let answer = match first.as_deref() {
            Some("sat") => Answer::Sat,
            Some("unsat") => Answer::Unsat,
            Some("timeout") => Answer::Timeout,
            Some("unknown") => Answer::Unknown,
            _ => Answer::Error,
        };
        let mut model = None;
        let mut answer = answer;
        if answer == Answer::Unknown {
            let _ = stdin.write_all(b"(get-info :reason-unknown)\n").and_then(|_| stdin.flush());
            if let Ok(l) = recv(&rx) {
                if l.contains("timeout") || l.contains("canceled") {
                    answer = Answer::Timeout;
                }
                noise.push_str(&l);
            }
        }
        if answer == Answer::Sat && !q.probes.is_empty() {
            let req = format!("(get-value ({}))\n(exit)\n", q.probes.join(" "));
            let _ = stdin.write_all(req.as_bytes()).and_then(|_| stdin.flush());
            let mut text = String::new();
            while let Ok(l) = recv(&rx) {
                text.push_str(&l);
            }
            model = Some(render_values(&text));
        } else {
            let _ = stdin.write_all(b"(exit)\n");
        }
        drop(stdin);
        let _ = child.kill();
        let _ = child.wait();
        let _ = reader.join();
        let mut detail = None;
        if answer == Answer::Error || answer == Answer::Unknown {
            let mut err = String::new();
            if let Some(mut e) = child.stderr.take() {
                let _ = e.read_to_string(&mut err);
            }
            let d = format!("{}{}", noise.trim(), err.trim());
            if !d.is_empty() {
                detail = Some(d);
            }
        }
        Outcome { answer, model, detail, millis: 0, cached: false, hash: String::new() }
    }
}

/// Turns a `get-value` response into `term = value` lines.
fn render_values(text: &str) -> String {
    let body = text.trim();
    let body = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')).unwrap_or(body);
    let mut out = Vec::new();
    let chars: Vec<char> = body.chars().collect();
    let mut depth = 0;
    let mut start = None;
    for (i, c) in chars.iter().enumerate() {
        match c {
            '(' => {
                if depth == 0 {
                    start = Some(i);
                }
                depth += 1;
            }
            ')' => {
                depth -= 1;
                if depth == 0 {
                    if let Some(s) = start.take() {
                        let pair: String = chars[s + 1..i].iter().collect();
                        out.push(split_pair(pair.trim()));
                    }
                }
            }
            _ => {}
        }
    }
    out.join("\n")
}

fn split_pair(pair: &str) -> String {
    // `(f 0 1) 3` or `himin (- 2)`
    let (term, value) = if pair.starts_with('(') {
        let mut depth = 0;
        let mut cut = pair.len();
        for (i, c) in pair.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        cut = i + 1;
                        break;
                    }
                }
                _ => {}
            }
        }
        (&pair[..cut], pair[cut..].trim())
    } else {
        match pair.split_once(char::is_whitespace) {
            Some((a, b)) => (a, b.trim()),
            None => (pair, ""),
        }
    };
    let value = match value.strip_prefix("(- ").and_then(|v| v.strip_suffix(')')) {
        Some(v) => format!("-{}", v.trim()),
        None => value.to_string(),
    };
    format!("{term} = {value}")
}

fn cache_lookup(dir: &Path, hash: &str) -> Option<Outcome> {
    let text = std::fs::read_to_string(dir.join(format!("{hash}.json"))).ok()?;
    serde_json::from_str(&text).ok()
}

fn cache_store(dir: &Path, hash: &str, o: &Outcome) {
    if std::fs::create_dir_all(dir).is_err() {
        return;
    }
    let Ok(text) = serde_json::to_string(o) else { return };
    let tmp = dir.join(format!("{hash}.{}.tmp", std::process::id()));
    if std::fs::write(&tmp, text).is_ok() {
        let _ = std::fs::rename(&tmp, dir.join(format!("{hash}.json")));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_get_value_output() {
        let t = "((himin (- 3))\n ((val_x 0 1) 2)\n (r_r1 0))\n";
        assert_eq!(render_values(t), "himin = -3\n(val_x 0 1) = 2\nr_r1 = 0");
    }
}
