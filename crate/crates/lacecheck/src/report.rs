//! Verification reports. The JSON form is versioned; everything that can
//! vary between identical runs (times, cache hits) lives under `timing`.

use crate::obligations::{Decided, Kind, Obligation};
use crate::solver::Status;
use serde::Serialize;
use std::fmt::Write as _;

pub const SCHEMA: &str = "lacecheck-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProgramStatus {
    Proved,
    Refuted,
    Incomplete,
}

impl ProgramStatus {
    pub fn name(self) -> &'static str {
        match self {
            ProgramStatus::Proved => "proved",
            ProgramStatus::Refuted => "refuted",
            ProgramStatus::Incomplete => "incomplete",
        }
    }

    pub fn parse(s: &str) -> Option<ProgramStatus> {
        match s {
            "proved" => Some(ProgramStatus::Proved),
            "refuted" => Some(ProgramStatus::Refuted),
            "incomplete" => Some(ProgramStatus::Incomplete),
            _ => None,
        }
    }

    /// Process exit code.
    pub fn exit_code(self) -> i32 {
        match self {
            ProgramStatus::Proved => 0,
            ProgramStatus::Refuted => 1,
            ProgramStatus::Incomplete => 2,
        }
    }
}

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Evidence {
    Solver,
    Frame,
    Structural,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub kind: Kind,
    pub location: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub against: Option<String>,
    pub verdict: Status,
    pub evidence: Evidence,
    pub hypothesis: String,
    pub conclusion: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub quotient: Vec<String>,
    pub trail: String,
    /// Grid as `tn x now`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub countermodel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query_hash: Option<String>,
}

impl Record {
    pub fn decided(o: &Obligation, d: &Decided) -> Record {
        let (verdict, evidence, detail) = match d {
            Decided::Frame(r) => (Status::Valid, Evidence::Frame, r.clone()),
            Decided::Structural(r) => (Status::Invalid, Evidence::Structural, r.clone()),
            Decided::Error(r) => (Status::Error, Evidence::Error, r.clone()),
        };
        Record { verdict, evidence, detail: Some(detail), ..Record::pending(o) }
    }

    pub fn pending(o: &Obligation) -> Record {
        Record {
            kind: o.kind,
            location: o.location.clone(),
            against: o.against.clone(),
            verdict: Status::Unknown,
            evidence: Evidence::Solver,
            hypothesis: o.hypothesis.to_string(),
            conclusion: o.conclusion.to_string(),
            quotient: o.quotient.clone(),
            trail: o.trail.clone(),
            grid: None,
            countermodel: None,
            detail: None,
            query_hash: None,
        }
    }

    pub fn site(&self) -> String {
        match &self.against {
            Some(a) => format!("{} vs {a}", self.location),
            None => self.location.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub total: usize,
    pub valid: usize,
    pub invalid: usize,
    pub other: usize,
}

impl Counts {
    fn add(&mut self, s: Status) {
        self.total += 1;
        match s {
            Status::Valid => self.valid += 1,
            Status::Invalid => self.invalid += 1,
            _ => self.other += 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThreadSummary {
    pub thread: usize,
    #[serde(flatten)]
    pub counts: Counts,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Timing {
    pub total_ms: u64,
    /// Solver time per obligation, in record order.
    pub obligation_ms: Vec<u64>,
    pub cache_hits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub screg: bool,
    pub pms: bool,
    pub loop_unroll: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub program: String,
    pub solver: String,
    pub flags: Flags,
    pub status: ProgramStatus,
    pub summary: Counts,
    pub threads: Vec<ThreadSummary>,
    /// Sites of invalid obligations.
    pub refuted: Vec<String>,
    pub notes: Vec<String>,
    pub obligations: Vec<Record>,
    pub timing: Timing,
}

/// Thread index of a location such as `t1:init->c`.
pub fn thread_of(location: &str) -> Option<usize> {
    location.strip_prefix('t')?.split(':').next()?.parse().ok()
}

impl Report {
    pub fn assemble(
        program: String,
        solver: String,
        flags: Flags,
        nthreads: usize,
        notes: Vec<String>,
        obligations: Vec<Record>,
        timing: Timing,
    ) -> Report {
        let mut summary = Counts::default();
        let mut threads: Vec<ThreadSummary> =
            (0..nthreads).map(|t| ThreadSummary { thread: t, counts: Counts::default() }).collect();
        for r in &obligations {
            summary.add(r.verdict);
            if let Some(t) = thread_of(&r.location).and_then(|t| threads.get_mut(t)) {
                t.counts.add(r.verdict);
            }
        }
        let refuted: Vec<String> = obligations
            .iter()
            .filter(|r| r.verdict == Status::Invalid)
            .map(|r| format!("{} {}", r.kind, r.site()))
            .collect();
        let status = if !refuted.is_empty() {
            ProgramStatus::Refuted
        } else if summary.other > 0 {
            ProgramStatus::Incomplete
        } else {
            ProgramStatus::Proved
        };
        Report {
            schema: SCHEMA,
            program,
            solver,
            flags,
            status,
            summary,
            threads,
            refuted,
            notes,
            obligations,
            timing,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// The JSON report without the `timing` field.
    pub fn stable_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serialises");
        if let Some(m) = v.as_object_mut() {
            m.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("report serialises")
    }

    /// Human-readable summary: failures in full, a count of the rest.
    pub fn to_text(&self, verbose: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}: {}", self.program, self.status.name());
        let _ = writeln!(
            s,
            "  {} obligations: {} valid, {} invalid, {} other",
            self.summary.total, self.summary.valid, self.summary.invalid, self.summary.other
        );
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        for r in &self.obligations {
            let show = verbose || r.verdict != Status::Valid;
            if !show {
                continue;
            }
            let _ = writeln!(s, "  [{}] {} {}", r.verdict.name(), r.kind, r.site());
            if r.verdict != Status::Valid || verbose {
                let _ = writeln!(s, "      {} => {}", r.hypothesis, r.conclusion);
                let _ = writeln!(s, "      from: {}", r.trail);
            }
            if let Some(d) = &r.detail {
                let _ = writeln!(s, "      {d}");
            }
            if let Some(m) = &r.countermodel {
                for line in m.lines().take(24) {
                    let _ = writeln!(s, "      | {line}");
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_index_from_location() {
        assert_eq!(thread_of("t1:init->c"), Some(1));
        assert_eq!(thread_of("final"), None);
        assert_eq!(thread_of("t12:rely"), Some(12));
    }
}
