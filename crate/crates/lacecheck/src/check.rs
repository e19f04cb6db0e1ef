//! The check pipeline: parse, resolve `sat`, generate obligations,
//! discharge them on a pool of solver processes, assemble the report.

use crate::assertion::Expr;
use crate::config::Config;
use crate::lacing::LacingError;
use crate::obligations::{self, Obligation};
use crate::report::{Evidence, Flags, Record, Report, Timing};
use crate::smt::{self, sorts, EmbedCtx, SortEnv};
use crate::solver::{Solver, SolverError, Status};
use crate::syntax::ast::{AssignKind, Cmd, Program};
use crate::syntax::{parse_program, FrontendError};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{err}")]
    Frontend { path: String, err: FrontendError },
    #[error(transparent)]
    Lacing(#[from] LacingError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("cannot build solver pool: {0}")]
    Pool(String),
}

/// Sorts of all names in the program, so that every query agrees.
pub fn program_sorts(p: &Program) -> SortEnv {
    let mut es: Vec<Expr> = vec![p.init.clone()];
    es.extend(p.final_.iter().cloned());
    for t in &p.threads {
        es.extend(t.assertions().into_iter().cloned());
        for i in t.guar.iter().chain(t.rely.iter()).flatten() {
            es.push(i.pre.clone());
            es.extend(assign_facts(&i.assign));
        }
        for c in t.components() {
            if let Cmd::Assign(a) = &c.cmd {
                es.extend(assign_facts(a));
            }
        }
    }
    let refs: Vec<&Expr> = es.iter().collect();
    sorts::infer(&refs, &SortEnv::default()).unwrap_or_default()
}

fn assign_facts(a: &crate::syntax::ast::Assign) -> Vec<Expr> {
    match a.kind() {
        Some(AssignKind::Write(ps)) | Some(AssignKind::Calc(ps)) => {
            ps.into_iter().map(|(v, e)| Expr::eq(Expr::var(&v), e)).collect()
        }
        Some(AssignKind::Read { var, regs }) => regs
            .into_iter()
            .map(|(r, k)| {
                let v = Expr::var(&var);
                Expr::eq(Expr::reg(&r), match k {
                    Some(k) => Expr::Proj(Box::new(v), k),
                    None => v,
                })
            })
            .collect(),
        None => vec![],
    }
}

/// Checks a parsed program.
pub struct Checker {
    pub config: Config,
    pub solver: Solver,
    pool: rayon::ThreadPool,
}

impl Checker {
    pub fn new(config: Config) -> Result<Checker, CheckError> {
        let solver = Solver::new(config.solver.clone())?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.pool)
            .build()
            .map_err(|e| CheckError::Pool(e.to_string()))?;
        Ok(Checker { config, solver, pool })
    }

    pub fn check_file(&self, path: &Path) -> Result<Report, CheckError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CheckError::Io { path: path.display().to_string(), source: e })?;
        let p = parse_program(&text).map_err(|err| CheckError::Frontend { path: path.display().to_string(), err })?;
        let name = path.file_stem().map(|s| s.to_string_lossy().to_string()).unwrap_or_default();
        self.check_program(&name, &p)
    }

    pub fn check_program(&self, name: &str, p: &Program) -> Result<Report, CheckError> {
        let start = Instant::now();
        let opts = &self.config.options;
        let ctx = EmbedCtx { sorts: program_sorts(p), cvs: p.coherence_vars(), bounds: None, skip_rewrite: false };
        let mut notes = Vec::new();
        let sat = self.resolve_sat(p, &ctx, &mut notes);
        let obs = obligations::generate(p, opts, &sat)?;
        if p.final_.is_none() || !opts.pms {
            notes.push("PMS check skipped".into());
        }
        if p.pragmas.sc {
            notes.push("sequentially consistent reading: no in-flight checks".into());
        }
        let results: Vec<(Record, u64, bool)> =
            self.pool.install(|| obs.par_iter().map(|o| self.discharge(o, &ctx)).collect());
        let mut timing = Timing::default();
        let mut records = Vec::new();
        for (r, ms, cached) in results {
            timing.obligation_ms.push(ms);
            timing.cache_hits += cached as usize;
            records.push(r);
        }
        timing.total_ms = start.elapsed().as_millis() as u64;
        let flags = Flags { screg: opts.screg, pms: opts.pms, loop_unroll: opts.unroll };
        Ok(Report::assemble(
            name.to_string(),
            self.solver.identity.clone(),
            flags,
            p.threads.len(),
            notes,
            records,
            timing,
        ))
    }

    fn resolve_sat(&self, p: &Program, ctx: &EmbedCtx, notes: &mut Vec<String>) -> BTreeMap<Expr, bool> {
        let terms = obligations::sat_terms(p);
        let answers: Vec<(Expr, Option<bool>)> = self.pool.install(|| {
            terms
                .par_iter()
                .map(|t| {
                    let v = smt::sat_query(t, ctx).ok().and_then(|q| {
                        let o = self.solver.run(&q);
                        match Status::from_answer(q.kind, o.answer) {
                            Status::Valid => Some(true),
                            Status::Invalid => Some(false),
                            _ => None,
                        }
                    });
                    (t.clone(), v)
                })
                .collect()
        });
        let mut map = BTreeMap::new();
        for (t, v) in answers {
            match v {
                Some(b) => {
                    map.insert(t, b);
                }
                None => notes.push(format!("sat({t}) unresolved")),
            }
        }
        map
    }

    /// Verdict for one obligation, with solver time and cache hit.
    pub fn discharge(&self, o: &Obligation, ctx: &EmbedCtx) -> (Record, u64, bool) {
        if let Some(d) = &o.decided {
            return (Record::decided(o, d), 0, false);
        }
        let mut r = Record::pending(o);
        let q = match smt::validity_query(&o.goal(), ctx, o.pms) {
            Ok(q) => q,
            Err(e) => {
                r.verdict = Status::Error;
                r.evidence = Evidence::Error;
                r.detail = Some(e.to_string());
                return (r, 0, false);
            }
        };
        let out = self.solver.run(&q);
        r.verdict = Status::from_answer(q.kind, out.answer);
        r.grid = Some(format!("{}x{}", q.grid.tn, q.grid.now));
        r.query_hash = Some(out.hash.clone());
        if r.verdict == Status::Invalid {
            r.countermodel = out.model.clone();
        }
        if matches!(r.verdict, Status::Unknown | Status::Timeout | Status::Error) {
            r.detail = out.detail.clone();
        }
        (r, out.millis, out.cached)
    }
}
