//! SMT-LIB2 queries for proof obligations.

pub mod embed;
pub mod sorts;

use crate::assertion::rewrite::rewrite_modal;
use crate::assertion::{Accent, Expr};
pub use embed::{grid_for, Bounds, EmbedError, Embedder, Grid};
use serde::Serialize;
pub use sorts::{Sort, SortEnv};
use std::collections::BTreeSet;

/// What a query asks of the solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QueryKind {
    /// Is the formula true in every model? (unsat of its negation)
    Validity,
    /// Does the formula have a model?
    Satisfiable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub kind: QueryKind,
    pub grid: Grid,
    /// Declarations, axioms and the assertion, without `check-sat`.
    pub script: String,
    /// Terms to evaluate when the solver finds a model.
    pub probes: Vec<String>,
}

/// Settings shared by all queries of one program.
#[derive(Clone, Debug, Default)]
pub struct EmbedCtx {
    pub sorts: SortEnv,
    /// Coherence variables of the program, for `cv(x)`.
    pub cvs: BTreeSet<String>,
    pub bounds: Option<Bounds>,
    /// Embed the assertion as written, without modal rewriting.
    pub skip_rewrite: bool,
}

fn build(e: &Expr, ctx: &EmbedCtx, pms: bool, kind: QueryKind) -> Result<Query, EmbedError> {
    let mut hats = false;
    let mut twiddles = false;
    e.visit(&mut |n| {
        if let Expr::Var(_, a) | Expr::Shift(a, _) = n {
            hats |= a.is_hat();
            twiddles |= a.is_twiddle();
        }
    });
    if hats && twiddles {
        return Err(EmbedError::Unsupported("hatting and twiddling in one obligation".into()));
    }
    let rewritten = if ctx.skip_rewrite { e.clone() } else { rewrite_modal(e) };
    let g1 = grid_for(e);
    let g2 = grid_for(&rewritten);
    let grid = Grid { tn: g1.tn.max(g2.tn), now: g1.now.max(g2.now) };
    let env = sorts::infer(&[&rewritten], &ctx.sorts).map_err(EmbedError::Sort)?;
    let mut em = Embedder::new(grid, &env, &ctx.cvs, ctx.bounds);
    let body = em.embed_top(&rewritten)?;
    let mut script = em.preamble(pms);
    match kind {
        QueryKind::Validity => script.push_str(&format!("(assert (not {body}))\n")),
        QueryKind::Satisfiable => script.push_str(&format!("(assert {body})\n")),
    }
    Ok(Query { kind, grid, script, probes: em.probes() })
}

/// Validity of `e`. `pms` adds the axiom that every thread sees the same
/// final values.
pub fn validity_query(e: &Expr, ctx: &EmbedCtx, pms: bool) -> Result<Query, EmbedError> {
    build(e, ctx, pms, QueryKind::Validity)
}

/// Satisfiability of `e` (used to resolve `sat(P)`).
pub fn sat_query(e: &Expr, ctx: &EmbedCtx) -> Result<Query, EmbedError> {
    build(e, ctx, false, QueryKind::Satisfiable)
}

/// True if `e` mentions any accent or hook.
pub fn is_accented(e: &Expr) -> bool {
    e.any(&|n| matches!(n, Expr::Var(_, a) | Expr::Shift(a, _) if *a != Accent::Plain))
}
