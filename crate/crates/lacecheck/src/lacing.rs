//! Structural analysis of a thread: so paths, constraint coverage,
//! preconditions from knots, and lo/bo/uo parallelism.
//!
//! The so tree is explored as the finite set of paths that run each loop at
//! most `unroll` times. Each occurrence of a label on a path is an instance.
//! An instance takes its constraints from one disjunct of its knot: among
//! the disjuncts whose sources all occur earlier on the path, the one with
//! the most recent latest source (leftmost on ties). Each stitch then links
//! the most recent earlier instance of its source to the target instance.

use crate::assertion::Expr;
use crate::syntax::ast::{Cmd, Component, Knot, LabelRef, Ordering, Stitch, Stmt, Thread};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

/// Upper bound on enumerated paths per thread.
pub const MAX_PATHS: usize = 20_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LacingError {
    #[error("thread {thread}: more than {MAX_PATHS} so paths; lower the loop unrolling depth")]
    TooManyPaths { thread: usize },
}

/// One step of an so path: a component, a control expression with the arm
/// taken, or the thread postcondition (`post`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub label: String,
    pub arm: Option<bool>,
}

impl Step {
    fn new(label: &str, arm: Option<bool>) -> Step {
        Step { label: label.to_string(), arm }
    }

    fn matches(&self, r: &LabelRef) -> bool {
        self.label == r.label && (r.arm.is_none() || r.arm == self.arm)
    }
}

impl std::fmt::Display for Step {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", LabelRef { label: self.label.clone(), arm: self.arm })
    }
}

pub type Path = Vec<Step>;

pub fn render_path(p: &[Step]) -> String {
    let mut s = String::from("init");
    for st in p {
        let _ = write!(s, " {st}");
    }
    s
}

/// All so paths of `t` from its start to its postcondition, with each loop
/// body run at most `unroll` times.
pub fn so_paths(t: &Thread, thread: usize, unroll: usize) -> Result<Vec<Path>, LacingError> {
    let mut paths = seq_paths(&t.body, unroll, thread)?;
    for p in &mut paths {
        p.push(Step::new("post", None));
    }
    Ok(paths)
}

fn concat(a: Vec<Path>, b: &[Path], thread: usize) -> Result<Vec<Path>, LacingError> {
    if a.len().saturating_mul(b.len()) > MAX_PATHS {
        return Err(LacingError::TooManyPaths { thread });
    }
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in &a {
        for y in b {
            let mut p = x.clone();
            p.extend(y.iter().cloned());
            out.push(p);
        }
    }
    Ok(out)
}

fn seq_paths(body: &[Stmt], unroll: usize, thread: usize) -> Result<Vec<Path>, LacingError> {
    let mut acc: Vec<Path> = vec![vec![]];
    for s in body {
        let ps = stmt_paths(s, unroll, thread)?;
        acc = concat(acc, &ps, thread)?;
    }
    Ok(acc)
}

fn stmt_paths(s: &Stmt, unroll: usize, thread: usize) -> Result<Vec<Path>, LacingError> {
    match s {
        Stmt::Cmd(c) => Ok(vec![vec![Step::new(&c.label, None)]]),
        Stmt::If { ctrl, then_, else_ } => {
            let t = concat(vec![vec![Step::new(&ctrl.label, Some(true))]], &seq_paths(then_, unroll, thread)?, thread)?;
            let e = match else_ {
                Some(e) => seq_paths(e, unroll, thread)?,
                None => vec![vec![]],
            };
            let mut out = t;
            out.extend(concat(vec![vec![Step::new(&ctrl.label, Some(false))]], &e, thread)?);
            Ok(out)
        }
        Stmt::While { ctrl, body } => {
            let iter = concat(vec![vec![Step::new(&ctrl.label, Some(true))]], &seq_paths(body, unroll, thread)?, thread)?;
            let exit = vec![vec![Step::new(&ctrl.label, Some(false))]];
            let mut out = Vec::new();
            let mut prefix: Vec<Path> = vec![vec![]];
            for n in 0..=unroll {
                out.extend(concat(prefix.clone(), &exit, thread)?);
                if n < unroll {
                    prefix = concat(prefix, &iter, thread)?;
                }
            }
            check_len(out, thread)
        }
        Stmt::DoUntil { body, ctrl } => {
            let b = seq_paths(body, unroll, thread)?;
            let again = concat(vec![vec![Step::new(&ctrl.label, Some(false))]], &b, thread)?;
            let exit = vec![vec![Step::new(&ctrl.label, Some(true))]];
            let mut out = Vec::new();
            let mut prefix = b;
            for n in 0..=unroll {
                out.extend(concat(prefix.clone(), &exit, thread)?);
                if n < unroll {
                    prefix = concat(prefix, &again, thread)?;
                }
            }
            check_len(out, thread)
        }
    }
}

fn check_len(v: Vec<Path>, thread: usize) -> Result<Vec<Path>, LacingError> {
    if v.len() > MAX_PATHS {
        return Err(LacingError::TooManyPaths { thread });
    }
    Ok(v)
}

/// The knot of every label in the thread, `post` included.
pub fn knot_map(t: &Thread) -> BTreeMap<String, Option<&Knot>> {
    let mut m = BTreeMap::new();
    for c in t.components() {
        m.insert(c.label.clone(), c.knot.as_ref());
    }
    for c in t.controls() {
        m.insert(c.label.clone(), c.knot.as_ref());
    }
    m.insert("post".to_string(), t.post.as_ref());
    m
}

/// Identifies a stitch: the label of its target and its index among the
/// target knot's stitches.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StitchId {
    pub target: String,
    pub index: usize,
}

/// A constraint edge between instances on one path. Instance 0 is `init`;
/// step `i` of the path is instance `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub ordering: Ordering,
    pub stitch: StitchId,
}

/// The constraints of one path.
#[derive(Clone, Debug)]
pub struct Laced {
    pub path: Path,
    pub edges: Vec<Edge>,
    /// Instances with no available disjunct.
    pub uncovered: Vec<usize>,
    lo: Vec<Vec<bool>>,
    bo: Vec<Vec<bool>>,
    uo: Vec<Vec<bool>>,
}

impl Laced {
    pub fn label(&self, inst: usize) -> &str {
        if inst == 0 {
            "init"
        } else {
            &self.path[inst - 1].label
        }
    }

    pub fn lo_star(&self, a: usize, b: usize) -> bool {
        self.lo[a][b]
    }

    pub fn bo_star(&self, a: usize, b: usize) -> bool {
        self.bo[a][b]
    }

    pub fn uo_star(&self, a: usize, b: usize) -> bool {
        self.uo[a][b]
    }
}

/// Simple knots of `k` with their stitch indices in `Knot::stitches` order.
fn indexed_simples(k: &Knot) -> Vec<Vec<(usize, &Stitch)>> {
    let mut i = 0;
    k.simples()
        .into_iter()
        .map(|s| {
            s.iter()
                .map(|st| {
                    i += 1;
                    (i - 1, st)
                })
                .collect()
        })
        .collect()
}

/// Most recent instance before `inst` matching `r`, if any.
fn source_instance(path: &[Step], inst: usize, r: &LabelRef) -> Option<usize> {
    if r.label == "init" {
        return Some(0);
    }
    (1..inst).rev().find(|&j| path[j - 1].matches(r))
}

/// Applies the lacing of `knots` to one path.
pub fn lace_path(path: &[Step], knots: &BTreeMap<String, Option<&Knot>>) -> Laced {
    let n = path.len() + 1;
    let mut edges = Vec::new();
    let mut uncovered = Vec::new();
    for inst in 1..n {
        let Some(Some(k)) = knots.get(&path[inst - 1].label) else { continue };
        let mut best: Option<(usize, Vec<Edge>)> = None;
        for simple in indexed_simples(k) {
            let mut es = Vec::new();
            let mut latest = 0;
            let mut ok = true;
            for (idx, st) in simple {
                match source_instance(path, inst, &st.source) {
                    Some(j) => {
                        latest = latest.max(j);
                        es.push(Edge {
                            from: j,
                            to: inst,
                            ordering: st.ordering,
                            stitch: StitchId { target: path[inst - 1].label.clone(), index: idx },
                        });
                    }
                    None => ok = false,
                }
            }
            if ok && best.as_ref().is_none_or(|(l, _)| latest > *l) {
                best = Some((latest, es));
            }
        }
        match best {
            Some((_, es)) => edges.extend(es),
            None => uncovered.push(inst),
        }
    }
    let mut lo = vec![vec![false; n]; n];
    let mut bo = vec![vec![false; n]; n];
    let mut uo = vec![vec![false; n]; n];
    // Edges run forward, so one pass in target order closes the relations.
    let mut sorted: Vec<&Edge> = edges.iter().filter(|e| e.ordering != Ordering::Go).collect();
    sorted.sort_by_key(|e| e.to);
    for e in sorted {
        let (j, i) = (e.from, e.to);
        let strong_b = matches!(e.ordering, Ordering::Bo | Ordering::Uo);
        let strong_u = e.ordering == Ordering::Uo;
        for x in 0..n {
            let reach = x == j || lo[x][j];
            if reach {
                lo[x][i] = true;
            }
            if bo[x][j] || (strong_b && reach) {
                bo[x][i] = true;
            }
            if uo[x][j] || (strong_u && reach) {
                uo[x][i] = true;
            }
        }
    }
    Laced { path: path.to_vec(), edges, uncovered, lo, bo, uo }
}

/// A component reached on some path with no knot disjunct whose sources all
/// precede it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Uncovered {
    pub label: String,
    pub path: String,
}

pub fn check_constraint_coverage(t: &Thread, thread: usize, unroll: usize) -> Result<Vec<Uncovered>, LacingError> {
    let knots = knot_map(t);
    let mut out = BTreeSet::new();
    for p in so_paths(t, thread, unroll)? {
        let l = lace_path(&p, &knots);
        for &inst in &l.uncovered {
            out.insert(Uncovered { label: l.label(inst).to_string(), path: render_path(&p[..inst]) });
        }
    }
    Ok(out.into_iter().collect())
}

/// Preconditions derived from a knot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preconditions {
    /// Holds when the command elaborates; `sat(..)` marks go-constrained parts.
    pub elaboration: Expr,
    /// Conjunction of all embroideries (per disjunct).
    pub overall: Expr,
    /// Holds while the command's write is in flight.
    pub interference: Expr,
}

/// Preconditions of a command with knot `k` and optional interference
/// precondition. Without one, the interference precondition is the overall
/// precondition: go embroidery holds when the write propagates.
pub fn precondition_from_knot(k: Option<&Knot>, intfpre: Option<&Expr>) -> Preconditions {
    let (elaboration, overall) = match k {
        None => (Expr::tt(), Expr::tt()),
        Some(k) => {
            let mut elabs = Vec::new();
            let mut overalls = Vec::new();
            for s in k.simples() {
                let overall = Expr::and(s.iter().map(|st| st.embroidery.clone()).collect());
                let elab = if s.iter().any(|st| st.ordering == Ordering::Go) {
                    let mut parts: Vec<Expr> =
                        s.iter().filter(|st| st.ordering != Ordering::Go).map(|st| st.embroidery.clone()).collect();
                    parts.push(Expr::Sat(Box::new(overall.clone())));
                    Expr::and(parts)
                } else {
                    overall.clone()
                };
                elabs.push(elab);
                overalls.push(overall);
            }
            (Expr::or(elabs), Expr::or(overalls))
        }
    };
    let interference = intfpre.cloned().unwrap_or_else(|| overall.clone());
    Preconditions { elaboration, overall, interference }
}

/// Parallelism relations of one thread, collected over all paths.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Parallelism {
    /// (stitch, assignment label): the assignment may elaborate while the
    /// stitch's embroidery is meant to hold.
    pub lo: BTreeSet<(StitchId, String)>,
    /// (earlier write, later write) to disjoint variables, not bo ordered.
    pub bo: BTreeSet<(String, String)>,
    /// (earlier write, later write), not uo ordered; every write with itself.
    pub uo: BTreeSet<(String, String)>,
}

fn is_assignment(c: Option<&&Component>) -> bool {
    matches!(c.map(|c| &c.cmd), Some(Cmd::Assign(_)))
}

fn written(c: Option<&&Component>) -> Vec<String> {
    match c.map(|c| &c.cmd) {
        Some(Cmd::Assign(a)) => a.written_vars(),
        _ => vec![],
    }
}

fn assigns_register(c: Option<&&Component>) -> bool {
    match c.map(|c| &c.cmd) {
        Some(Cmd::Assign(a)) => !a.is_write(),
        _ => false,
    }
}

/// Computes lo, bo and uo parallelism. With `screg`, register assignments
/// are lo parallel with a stitch only when so-between its ends.
pub fn compute_parallelism(t: &Thread, thread: usize, unroll: usize, screg: bool) -> Result<Parallelism, LacingError> {
    let knots = knot_map(t);
    let comps: BTreeMap<&str, &Component> = t.components().into_iter().map(|c| (c.label.as_str(), c)).collect();
    let paths = so_paths(t, thread, unroll)?;
    let laced: Vec<Laced> = paths.iter().map(|p| lace_path(p, &knots)).collect();
    let reach = label_lo_reach(&laced);
    let lo_star = |a: &str, b: &str| reach.contains(&(a.to_string(), b.to_string()));
    let mut par = Parallelism::default();
    for (p, l) in paths.iter().zip(&laced) {
        let n = p.len() + 1;
        for e in &l.edges {
            let (s, tg) = (e.from, e.to);
            for q in 1..n {
                if q == s || q == tg {
                    continue;
                }
                let c = comps.get(l.label(q));
                if !is_assignment(c) {
                    continue;
                }
                if screg && assigns_register(c) && !(s < q && q < tg) {
                    continue;
                }
                if !lo_star(l.label(q), l.label(s)) && !lo_star(l.label(tg), l.label(q)) {
                    par.lo.insert((e.stitch.clone(), l.label(q).to_string()));
                }
            }
        }
        for q1 in 1..n {
            let w1 = written(comps.get(l.label(q1)));
            if w1.is_empty() {
                continue;
            }
            for q2 in q1..n {
                let w2 = written(comps.get(l.label(q2)));
                if w2.is_empty() {
                    continue;
                }
                let (a, b) = (l.label(q1).to_string(), l.label(q2).to_string());
                if !l.uo_star(q1, q2) {
                    par.uo.insert((a.clone(), b.clone()));
                }
                if q1 < q2 && w1.iter().all(|v| !w2.contains(v)) && !l.bo_star(q1, q2) {
                    par.bo.insert((a, b));
                }
            }
        }
    }
    Ok(par)
}

/// Lo reachability between labels, over the edges of every path: loop
/// instances of a label are identified.
fn label_lo_reach(laced: &[Laced]) -> BTreeSet<(String, String)> {
    let mut succ: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for l in laced {
        for e in l.edges.iter().filter(|e| e.ordering != Ordering::Go) {
            succ.entry(l.label(e.from).to_string()).or_default().insert(l.label(e.to).to_string());
        }
    }
    let mut reach = BTreeSet::new();
    for start in succ.keys() {
        let mut stack: Vec<&String> = succ[start].iter().collect();
        let mut seen = BTreeSet::new();
        while let Some(x) = stack.pop() {
            if seen.insert(x.clone()) {
                stack.extend(succ.get(x).into_iter().flatten());
            }
        }
        for x in seen {
            reach.insert((start.clone(), x));
        }
    }
    reach
}

/// Stable text dump of paths and parallelism, for snapshots and debugging.
pub fn dump(t: &Thread, thread: usize, unroll: usize, screg: bool) -> Result<String, LacingError> {
    let knots = knot_map(t);
    let mut s = String::new();
    let _ = writeln!(s, "thread {thread}");
    for p in so_paths(t, thread, unroll)? {
        let l = lace_path(&p, &knots);
        let _ = writeln!(s, "  path {}", render_path(&p));
        for e in &l.edges {
            let _ = writeln!(s, "    {} {} {}", l.label(e.from), e.ordering.name(), l.label(e.to));
        }
        for u in &l.uncovered {
            let _ = writeln!(s, "    uncovered {}", l.label(*u));
        }
    }
    let par = compute_parallelism(t, thread, unroll, screg)?;
    for (st, q) in &par.lo {
        let _ = writeln!(s, "  lo-parallel {}#{} {}", st.target, st.index, q);
    }
    for (a, b) in &par.bo {
        let _ = writeln!(s, "  bo-parallel {a} {b}");
    }
    for (a, b) in &par.uo {
        let _ = writeln!(s, "  uo-parallel {a} {b}");
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn thread(src: &str) -> Thread {
        parse_program(src).unwrap().threads.remove(0)
    }

    #[test]
    fn if_yields_two_arms() {
        let t = thread("{ init: x = 0 }\nthread { {* init lo: true *} c: r1 := x; if {* c lo: true *} b: r1 = 1 then {* b_t lo: true *} d: r2 := x fi }");
        let ps: Vec<String> = so_paths(&t, 0, 3).unwrap().iter().map(|p| render_path(p)).collect();
        assert_eq!(ps, vec!["init c b_t d post", "init c b_f post"]);
    }

    #[test]
    fn do_until_unrolls() {
        let t = thread("{ init: x = 0 }\nthread { do {* init lo: true *} c: r1 := x until b: r1 = 1 }");
        let ps = so_paths(&t, 0, 2).unwrap();
        assert_eq!(ps.len(), 3);
        assert_eq!(render_path(&ps[2]), "init c b_f c b_f c b_t post");
    }

    #[test]
    fn recency_selects_loop_back_disjunct() {
        let t = thread("{ init: x = 0 }\nthread { do {* init lo: true *} | {* c lo: true *} c: r1 := x until b: r1 = 1 }");
        let knots = knot_map(&t);
        let ps = so_paths(&t, 0, 1).unwrap();
        let l = lace_path(&ps[1], &knots);
        let froms: Vec<&str> = l.edges.iter().map(|e| l.label(e.from)).collect();
        assert_eq!(froms, vec!["init", "c"]);
    }

    #[test]
    fn mp_sender_lo_parallelism() {
        let t = thread("{ init: x = 0 }\nthread { {* init lo: true *} a: msg := 1; {* init lo: true *} b: flag := 1 }");
        let par = compute_parallelism(&t, 0, 3, false).unwrap();
        let lo: Vec<(String, String)> = par.lo.iter().map(|(s, q)| (s.target.clone(), q.clone())).collect();
        assert_eq!(lo, vec![("a".into(), "b".into()), ("b".into(), "a".into())]);
        assert!(par.bo.contains(&("a".into(), "b".into())));
        assert!(par.uo.contains(&("a".into(), "a".into())));
    }

    #[test]
    fn ordered_thread_has_no_lo_parallelism() {
        let t = thread("{ init: x = 0 }\nthread { {* init lo: true *} c: r1 := flag; {* c lo: true *} d: r2 := msg }");
        let par = compute_parallelism(&t, 0, 3, false).unwrap();
        assert!(par.lo.is_empty());
    }

    #[test]
    fn bo_chain_orders_writes() {
        let t = thread("{ init: x = 0 }\nthread { {* init lo: true *} a: msg := 1; {* a bo: B(msg = 1) *} b: flag := 1 }");
        let par = compute_parallelism(&t, 0, 3, false).unwrap();
        assert!(par.bo.is_empty());
        assert!(par.uo.contains(&("a".into(), "b".into())));
    }

    #[test]
    fn go_knot_elaboration_uses_sat() {
        let t = thread("{ init: y = 0 }\nthread { {* init lo: true *} c: r1 := y; {* c go: r1 = 42 *} d: x := 1 }");
        let k = t.component("d").unwrap().knot.as_ref();
        let p = precondition_from_knot(k, None);
        assert_eq!(p.elaboration.to_string(), "sat(r1 = 42)");
        assert_eq!(p.interference.to_string(), "r1 = 42");
        assert_eq!(precondition_from_knot(None, None).elaboration, Expr::tt());
    }
}
