//! Translation of assertions into first-order formulas over a grid of
//! threads x instants.
//!
//! A variable `x` evaluated in thread T at instant I is `val_x(T, I)`.
//! Hooked variables live at (0,0), plain ones at (0, now), hatted and
//! twiddled ones at (1, hatI), doubly accented ones at (2, dhatI). Instants
//! are integers; `himin` precedes every other instant and the boundary
//! event `bev` holds there.

use super::sorts::{Key, Sort, SortEnv};
use crate::assertion::{Accent, ArithOp, CmpOp, Expr, Modality, Quant, Reg};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Grid {
    /// Number of threads.
    pub tn: usize,
    /// The current instant: 1 if the query mentions hooks or accents.
    pub now: i64,
}

/// Chooses the grid for a query.
pub fn grid_for(e: &Expr) -> Grid {
    let mut accented = false;
    let mut double = false;
    let mut at_max: Option<usize> = None;
    let mut u_or_sofar = false;
    e.visit(&mut |n| match n {
        Expr::Var(_, a) | Expr::Shift(a, _) if *a != Accent::Plain => {
            accented = true;
            double |= a.is_double();
        }
        Expr::AtThread(_, k) => at_max = Some(at_max.map_or(*k, |m: usize| m.max(*k))),
        Expr::Modal(Modality::U | Modality::Sofar | Modality::Fandw, _) => u_or_sofar = true,
        _ => {}
    });
    if accented {
        Grid { tn: if double { 3 } else { 2 }, now: 1 }
    } else if let Some(m) = at_max {
        Grid { tn: m + 1, now: 0 }
    } else if u_or_sofar {
        Grid { tn: 2, now: 0 }
    } else {
        Grid { tn: 1, now: 0 }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EmbedError {
    #[error("sat(..) must be resolved before embedding")]
    UnresolvedSat,
    #[error("sort error: {0}")]
    Sort(String),
    #[error("cannot embed {0}")]
    Unsupported(String),
}

/// Restricts every value to {0, .., max} and fixes the history length, so
/// that the solver decides exactly the finite models the oracle enumerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_value: i64,
    pub himin: i64,
}

/// Embedding state for one query.
pub struct Embedder<'a> {
    pub grid: Grid,
    env: &'a SortEnv,
    cvs: &'a BTreeSet<String>,
    bounds: Option<Bounds>,
    counter: usize,
    /// val functions and coherence relations used, with their sorts.
    vals: BTreeMap<String, Sort>,
    cohs: BTreeMap<String, Sort>,
    consts: BTreeMap<String, &'static str>,
    bound: Vec<String>,
}

#[derive(Clone, Copy)]
struct Point<'s> {
    t: usize,
    i: &'s str,
}

fn smt_int(n: i64) -> String {
    if n < 0 {
        format!("(- {})", -n)
    } else {
        n.to_string()
    }
}

pub fn reg_name(r: &Reg) -> String {
    let mut s = format!("r_{}", r.name);
    if r.primes > 0 {
        let _ = write!(s, "_h{}", r.primes);
    }
    if let Some(t) = r.thread {
        let _ = write!(s, "_t{t}");
    }
    s
}

fn and_all(xs: Vec<String>) -> String {
    match xs.len() {
        0 => "true".into(),
        1 => xs.into_iter().next().unwrap(),
        _ => format!("(and {})", xs.join(" ")),
    }
}

fn or_all(xs: Vec<String>) -> String {
    match xs.len() {
        0 => "false".into(),
        1 => xs.into_iter().next().unwrap(),
        _ => format!("(or {})", xs.join(" ")),
    }
}

impl<'a> Embedder<'a> {
    pub fn new(grid: Grid, env: &'a SortEnv, cvs: &'a BTreeSet<String>, bounds: Option<Bounds>) -> Embedder<'a> {
        Embedder {
            grid,
            env,
            cvs,
            bounds,
            counter: 0,
            vals: BTreeMap::new(),
            cohs: BTreeMap::new(),
            consts: BTreeMap::new(),
            bound: Vec::new(),
        }
    }

    fn fresh_instant(&mut self) -> String {
        self.counter += 1;
        format!("j{}", self.counter)
    }

    /// Embeds `e` at the current point (0, now).
    pub fn embed_top(&mut self, e: &Expr) -> Result<String, EmbedError> {
        let now = self.grid.now.to_string();
        self.formula(e, Point { t: 0, i: &now })
    }

    fn formula(&mut self, e: &Expr, p: Point) -> Result<String, EmbedError> {
        Ok(match e {
            Expr::Bool(b) => b.to_string(),
            Expr::Var(..) | Expr::Reg(_) | Expr::Logical(_) | Expr::Proj(..) => {
                let ts = self.term(e, p)?;
                and_all(ts)
            }
            Expr::Cmp(op, a, b) => {
                let xs = self.term(a, p)?;
                let ys = self.term(b, p)?;
                if xs.len() != ys.len() {
                    return Err(EmbedError::Sort(format!("arity mismatch in {e}")));
                }
                match op {
                    CmpOp::Eq => and_all(xs.iter().zip(&ys).map(|(x, y)| format!("(= {x} {y})")).collect()),
                    CmpOp::Ne => format!(
                        "(not {})",
                        and_all(xs.iter().zip(&ys).map(|(x, y)| format!("(= {x} {y})")).collect())
                    ),
                    _ => format!("({} {} {})", op.symbol(), xs[0], ys[0]),
                }
            }
            Expr::Not(a) => format!("(not {})", self.formula(a, p)?),
            Expr::And(xs) => {
                let parts = xs.iter().map(|x| self.formula(x, p)).collect::<Result<Vec<_>, _>>()?;
                and_all(parts)
            }
            Expr::Or(xs) => {
                let parts = xs.iter().map(|x| self.formula(x, p)).collect::<Result<Vec<_>, _>>()?;
                or_all(parts)
            }
            Expr::Implies(a, b) => format!("(=> {} {})", self.formula(a, p)?, self.formula(b, p)?),
            Expr::Iff(a, b) => format!("(= {} {})", self.formula(a, p)?, self.formula(b, p)?),
            Expr::Quant(q, vs, body) => {
                let mut binders = Vec::new();
                let mut guards = Vec::new();
                for v in vs {
                    let sort = self.env.of(&Key::Logical(v.clone()));
                    for (k, s) in sort.flatten().iter().enumerate() {
                        let name = logical_name(v, k, sort.flatten().len());
                        binders.push(format!("({name} {})", s.smt()));
                        if let (Some(b), Sort::Int) = (self.bounds, s) {
                            guards.push(format!("(<= 0 {name} {})", b.max_value));
                        }
                    }
                    self.bound.push(v.clone());
                }
                let inner = self.formula(body, p);
                self.bound.truncate(self.bound.len() - vs.len());
                let inner = inner?;
                if binders.is_empty() {
                    return Ok(inner);
                }
                let g = and_all(guards);
                match q {
                    Quant::Exists => format!("(exists ({}) (and {g} {inner}))", binders.join(" ")),
                    Quant::Forall => format!("(forall ({}) (=> {g} {inner}))", binders.join(" ")),
                }
            }
            Expr::Since(a, b) => self.since(a, Some(b), p)?,
            Expr::Modal(Modality::B, a) => self.since(a, None, p)?,
            Expr::Modal(Modality::U, a) => {
                let fa = Expr::modal(Modality::Fandw, (**a).clone());
                self.since(&fa, None, p)?
            }
            Expr::Modal(Modality::Sofar, a) => {
                let j = self.fresh_instant();
                let fa = Expr::modal(Modality::Fandw, (**a).clone());
                let body = self.formula(&fa, Point { t: p.t, i: &j })?;
                format!("(forall (({j} Int)) (=> (and (<= himin {j}) (<= {j} {})) {body}))", p.i)
            }
            Expr::Modal(Modality::Ouat, a) => {
                let j = self.fresh_instant();
                let body = self.formula(a, Point { t: p.t, i: &j })?;
                format!("(exists (({j} Int)) (and (<= himin {j}) (<= {j} {}) {body}))", p.i)
            }
            Expr::Modal(Modality::Fandw, a) => self.fandw(a, p)?,
            Expr::Shift(acc, a) => match acc {
                Accent::Plain => self.formula(a, p)?,
                Accent::Hook => self.formula(a, Point { t: 0, i: "0" })?,
                Accent::Hat | Accent::Tw => self.formula(a, Point { t: 1, i: "hatI" })?,
                Accent::DHat | Accent::DTw => self.formula(a, Point { t: 2, i: "dhatI" })?,
            },
            Expr::AtThread(a, n) => self.formula(a, Point { t: *n, i: "0" })?,
            Expr::Coh(x, a, b) => {
                let sort = self.env.var(x);
                self.cohs.insert(x.clone(), sort);
                let mut args = self.term(a, p)?;
                args.extend(self.term(b, p)?);
                format!("(co_{x} {})", args.join(" "))
            }
            Expr::Cv(x) => self.cvs.contains(x).to_string(),
            Expr::Sat(_) => return Err(EmbedError::UnresolvedSat),
            Expr::Int(_) | Expr::Tuple(_) | Expr::Neg(_) | Expr::Arith(..) => {
                return Err(EmbedError::Unsupported(format!("{e} used as a formula")))
            }
        })
    }

    /// `a since b`; `b` defaults to the boundary event.
    fn since(&mut self, a: &Expr, b: Option<&Expr>, p: Point) -> Result<String, EmbedError> {
        let j = self.fresh_instant();
        let j2 = self.fresh_instant();
        let q = match b {
            None => format!("(bev {j})"),
            Some(b) => self.formula(b, Point { t: p.t, i: &j })?,
        };
        let pa = self.formula(a, Point { t: p.t, i: &j2 })?;
        Ok(format!(
            "(exists (({j} Int)) (and (<= himin {j}) (<= {j} {i}) {q} (forall (({j2} Int)) (=> (and (<= {j} {j2}) (<= {j2} {i})) {pa}))))",
            i = p.i
        ))
    }

    fn fandw(&mut self, a: &Expr, p: Point) -> Result<String, EmbedError> {
        let mut all = Vec::new();
        for t in 0..self.grid.tn {
            all.push(self.formula(a, Point { t, i: p.i })?);
        }
        let wide = and_all(all);
        if self.grid.now == 1 && p.t == 0 {
            if p.i == "1" {
                return self.formula(a, Point { t: 0, i: "1" });
            }
            if p.i.starts_with('j') {
                let here = self.formula(a, Point { t: 0, i: p.i })?;
                return Ok(format!("(ite (= {} 1) {here} {wide})", p.i));
            }
        }
        Ok(wide)
    }

    fn term(&mut self, e: &Expr, p: Point) -> Result<Vec<String>, EmbedError> {
        Ok(match e {
            Expr::Int(n) => vec![smt_int(*n)],
            Expr::Bool(b) => vec![b.to_string()],
            Expr::Var(x, acc) => {
                let (t, i) = match acc {
                    Accent::Plain => (p.t, p.i.to_string()),
                    Accent::Hook => (0, "0".to_string()),
                    Accent::Hat | Accent::Tw => (1, "hatI".to_string()),
                    Accent::DHat | Accent::DTw => (2, "dhatI".to_string()),
                };
                let sort = self.env.var(x);
                self.vals.insert(x.clone(), sort.clone());
                let n = sort.flatten().len();
                (0..n).map(|k| format!("({} {t} {i})", val_name(x, k, n))).collect()
            }
            Expr::Reg(r) => {
                let sort = self.env.of(&Key::Reg(r.name.clone(), r.thread));
                let flat = sort.flatten();
                let base = reg_name(r);
                let n = flat.len();
                flat.iter()
                    .enumerate()
                    .map(|(k, s)| {
                        let name = if n == 1 { base.clone() } else { format!("{base}_{k}") };
                        self.consts.insert(name.clone(), s.smt());
                        name
                    })
                    .collect()
            }
            Expr::Logical(v) => {
                let sort = self.env.of(&Key::Logical(v.clone()));
                let flat = sort.flatten();
                let n = flat.len();
                let free = !self.bound.contains(v);
                flat.iter()
                    .enumerate()
                    .map(|(k, s)| {
                        let name = logical_name(v, k, n);
                        if free {
                            self.consts.insert(name.clone(), s.smt());
                        }
                        name
                    })
                    .collect()
            }
            Expr::Tuple(xs) => {
                let mut out = Vec::new();
                for x in xs {
                    out.extend(self.term(x, p)?);
                }
                out
            }
            Expr::Proj(a, k) => {
                let xs = self.term(a, p)?;
                vec![xs.get(*k).cloned().ok_or_else(|| EmbedError::Sort(format!("projection {e}")))?]
            }
            Expr::Neg(a) => vec![format!("(- {})", self.scalar(a, p)?)],
            Expr::Arith(op, a, b) => {
                let sym = match op {
                    ArithOp::Add => "+",
                    ArithOp::Sub => "-",
                    ArithOp::Mul => "*",
                    ArithOp::Div => "div",
                    ArithOp::Mod => "mod",
                };
                vec![format!("({sym} {} {})", self.scalar(a, p)?, self.scalar(b, p)?)]
            }
            _ => vec![self.formula(e, p)?],
        })
    }

    fn scalar(&mut self, e: &Expr, p: Point) -> Result<String, EmbedError> {
        let mut xs = self.term(e, p)?;
        if xs.len() != 1 {
            return Err(EmbedError::Sort(format!("{e} is not a scalar")));
        }
        Ok(xs.pop().unwrap())
    }

    /// Terms whose values describe a countermodel: instants, registers,
    /// free logicals and every value at every grid point.
    pub fn probes(&self) -> Vec<String> {
        let mut out: Vec<String> = vec!["himin".into()];
        let accented = self.grid.now == 1;
        if accented {
            out.push("hatI".into());
        }
        if self.grid.tn == 3 && accented {
            out.push("dhatI".into());
        }
        out.extend(self.consts.keys().cloned());
        for (x, sort) in &self.vals {
            let n = sort.flatten().len();
            for k in 0..n {
                let f = val_name(x, k, n);
                for t in 0..self.grid.tn {
                    let mut instants: Vec<String> = vec!["himin".into()];
                    if accented && t == 1 {
                        instants.push("hatI".into());
                    }
                    if accented && t == 2 {
                        instants.push("dhatI".into());
                    }
                    instants.extend((0..=self.grid.now).map(|i| i.to_string()));
                    for i in instants {
                        out.push(format!("({f} {t} {i})"));
                    }
                }
            }
        }
        out
    }

    /// Declarations and background axioms for everything embedded so far.
    pub fn preamble(&self, pms: bool) -> String {
        let mut s = String::new();
        let tn = self.grid.tn;
        let now = self.grid.now;
        s.push_str("(declare-const himin Int)\n(declare-const hatI Int)\n(declare-const dhatI Int)\n");
        s.push_str("(declare-fun bev (Int) Bool)\n(assert (bev himin))\n");
        match self.bounds {
            Some(b) => {
                let _ = writeln!(s, "(assert (= himin {}))", smt_int(b.himin));
            }
            None => s.push_str("(assert (< himin 0))\n"),
        }
        s.push_str("(assert (and (< himin hatI) (< hatI 0) (< himin dhatI) (< dhatI 0)))\n");
        for (x, sort) in &self.vals {
            let flat = sort.flatten();
            for (k, c) in flat.iter().enumerate() {
                let _ = writeln!(s, "(declare-fun {} (Int Int) {})", val_name(x, k, flat.len()), c.smt());
            }
        }
        for (name, sort) in &self.consts {
            let _ = writeln!(s, "(declare-const {name} {sort})");
        }
        for (x, sort) in &self.cohs {
            let flat = sort.flatten();
            let ss: Vec<&str> = flat.iter().map(|c| c.smt()).collect();
            let _ = writeln!(s, "(declare-fun co_{x} ({} {}) Bool)", ss.join(" "), ss.join(" "));
            let vs = |p: &str| -> (String, String) {
                let names: Vec<String> = (0..flat.len()).map(|k| format!("{p}{k}")).collect();
                let binders = names.iter().zip(&ss).map(|(n, t)| format!("({n} {t})")).collect::<Vec<_>>().join(" ");
                (binders, names.join(" "))
            };
            let (ba, a) = vs("a");
            let (bb, b) = vs("b");
            let (bc, c) = vs("c");
            let _ = writeln!(s, "(assert (forall ({ba}) (not (co_{x} {a} {a}))))");
            let _ = writeln!(
                s,
                "(assert (forall ({ba} {bb} {bc}) (=> (and (co_{x} {a} {b}) (co_{x} {b} {c})) (co_{x} {a} {c}))))"
            );
            let _ = writeln!(s, "(assert (forall ({ba} {bb}) (=> (co_{x} {a} {b}) (not (co_{x} {b} {a})))))");
            if self.vals.contains_key(x) {
                let n = flat.len();
                for t in 0..tn {
                    let at = |i: &str| (0..n).map(|k| format!("({} {t} {i})", val_name(x, k, n))).collect::<Vec<_>>();
                    let (vj, vi) = (at("j"), at("i"));
                    let differ = format!(
                        "(not {})",
                        and_all(vj.iter().zip(&vi).map(|(p, q)| format!("(= {p} {q})")).collect())
                    );
                    let _ = writeln!(
                        s,
                        "(assert (forall ((j Int) (i Int)) (=> (and (<= himin j) (<= j i) (<= i {now}) {differ}) (co_{x} {} {}))))",
                        vj.join(" "),
                        vi.join(" ")
                    );
                }
            }
        }
        if pms {
            for (x, sort) in &self.vals {
                let n = sort.flatten().len();
                for k in 0..n {
                    let f = val_name(x, k, n);
                    for t in 1..tn {
                        let _ = writeln!(s, "(assert (= ({f} {t} 0) ({f} 0 0)))");
                    }
                }
            }
            // Once every write has propagated, the common value is the
            // coherence-last write.
            for (x, sort) in &self.cohs {
                if !self.vals.contains_key(x) {
                    continue;
                }
                let flat = sort.flatten();
                let n = flat.len();
                let last: Vec<String> = (0..n).map(|k| format!("({} 0 0)", val_name(x, k, n))).collect();
                let binders: Vec<String> = flat.iter().enumerate().map(|(k, c)| format!("(b{k} {})", c.smt())).collect();
                let bs: Vec<String> = (0..n).map(|k| format!("b{k}")).collect();
                let _ = writeln!(
                    s,
                    "(assert (forall ({}) (not (co_{x} {} {}))))",
                    binders.join(" "),
                    last.join(" "),
                    bs.join(" ")
                );
            }
        }
        if let Some(b) = self.bounds {
            let instants: Vec<i64> = (b.himin..=now).collect();
            for (x, sort) in &self.vals {
                let flat = sort.flatten();
                for (k, c) in flat.iter().enumerate() {
                    if *c != Sort::Int {
                        continue;
                    }
                    let f = val_name(x, k, flat.len());
                    for t in 0..tn {
                        for i in &instants {
                            let _ = writeln!(s, "(assert (<= 0 ({f} {t} {}) {}))", smt_int(*i), b.max_value);
                        }
                    }
                }
            }
            for (name, sort) in &self.consts {
                if *sort == "Int" {
                    let _ = writeln!(s, "(assert (<= 0 {name} {}))", b.max_value);
                }
            }
        }
        s
    }
}

pub fn val_name(x: &str, k: usize, n: usize) -> String {
    if n == 1 {
        format!("val_{x}")
    } else {
        format!("val_{x}_{k}")
    }
}

pub fn logical_name(v: &str, k: usize, n: usize) -> String {
    if n == 1 {
        format!("L_{v}")
    } else {
        format!("L_{v}_{k}")
    }
}
