//! Brute-force semantics on tiny grids.
//!
//! Evaluates assertions directly over explicit value tables (no solver
//! involved) and decides bounded validity by enumerating every model. Used
//! to test the SMT embedding, never to produce verdicts.

use crate::assertion::{Accent, ArithOp, CmpOp, Expr, Modality, Quant};
use crate::smt::embed::reg_name;
use crate::smt::sorts::{infer, Key, Sort, SortEnv};
use crate::smt::{grid_for, Grid};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Refuse enumerations larger than this.
pub const MAX_MODELS: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Bool(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} models exceed the enumeration cap")]
    TooLarge(u64),
    #[error("unsupported in the oracle: {0}")]
    Unsupported(String),
    #[error("sort error: {0}")]
    Sort(String),
}

#[derive(Clone, Debug)]
pub struct OracleConfig {
    /// Integer values range over 0..=max_value.
    pub max_value: i64,
    /// Number of instants from himin to now inclusive.
    pub instants: usize,
    pub cvs: BTreeSet<String>,
    pub sorts: SortEnv,
    /// Overrides the grid chosen from the formula.
    pub grid: Option<Grid>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_value: 2, instants: 3, cvs: BTreeSet::new(), sorts: SortEnv::default(), grid: None }
    }
}

impl OracleConfig {
    pub fn himin(&self, grid: Grid) -> i64 {
        grid.now - (self.instants as i64 - 1)
    }
}

/// One finite model of the thread x instant theory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub grid: Grid,
    pub himin: i64,
    pub hat_i: i64,
    pub dhat_i: i64,
    /// bev at each instant from himin.
    pub bev: Vec<bool>,
    /// Per variable: values indexed [thread][instant - himin].
    pub vals: BTreeMap<String, Vec<Vec<Value>>>,
    /// Registers and free logicals by embedded name.
    pub consts: BTreeMap<String, Value>,
    /// Coherence orders as sets of (earlier, later) integer pairs.
    pub co: BTreeMap<String, BTreeSet<(i64, i64)>>,
    pub cvs: BTreeSet<String>,
    pub max_value: i64,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "himin = {}, hatI = {}, dhatI = {}", self.himin, self.hat_i, self.dhat_i)?;
        let bev: Vec<String> =
            self.bev.iter().enumerate().filter(|(_, b)| **b).map(|(k, _)| (self.himin + k as i64).to_string()).collect();
        writeln!(f, "bev at {}", bev.join(","))?;
        for (k, v) in &self.consts {
            writeln!(f, "{k} = {v}")?;
        }
        for (x, rows) in &self.vals {
            for (t, row) in rows.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(f, "{x}[{t}] = {}", cells.join(" "))?;
            }
        }
        for (x, pairs) in &self.co {
            let ps: Vec<String> = pairs.iter().map(|(a, b)| format!("{a}<{b}")).collect();
            writeln!(f, "co_{x} = {{{}}}", ps.join(", "))?;
        }
        Ok(())
    }
}

type Env = Vec<(String, Value)>;

impl Model {
    fn val(&self, x: &str, t: usize, i: i64) -> Result<Value, OracleError> {
        let rows = self.vals.get(x).ok_or_else(|| OracleError::Unsupported(format!("unknown variable {x}")))?;
        let k = i - self.himin;
        if t >= rows.len() || k < 0 || k as usize >= rows[t].len() {
            return Err(OracleError::Unsupported(format!("{x} at ({t},{i}) outside the grid")));
        }
        Ok(rows[t][k as usize])
    }

    /// Truth of `e` in thread `t` at instant `i`.
    pub fn eval(&self, e: &Expr, t: usize, i: i64) -> Result<bool, OracleError> {
        self.holds(e, t, i, &mut Vec::new())
    }

    fn holds(&self, e: &Expr, t: usize, i: i64, env: &mut Env) -> Result<bool, OracleError> {
        Ok(match e {
            Expr::Bool(b) => *b,
            Expr::Var(..) | Expr::Reg(_) | Expr::Logical(_) => match self.term(e, t, i, env)? {
                Value::Bool(b) => b,
                Value::Int(_) => return Err(OracleError::Sort(format!("{e} is not boolean"))),
            },
            Expr::Cmp(op, a, b) => {
                let x = self.term(a, t, i, env)?;
                let y = self.term(b, t, i, env)?;
                match (op, x, y) {
                    (CmpOp::Eq, x, y) => x == y,
                    (CmpOp::Ne, x, y) => x != y,
                    (op, Value::Int(x), Value::Int(y)) => match op {
                        CmpOp::Lt => x < y,
                        CmpOp::Le => x <= y,
                        CmpOp::Gt => x > y,
                        _ => x >= y,
                    },
                    _ => return Err(OracleError::Sort(format!("ordering on booleans in {e}"))),
                }
            }
            Expr::Not(a) => !self.holds(a, t, i, env)?,
            Expr::And(xs) => {
                for x in xs {
                    if !self.holds(x, t, i, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            Expr::Or(xs) => {
                for x in xs {
                    if self.holds(x, t, i, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            Expr::Implies(a, b) => !self.holds(a, t, i, env)? || self.holds(b, t, i, env)?,
            Expr::Iff(a, b) => self.holds(a, t, i, env)? == self.holds(b, t, i, env)?,
            Expr::Quant(q, vs, body) => self.quant(*q, vs, body, t, i, env)?,
            Expr::Since(a, b) => self.since(a, Some(b), t, i, env)?,
            Expr::Modal(Modality::B, a) => self.since(a, None, t, i, env)?,
            Expr::Modal(Modality::U, a) => {
                let fa = Expr::modal(Modality::Fandw, (**a).clone());
                self.since(&fa, None, t, i, env)?
            }
            Expr::Modal(Modality::Sofar, a) => {
                let fa = Expr::modal(Modality::Fandw, (**a).clone());
                for j in self.himin..=i {
                    if !self.holds(&fa, t, j, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            Expr::Modal(Modality::Ouat, a) => {
                for j in self.himin..=i {
                    if self.holds(a, t, j, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            Expr::Modal(Modality::Fandw, a) => {
                if self.grid.now == 1 && t == 0 && i == 1 {
                    self.holds(a, 0, 1, env)?
                } else {
                    for u in 0..self.grid.tn {
                        if !self.holds(a, u, i, env)? {
                            return Ok(false);
                        }
                    }
                    true
                }
            }
            Expr::Shift(acc, a) => {
                let (u, j) = self.point(*acc, t, i);
                self.holds(a, u, j, env)?
            }
            Expr::AtThread(a, n) => self.holds(a, *n, 0, env)?,
            Expr::Coh(x, a, b) => {
                let (Value::Int(p), Value::Int(q)) = (self.term(a, t, i, env)?, self.term(b, t, i, env)?) else {
                    return Err(OracleError::Unsupported("coherence on booleans".into()));
                };
                self.co.get(x).is_some_and(|s| s.contains(&(p, q)))
            }
            Expr::Cv(x) => self.cvs.contains(x),
            Expr::Sat(_) | Expr::Int(_) | Expr::Tuple(_) | Expr::Proj(..) | Expr::Neg(_) | Expr::Arith(..) => {
                return Err(OracleError::Unsupported(e.to_string()))
            }
        })
    }

    fn point(&self, acc: Accent, t: usize, i: i64) -> (usize, i64) {
        match acc {
            Accent::Plain => (t, i),
            Accent::Hook => (0, 0),
            Accent::Hat | Accent::Tw => (1, self.hat_i),
            Accent::DHat | Accent::DTw => (2, self.dhat_i),
        }
    }

    fn since(&self, a: &Expr, b: Option<&Expr>, t: usize, i: i64, env: &mut Env) -> Result<bool, OracleError> {
        // Scan back from i while `a` holds; succeed at the first `b`.
        for j in (self.himin..=i).rev() {
            if !self.holds(a, t, j, env)? {
                return Ok(false);
            }
            let q = match b {
                None => self.bev[(j - self.himin) as usize],
                Some(b) => self.holds(b, t, j, env)?,
            };
            if q {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn quant(&self, q: Quant, vs: &[String], body: &Expr, t: usize, i: i64, env: &mut Env) -> Result<bool, OracleError> {
        let Some((v, rest)) = vs.split_first() else {
            return self.holds(body, t, i, env);
        };
        let domain: Vec<Value> = match self.logical_sort(v, body) {
            Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Sort::Int => (0..=self.max_value).map(Value::Int).collect(),
            Sort::Tuple(_) => return Err(OracleError::Unsupported("tuple logicals".into())),
        };
        for d in domain {
            env.push((v.clone(), d));
            let r = self.quant(q, rest, body, t, i, env);
            env.pop();
            let r = r?;
            match q {
                Quant::Exists if r => return Ok(true),
                Quant::Forall if !r => return Ok(false),
                _ => {}
            }
        }
        Ok(q == Quant::Forall)
    }

    fn logical_sort(&self, v: &str, body: &Expr) -> Sort {
        infer(&[body], &SortEnv::default()).map(|env| env.of(&Key::Logical(v.to_string()))).unwrap_or(Sort::Int)
    }

    fn term(&self, e: &Expr, t: usize, i: i64, env: &mut Env) -> Result<Value, OracleError> {
        Ok(match e {
            Expr::Int(n) => Value::Int(*n),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Var(x, acc) => {
                let (u, j) = self.point(*acc, t, i);
                self.val(x, u, j)?
            }
            Expr::Reg(r) => *self
                .consts
                .get(&reg_name(r))
                .ok_or_else(|| OracleError::Unsupported(format!("unknown register {r}")))?,
            Expr::Logical(v) => match env.iter().rev().find(|(n, _)| n == v) {
                Some((_, val)) => *val,
                None => *self
                    .consts
                    .get(&format!("L_{v}"))
                    .ok_or_else(|| OracleError::Unsupported(format!("unknown logical {v}")))?,
            },
            Expr::Neg(a) => match self.term(a, t, i, env)? {
                Value::Int(n) => Value::Int(-n),
                _ => return Err(OracleError::Sort(format!("negating {a}"))),
            },
            Expr::Arith(op, a, b) => {
                let (Value::Int(x), Value::Int(y)) = (self.term(a, t, i, env)?, self.term(b, t, i, env)?) else {
                    return Err(OracleError::Sort(format!("arithmetic on booleans in {e}")));
                };
                Value::Int(match op {
                    ArithOp::Add => x + y,
                    ArithOp::Sub => x - y,
                    ArithOp::Mul => x * y,
                    ArithOp::Div | ArithOp::Mod if y == 0 => {
                        return Err(OracleError::Unsupported("division by zero".into()))
                    }
                    ArithOp::Div => x.div_euclid(y),
                    ArithOp::Mod => x.rem_euclid(y),
                })
            }
            Expr::Tuple(_) | Expr::Proj(..) => return Err(OracleError::Unsupported("tuples".into())),
            _ => Value::Bool(self.holds(e, t, i, env)?),
        })
    }
}

/// Outcome of bounded validity checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Valid,
    Counter(Box<Model>),
}

/// One enumeration slot: a position in the model and its domain size.
enum Slot {
    HatI,
    DHatI,
    Bev(usize),
    Val(String, usize, usize, Sort),
    Const(String, Sort),
    Co(String),
}

/// Decides validity of `e` over all models within the bounds.
pub fn check_validity(e: &Expr, cfg: &OracleConfig) -> Result<OracleVerdict, OracleError> {
    let grid = cfg.grid.unwrap_or_else(|| grid_for(e));
    let himin = cfg.himin(grid);
    let n_inst = cfg.instants;
    // hatI and dhatI lie strictly between himin and 0.
    if grid.now == 1 && himin >= -1 {
        return Err(OracleError::Unsupported("need an instant strictly between himin and 0".into()));
    }
    let env = infer(&[e], &cfg.sorts).map_err(OracleError::Sort)?;
    let mut vars = BTreeSet::new();
    let mut consts = BTreeMap::new();
    let mut cohs = BTreeSet::new();
    collect(e, &env, &mut vars, &mut consts, &mut cohs, &mut Vec::new());

    let mut slots = Vec::new();
    let negatives = (himin + 1..0).count() as u64;
    if grid.now == 1 {
        slots.push((Slot::HatI, negatives));
        if grid.tn == 3 {
            slots.push((Slot::DHatI, negatives));
        }
    }
    for k in 1..n_inst {
        slots.push((Slot::Bev(k), 2));
    }
    let dom = |s: &Sort| -> Result<u64, OracleError> {
        match s {
            Sort::Int => Ok(cfg.max_value as u64 + 1),
            Sort::Bool => Ok(2),
            Sort::Tuple(_) => Err(OracleError::Unsupported("tuples".into())),
        }
    };
    for x in &vars {
        let s = env.var(x);
        for t in 0..grid.tn {
            for k in 0..n_inst {
                slots.push((Slot::Val(x.clone(), t, k, s.clone()), dom(&s)?));
            }
        }
    }
    for (c, s) in &consts {
        slots.push((Slot::Const(c.clone(), s.clone()), dom(s)?));
    }
    let orders = strict_orders(cfg.max_value);
    for x in &cohs {
        slots.push((Slot::Co(x.clone()), orders.len() as u64));
    }
    let total = slots.iter().try_fold(1u64, |acc, (_, d)| acc.checked_mul(*d)).unwrap_or(u64::MAX);
    if total > MAX_MODELS {
        return Err(OracleError::TooLarge(total));
    }

    let mut m = Model {
        grid,
        himin,
        hat_i: -1,
        dhat_i: -1,
        bev: vec![false; n_inst],
        vals: vars.iter().map(|x| (x.clone(), vec![vec![Value::Int(0); n_inst]; grid.tn])).collect(),
        consts: BTreeMap::new(),
        co: BTreeMap::new(),
        cvs: cfg.cvs.clone(),
        max_value: cfg.max_value,
    };
    m.bev[0] = true;
    let mut digits = vec![0u64; slots.len()];
    loop {
        for ((slot, _), d) in slots.iter().zip(&digits) {
            let d = *d;
            match slot {
                Slot::HatI => m.hat_i = himin + 1 + d as i64,
                Slot::DHatI => m.dhat_i = himin + 1 + d as i64,
                Slot::Bev(k) => m.bev[*k] = d == 1,
                Slot::Val(x, t, k, s) => m.vals.get_mut(x).unwrap()[*t][*k] = value(s, d),
                Slot::Const(c, s) => {
                    m.consts.insert(c.clone(), value(s, d));
                }
                Slot::Co(x) => {
                    m.co.insert(x.clone(), orders[d as usize].clone());
                }
            }
        }
        if coherence_ok(&m) && !m.eval(e, 0, grid.now)? {
            return Ok(OracleVerdict::Counter(Box::new(m)));
        }
        // Odometer increment.
        let mut k = 0;
        loop {
            if k == digits.len() {
                return Ok(OracleVerdict::Valid);
            }
            digits[k] += 1;
            if digits[k] < slots[k].1 {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

fn value(s: &Sort, d: u64) -> Value {
    match s {
        Sort::Bool => Value::Bool(d == 1),
        _ => Value::Int(d as i64),
    }
}

fn collect(
    e: &Expr,
    env: &SortEnv,
    vars: &mut BTreeSet<String>,
    consts: &mut BTreeMap<String, Sort>,
    cohs: &mut BTreeSet<String>,
    bound: &mut Vec<String>,
) {
    match e {
        Expr::Var(x, _) => {
            vars.insert(x.clone());
        }
        Expr::Reg(r) => {
            consts.insert(reg_name(r), env.of(&Key::Reg(r.name.clone(), r.thread)));
        }
        Expr::Logical(v) if !bound.contains(v) => {
            consts.insert(format!("L_{v}"), env.of(&Key::Logical(v.clone())));
        }
        Expr::Coh(x, ..) => {
            cohs.insert(x.clone());
        }
        _ => {}
    }
    if let Expr::Quant(_, vs, body) = e {
        let k = bound.len();
        bound.extend(vs.iter().cloned());
        collect(body, env, vars, consts, cohs, bound);
        bound.truncate(k);
        return;
    }
    for c in e.children() {
        collect(c, env, vars, consts, cohs, bound);
    }
}

/// All strict partial orders on {0..=max}.
fn strict_orders(max: i64) -> Vec<BTreeSet<(i64, i64)>> {
    let pairs: Vec<(i64, i64)> =
        (0..=max).flat_map(|a| (0..=max).filter(move |b| *b != a).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let rel: BTreeSet<(i64, i64)> =
            pairs.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, p)| *p).collect();
        let antisym = rel.iter().all(|(a, b)| !rel.contains(&(*b, *a)));
        let trans = rel.iter().all(|(a, b)| rel.iter().filter(|(c, _)| c == b).all(|(_, d)| rel.contains(&(*a, *d))));
        if antisym && trans {
            out.push(rel);
        }
    }
    out
}

/// The observed-coherence axiom: successive distinct values of a variable
/// in one thread are coherence-ordered.
fn coherence_ok(m: &Model) -> bool {
    for (x, rel) in &m.co {
        let Some(rows) = m.vals.get(x) else { continue };
        for row in rows {
            let upto = (m.grid.now - m.himin) as usize;
            for j in 0..=upto {
                for i in j..=upto {
                    if let (Value::Int(a), Value::Int(b)) = (row[j], row[i]) {
                        if a != b && !rel.contains(&(a, b)) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_assertion;

    fn valid(s: &str) -> bool {
        let e = parse_assertion(s).unwrap();
        matches!(check_validity(&e, &OracleConfig::default()).unwrap(), OracleVerdict::Valid)
    }

    #[test]
    fn basic_verdicts() {
        assert!(valid("x = 1 => x = 1"));
        assert!(!valid("ouat(x = 1) => x = 1"));
        assert!(valid("(x = 1 since y = 1) since z = 1 <=> x = 1 since ((x = 1 since y = 1) /\\ z = 1)"));
        assert!(valid("sofar(x = 1) => x = 1"));
    }

    #[test]
    fn single_thread_u_is_b() {
        let e = parse_assertion("U(x = 1) <=> B(x = 1)").unwrap();
        let one = OracleConfig { grid: Some(Grid { tn: 1, now: 0 }), ..OracleConfig::default() };
        assert_eq!(check_validity(&e, &one).unwrap(), OracleVerdict::Valid);
        assert!(!valid("U(x = 1) <=> B(x = 1)"));
    }

    #[test]
    fn strict_orders_on_three_elements() {
        assert_eq!(strict_orders(2).len(), 19);
    }
}
