//! Assertions and expressions of the logic.
//!
//! Program expressions and assertions share one term language: an
//! assignment's right-hand side is an `Expr` just like an embroidery. Sorts
//! (integer, boolean, tuple) are inferred per query by `smt::sorts`.

pub mod accent;
pub mod down;
pub mod restrict;
pub mod rewrite;
pub mod sp;

use std::collections::BTreeSet;
use std::fmt;

/// Where a variable occurrence (or a whole formula) is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Accent {
    Plain,
    /// Pre-assignment state, written `x'`.
    Hook,
    Hat,
    DHat,
    Tw,
    DTw,
}

impl Accent {
    pub fn suffix(self) -> &'static str {
        match self {
            Accent::Plain => "",
            Accent::Hook => "'",
            Accent::Hat => "^",
            Accent::DHat => "^^",
            Accent::Tw => "~",
            Accent::DTw => "~~",
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Accent::Plain => "",
            Accent::Hook => "hook",
            Accent::Hat => "hat",
            Accent::DHat => "dhat",
            Accent::Tw => "tw",
            Accent::DTw => "dtw",
        }
    }

    pub fn is_double(self) -> bool {
        matches!(self, Accent::DHat | Accent::DTw)
    }

    pub fn is_hat(self) -> bool {
        matches!(self, Accent::Hat | Accent::DHat)
    }

    pub fn is_twiddle(self) -> bool {
        matches!(self, Accent::Tw | Accent::DTw)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modality {
    B,
    U,
    Sofar,
    Ouat,
    Fandw,
}

impl Modality {
    pub fn name(self) -> &'static str {
        match self {
            Modality::B => "B",
            Modality::U => "U",
            Modality::Sofar => "sofar",
            Modality::Ouat => "ouat",
            Modality::Fandw => "Fandw",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
            ArithOp::Mod => "%",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quant {
    Exists,
    Forall,
}

/// A register occurrence. `primes` counts hooks (`r'` is 1); `thread` is set
/// for thread-qualified registers in final assertions, `(1:r1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reg {
    pub name: String,
    pub primes: u32,
    pub thread: Option<usize>,
}

impl Reg {
    pub fn new(name: impl Into<String>) -> Reg {
        Reg { name: name.into(), primes: 0, thread: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Bool(bool),
    Int(i64),
    Var(String, Accent),
    Reg(Reg),
    Logical(String),
    Tuple(Vec<Expr>),
    Proj(Box<Expr>, usize),
    Neg(Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
    Quant(Quant, Vec<String>, Box<Expr>),
    Since(Box<Expr>, Box<Expr>),
    Modal(Modality, Box<Expr>),
    /// Whole-formula accent: the body is evaluated at the accent's point.
    Shift(Accent, Box<Expr>),
    /// `P @@ n`: P in thread n (final-assertion checking).
    AtThread(Box<Expr>, usize),
    /// Coherence order `x_c(A, B)`.
    Coh(String, Box<Expr>, Box<Expr>),
    Cv(String),
    Sat(Box<Expr>),
}

pub type Assertion = Expr;

/// Which class a source name belongs to, decided by its spelling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NameClass {
    Logical,
    Register,
    AuxRegister,
    Variable,
    AuxVariable,
}

pub fn classify_name(name: &str) -> NameClass {
    let first = name.chars().next().unwrap_or('_');
    if first.is_ascii_uppercase() {
        NameClass::Logical
    } else if name.starts_with("raux") {
        NameClass::AuxRegister
    } else if name.starts_with('r') {
        NameClass::Register
    } else if name.starts_with("aux") {
        NameClass::AuxVariable
    } else {
        NameClass::Variable
    }
}

pub fn is_aux_name(name: &str) -> bool {
    matches!(classify_name(name), NameClass::AuxRegister | NameClass::AuxVariable)
}

impl Expr {
    pub fn tt() -> Expr {
        Expr::Bool(true)
    }

    pub fn ff() -> Expr {
        Expr::Bool(false)
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string(), Accent::Plain)
    }

    pub fn reg(name: &str) -> Expr {
        Expr::Reg(Reg::new(name))
    }

    pub fn int(n: i64) -> Expr {
        Expr::Int(n)
    }

    pub fn eq(a: Expr, b: Expr) -> Expr {
        Expr::Cmp(CmpOp::Eq, Box::new(a), Box::new(b))
    }

    pub fn ne(a: Expr, b: Expr) -> Expr {
        Expr::Cmp(CmpOp::Ne, Box::new(a), Box::new(b))
    }

    pub fn not(a: Expr) -> Expr {
        match a {
            Expr::Bool(b) => Expr::Bool(!b),
            a => Expr::Not(Box::new(a)),
        }
    }

    pub fn implies(a: Expr, b: Expr) -> Expr {
        Expr::Implies(Box::new(a), Box::new(b))
    }

    pub fn modal(m: Modality, a: Expr) -> Expr {
        Expr::Modal(m, Box::new(a))
    }

    pub fn since(a: Expr, b: Expr) -> Expr {
        Expr::Since(Box::new(a), Box::new(b))
    }

    pub fn shift(acc: Accent, a: Expr) -> Expr {
        Expr::Shift(acc, Box::new(a))
    }

    /// Conjunction that drops `true` conjuncts and flattens nested
    /// conjunctions.
    pub fn and(items: Vec<Expr>) -> Expr {
        let mut out = Vec::new();
        for it in items {
            match it {
                Expr::Bool(true) => {}
                Expr::And(xs) => out.extend(xs),
                x => out.push(x),
            }
        }
        match out.len() {
            0 => Expr::tt(),
            1 => out.pop().unwrap(),
            _ => Expr::And(out),
        }
    }

    pub fn or(items: Vec<Expr>) -> Expr {
        let mut out = Vec::new();
        for it in items {
            match it {
                Expr::Bool(false) => {}
                Expr::Or(xs) => out.extend(xs),
                x => out.push(x),
            }
        }
        match out.len() {
            0 => Expr::ff(),
            1 => out.pop().unwrap(),
            _ => Expr::Or(out),
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Bool(_) | Expr::Int(_) | Expr::Var(..) | Expr::Reg(_) | Expr::Logical(_) | Expr::Cv(_) => vec![],
            Expr::Tuple(xs) | Expr::And(xs) | Expr::Or(xs) => xs.iter().collect(),
            Expr::Proj(a, _)
            | Expr::Neg(a)
            | Expr::Not(a)
            | Expr::Quant(_, _, a)
            | Expr::Modal(_, a)
            | Expr::Shift(_, a)
            | Expr::AtThread(a, _)
            | Expr::Sat(a) => vec![a],
            Expr::Arith(_, a, b)
            | Expr::Cmp(_, a, b)
            | Expr::Implies(a, b)
            | Expr::Iff(a, b)
            | Expr::Since(a, b)
            | Expr::Coh(_, a, b) => vec![a, b],
        }
    }

    /// Rebuilds the node with `f` applied to each direct child.
    pub fn map_children(&self, f: &mut dyn FnMut(&Expr) -> Expr) -> Expr {
        let b = |e: &Expr, f: &mut dyn FnMut(&Expr) -> Expr| Box::new(f(e));
        match self {
            Expr::Bool(_) | Expr::Int(_) | Expr::Var(..) | Expr::Reg(_) | Expr::Logical(_) | Expr::Cv(_) => {
                self.clone()
            }
            Expr::Tuple(xs) => Expr::Tuple(xs.iter().map(|x| f(x)).collect()),
            Expr::And(xs) => Expr::And(xs.iter().map(|x| f(x)).collect()),
            Expr::Or(xs) => Expr::Or(xs.iter().map(|x| f(x)).collect()),
            Expr::Proj(a, i) => Expr::Proj(b(a, f), *i),
            Expr::Neg(a) => Expr::Neg(b(a, f)),
            Expr::Not(a) => Expr::Not(b(a, f)),
            Expr::Quant(q, vs, a) => Expr::Quant(*q, vs.clone(), b(a, f)),
            Expr::Modal(m, a) => Expr::Modal(*m, b(a, f)),
            Expr::Shift(acc, a) => Expr::Shift(*acc, b(a, f)),
            Expr::AtThread(a, n) => Expr::AtThread(b(a, f), *n),
            Expr::Sat(a) => Expr::Sat(b(a, f)),
            Expr::Arith(op, x, y) => {
                let x = b(x, f);
                Expr::Arith(*op, x, b(y, f))
            }
            Expr::Cmp(op, x, y) => {
                let x = b(x, f);
                Expr::Cmp(*op, x, b(y, f))
            }
            Expr::Implies(x, y) => {
                let x = b(x, f);
                Expr::Implies(x, b(y, f))
            }
            Expr::Iff(x, y) => {
                let x = b(x, f);
                Expr::Iff(x, b(y, f))
            }
            Expr::Since(x, y) => {
                let x = b(x, f);
                Expr::Since(x, b(y, f))
            }
            Expr::Coh(v, x, y) => {
                let x = b(x, f);
                Expr::Coh(v.clone(), x, b(y, f))
            }
        }
    }

    pub fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Plain and accented variable names occurring anywhere.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| match e {
            Expr::Var(v, _) => {
                out.insert(v.clone());
            }
            Expr::Coh(v, _, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Variables mentioned as values (coherence names excluded).
    pub fn value_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Var(v, _) = e {
                out.insert(v.clone());
            }
        });
        out
    }

    pub fn mentions_variables(&self) -> bool {
        self.any(&|e| matches!(e, Expr::Var(..)))
    }

    pub fn registers(&self) -> BTreeSet<Reg> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Reg(r) = e {
                out.insert(r.clone());
            }
        });
        out
    }

    /// Logical names that are not bound by an enclosing quantifier.
    pub fn free_logicals(&self) -> BTreeSet<String> {
        fn go(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match e {
                Expr::Logical(n) => {
                    if !bound.contains(n) {
                        out.insert(n.clone());
                    }
                }
                Expr::Quant(_, vs, body) => {
                    let k = bound.len();
                    bound.extend(vs.iter().cloned());
                    go(body, bound, out);
                    bound.truncate(k);
                }
                _ => {
                    for c in e.children() {
                        go(c, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn all_logicals(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| match e {
            Expr::Logical(n) => {
                out.insert(n.clone());
            }
            Expr::Quant(_, vs, _) => out.extend(vs.iter().cloned()),
            _ => {}
        });
        out
    }

    pub fn is_temporal(&self) -> bool {
        self.any(&|e| matches!(e, Expr::Since(..) | Expr::Modal(..)))
    }

    pub fn has_u_or_sofar(&self) -> bool {
        self.any(&|e| matches!(e, Expr::Modal(Modality::U | Modality::Sofar, _)))
    }

    pub fn has_accent(&self) -> bool {
        self.any(&|e| matches!(e, Expr::Var(_, a) | Expr::Shift(a, _) if *a != Accent::Plain))
            || self.any(&|e| matches!(e, Expr::Reg(r) if r.primes > 0))
    }

    /// Substitutes logical names (free occurrences only).
    pub fn subst_logicals(&self, map: &dyn Fn(&str) -> Option<Expr>) -> Expr {
        fn go(e: &Expr, bound: &mut Vec<String>, map: &dyn Fn(&str) -> Option<Expr>) -> Expr {
            match e {
                Expr::Logical(n) if !bound.contains(n) => map(n).unwrap_or_else(|| e.clone()),
                Expr::Quant(q, vs, body) => {
                    let k = bound.len();
                    bound.extend(vs.iter().cloned());
                    let b = go(body, bound, map);
                    bound.truncate(k);
                    Expr::Quant(*q, vs.clone(), Box::new(b))
                }
                _ => e.map_children(&mut |c| go(c, bound, map)),
            }
        }
        go(self, &mut Vec::new(), map)
    }

    /// Renames registers through `map`.
    pub fn map_registers(&self, map: &dyn Fn(&Reg) -> Expr) -> Expr {
        match self {
            Expr::Reg(r) => map(r),
            _ => self.map_children(&mut |c| c.map_registers(map)),
        }
    }

    /// Qualifies every register with a thread index (final assertions).
    pub fn qualify_registers(&self, thread: usize) -> Expr {
        self.map_registers(&|r| {
            let mut r = r.clone();
            if r.thread.is_none() {
                r.thread = Some(thread);
            }
            Expr::Reg(r)
        })
    }

    /// Canonical form for structural comparison modulo associativity and
    /// commutativity of conjunction and disjunction.
    pub fn canonical(&self) -> Expr {
        match self {
            Expr::And(_) | Expr::Or(_) => {
                let is_and = matches!(self, Expr::And(_));
                let mut flat = Vec::new();
                flatten_into(self, is_and, &mut flat);
                let mut items: Vec<Expr> = flat.iter().map(|e| e.canonical()).collect();
                items.sort();
                items.dedup();
                if items.len() == 1 {
                    items.pop().unwrap()
                } else if is_and {
                    Expr::And(items)
                } else {
                    Expr::Or(items)
                }
            }
            _ => self.map_children(&mut |c| c.canonical()),
        }
    }

    /// Structural equality modulo AC of conjunction and disjunction.
    pub fn ac_eq(&self, other: &Expr) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(|c| c.size()).sum::<usize>()
    }
}

fn flatten_into(e: &Expr, is_and: bool, out: &mut Vec<Expr>) {
    match (e, is_and) {
        (Expr::And(xs), true) | (Expr::Or(xs), false) => {
            for x in xs {
                flatten_into(x, is_and, out);
            }
        }
        _ => out.push(e.clone()),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::pretty::expr_to_string(self))
    }
}

impl fmt::Display for Reg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::pretty::reg_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_classify_by_spelling() {
        assert_eq!(classify_name("A"), NameClass::Logical);
        assert_eq!(classify_name("r1"), NameClass::Register);
        assert_eq!(classify_name("rauxN"), NameClass::AuxRegister);
        assert_eq!(classify_name("auxP"), NameClass::AuxVariable);
        assert_eq!(classify_name("msg"), NameClass::Variable);
    }

    #[test]
    fn ac_equality_ignores_order_and_nesting() {
        let a = Expr::And(vec![Expr::var("x"), Expr::And(vec![Expr::var("y"), Expr::var("z")])]);
        let b = Expr::And(vec![Expr::var("z"), Expr::var("x"), Expr::var("y")]);
        assert!(a.ac_eq(&b));
        let c = Expr::Or(vec![Expr::var("z"), Expr::var("x"), Expr::var("y")]);
        assert!(!a.ac_eq(&c));
    }

    #[test]
    fn free_logicals_respect_binders() {
        let e = Expr::Quant(
            Quant::Exists,
            vec!["A".into()],
            Box::new(Expr::eq(Expr::Logical("A".into()), Expr::Logical("B".into()))),
        );
        let free: Vec<_> = e.free_logicals().into_iter().collect();
        assert_eq!(free, vec!["B".to_string()]);
    }
}
