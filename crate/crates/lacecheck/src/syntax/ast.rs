//! Laced programs.

use crate::assertion::Expr;
use serde::Serialize;
use std::fmt;

/// Source position. Compares equal to every other position so that ASTs
/// parsed from differently laid-out text compare equal.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl Eq for Pos {}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Ordering {
    Lo,
    Bo,
    Uo,
    Go,
}

impl Ordering {
    pub fn name(self) -> &'static str {
        match self {
            Ordering::Lo => "lo",
            Ordering::Bo => "bo",
            Ordering::Uo => "uo",
            Ordering::Go => "go",
        }
    }
}

/// Names a stitch source: a component label, optionally a control
/// expression's arm (`beta_t`, `beta_f`). The special label `init` names the
/// initial assertion.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelRef {
    pub label: String,
    pub arm: Option<bool>,
}

impl LabelRef {
    pub fn plain(label: &str) -> LabelRef {
        LabelRef { label: label.to_string(), arm: None }
    }
}

impl fmt::Display for LabelRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.arm {
            None => write!(f, "{}", self.label),
            Some(true) => write!(f, "{}_t", self.label),
            Some(false) => write!(f, "{}_f", self.label),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stitch {
    pub source: LabelRef,
    pub ordering: Ordering,
    /// Optional copy of the source postcondition; accepted and ignored.
    pub sourcepost: Option<Expr>,
    pub embroidery: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Knot {
    Simple(Vec<Stitch>),
    Or(Box<Knot>, Box<Knot>),
    /// `A |> B`: A for the first instance, B for later ones.
    Iter(Box<Knot>, Box<Knot>),
}

impl Knot {
    /// The simple knots, left to right.
    pub fn simples(&self) -> Vec<&Vec<Stitch>> {
        match self {
            Knot::Simple(s) => vec![s],
            Knot::Or(a, b) | Knot::Iter(a, b) => {
                let mut v = a.simples();
                v.extend(b.simples());
                v
            }
        }
    }

    pub fn stitches(&self) -> Vec<&Stitch> {
        self.simples().into_iter().flatten().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.stitches().is_empty()
    }
}

/// Target of an assignment; `_` discards a tuple component in a read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Var(String),
    Reg(String),
    Discard,
}

impl Target {
    pub fn name(&self) -> Option<&str> {
        match self {
            Target::Var(n) | Target::Reg(n) => Some(n),
            Target::Discard => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assign {
    pub targets: Vec<Target>,
    pub exprs: Vec<Expr>,
}

/// How an assignment behaves, derived from its shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AssignKind {
    /// Variables take register/constant values, atomically.
    Write(Vec<(String, Expr)>),
    /// Registers take components of a single variable.
    Read { var: String, regs: Vec<(String, Option<usize>)> },
    /// Registers take register/constant values.
    Calc(Vec<(String, Expr)>),
}

impl Assign {
    /// Classifies the assignment; `None` if it is ill-formed (mixes
    /// variables and registers, or reads a variable inside an expression).
    pub fn kind(&self) -> Option<AssignKind> {
        let all_vars = self.targets.iter().all(|t| matches!(t, Target::Var(_)));
        let all_regs = self.targets.iter().all(|t| matches!(t, Target::Reg(_) | Target::Discard));
        if self.targets.is_empty() || self.exprs.is_empty() {
            return None;
        }
        if all_vars {
            if self.exprs.iter().any(|e| e.mentions_variables()) {
                return None;
            }
            let pairs: Vec<(String, Expr)> = if self.targets.len() == 1 {
                let e = if self.exprs.len() == 1 { self.exprs[0].clone() } else { Expr::Tuple(self.exprs.clone()) };
                vec![(self.targets[0].name().unwrap().to_string(), e)]
            } else if self.targets.len() == self.exprs.len() {
                self.targets.iter().zip(&self.exprs).map(|(t, e)| (t.name().unwrap().to_string(), e.clone())).collect()
            } else {
                return None;
            };
            return Some(AssignKind::Write(pairs));
        }
        if !all_regs {
            return None;
        }
        if self.exprs.len() == 1 {
            if let Expr::Var(v, crate::assertion::Accent::Plain) = &self.exprs[0] {
                let regs = if self.targets.len() == 1 {
                    match &self.targets[0] {
                        Target::Reg(r) => vec![(r.clone(), None)],
                        _ => return None,
                    }
                } else {
                    self.targets
                        .iter()
                        .enumerate()
                        .filter_map(|(i, t)| t.name().map(|n| (n.to_string(), Some(i))))
                        .collect()
                };
                return Some(AssignKind::Read { var: v.clone(), regs });
            }
        }
        if self.exprs.iter().any(|e| e.mentions_variables()) {
            return None;
        }
        if self.targets.iter().any(|t| matches!(t, Target::Discard)) {
            return None;
        }
        if self.targets.len() == 1 {
            let e = if self.exprs.len() == 1 { self.exprs[0].clone() } else { Expr::Tuple(self.exprs.clone()) };
            return Some(AssignKind::Calc(vec![(self.targets[0].name().unwrap().to_string(), e)]));
        }
        if self.targets.len() != self.exprs.len() {
            return None;
        }
        Some(AssignKind::Calc(
            self.targets.iter().zip(&self.exprs).map(|(t, e)| (t.name().unwrap().to_string(), e.clone())).collect(),
        ))
    }

    pub fn is_write(&self) -> bool {
        matches!(self.kind(), Some(AssignKind::Write(_)))
    }

    /// Variables written by this assignment.
    pub fn written_vars(&self) -> Vec<String> {
        match self.kind() {
            Some(AssignKind::Write(ps)) => ps.into_iter().map(|(v, _)| v).collect(),
            _ => vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cmd {
    Assign(Assign),
    Skip,
    Assert(Expr),
}

/// A labelled primitive command with its knot and optional interference
/// precondition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub knot: Option<Knot>,
    pub intfpre: Option<Expr>,
    pub label: String,
    pub cmd: Cmd,
    pub pos: Pos,
}

/// A labelled control expression with its knot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Control {
    pub knot: Option<Knot>,
    pub label: String,
    pub cond: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Cmd(Component),
    If { ctrl: Control, then_: Vec<Stmt>, else_: Option<Vec<Stmt>> },
    While { ctrl: Control, body: Vec<Stmt> },
    DoUntil { body: Vec<Stmt>, ctrl: Control },
}

/// `[A, B]. pre | x := E`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interference {
    pub binders: Vec<String>,
    pub pre: Expr,
    pub assign: Assign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thread {
    pub guar: Option<Vec<Interference>>,
    pub rely: Option<Vec<Interference>>,
    pub body: Vec<Stmt>,
    pub post: Option<Knot>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Pragmas {
    /// Sequentially consistent reading: SC stability, no in-flight checks.
    pub sc: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub pragmas: Pragmas,
    pub init: Expr,
    pub threads: Vec<Thread>,
    pub final_: Option<Expr>,
}

impl Stmt {
    pub fn visit_components<'a>(&'a self, f: &mut dyn FnMut(&'a Component)) {
        match self {
            Stmt::Cmd(c) => f(c),
            Stmt::If { then_, else_, .. } => {
                for s in then_ {
                    s.visit_components(f);
                }
                if let Some(e) = else_ {
                    for s in e {
                        s.visit_components(f);
                    }
                }
            }
            Stmt::While { body, .. } | Stmt::DoUntil { body, .. } => {
                for s in body {
                    s.visit_components(f);
                }
            }
        }
    }

    pub fn visit_controls<'a>(&'a self, f: &mut dyn FnMut(&'a Control)) {
        match self {
            Stmt::Cmd(_) => {}
            Stmt::If { ctrl, then_, else_ } => {
                f(ctrl);
                for s in then_ {
                    s.visit_controls(f);
                }
                if let Some(e) = else_ {
                    for s in e {
                        s.visit_controls(f);
                    }
                }
            }
            Stmt::While { ctrl, body } | Stmt::DoUntil { body, ctrl } => {
                f(ctrl);
                for s in body {
                    s.visit_controls(f);
                }
            }
        }
    }
}

impl Thread {
    pub fn components(&self) -> Vec<&Component> {
        let mut out = Vec::new();
        for s in &self.body {
            s.visit_components(&mut |c| out.push(c));
        }
        out
    }

    pub fn controls(&self) -> Vec<&Control> {
        let mut out = Vec::new();
        for s in &self.body {
            s.visit_controls(&mut |c| out.push(c));
        }
        out
    }

    pub fn component(&self, label: &str) -> Option<&Component> {
        self.components().into_iter().find(|c| c.label == label)
    }

    pub fn control(&self, label: &str) -> Option<&Control> {
        self.controls().into_iter().find(|c| c.label == label)
    }

    /// Every knot in the thread, with the label of its target (`post` for
    /// the thread postcondition).
    pub fn knots(&self) -> Vec<(String, &Knot)> {
        let mut out = Vec::new();
        for c in self.components() {
            if let Some(k) = &c.knot {
                out.push((c.label.clone(), k));
            }
        }
        for c in self.controls() {
            if let Some(k) = &c.knot {
                out.push((c.label.clone(), k));
            }
        }
        if let Some(k) = &self.post {
            out.push(("post".to_string(), k));
        }
        out
    }

    /// Every assertion written in the thread: embroideries, interference
    /// preconditions, guarantee and rely entries, control expressions.
    pub fn assertions(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        for (_, k) in self.knots() {
            for s in k.stitches() {
                out.push(&s.embroidery);
            }
        }
        for c in self.components() {
            if let Some(p) = &c.intfpre {
                out.push(p);
            }
            if let Cmd::Assert(p) = &c.cmd {
                out.push(p);
            }
        }
        for c in self.controls() {
            out.push(&c.cond);
        }
        out
    }
}

impl Program {
    /// Variables whose coherence order is mentioned anywhere.
    pub fn coherence_vars(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        let mut see = |e: &Expr| {
            e.visit(&mut |n| {
                if let Expr::Coh(v, _, _) | Expr::Cv(v) = n {
                    if matches!(n, Expr::Coh(..)) {
                        out.insert(v.clone());
                    }
                }
            })
        };
        see(&self.init);
        if let Some(f) = &self.final_ {
            see(f);
        }
        for t in &self.threads {
            for a in t.assertions() {
                see(a);
            }
            for i in t.guar.iter().chain(t.rely.iter()).flatten() {
                see(&i.pre);
            }
        }
        out
    }
}
