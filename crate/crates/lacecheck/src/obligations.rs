//! Proof obligations of a laced program.
//!
//! Per thread: inheritance of every stitch from its source's postcondition,
//! lo stability of embroidery against internal assignments, external
//! stability (EXT, UEXT) against the rely, in-flight stability (BO, UO) of
//! interference preconditions, and inclusion of each write's interference
//! in the guarantee. Per program: rely formation, unique-write side
//! conditions for coherence, structural checks, and the PMS implication.

use crate::assertion::accent::{dhat, dtw, hat, tw};
use crate::assertion::down::down_traced;
use crate::assertion::restrict::{restrict_bu, restrict_init};
use crate::assertion::sp::sp_assign;
use crate::assertion::{Expr, Modality, Quant};
use crate::lacing::{self, LacingError, Parallelism, Preconditions, StitchId};
use crate::syntax::ast::{Assign, Cmd, Interference, LabelRef, Ordering, Program, Thread};
use crate::syntax::pretty::{assign_to_string, expr_to_string};
use crate::syntax::validate::validate_aux_discipline;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Kind {
    Inherit,
    Lo,
    Ext,
    Uext,
    Bo,
    Uo,
    GuarInclude,
    RelyInclude,
    Coverage,
    Aux,
    UniqueWrite,
    BuRestrict,
    Pms,
}

impl Kind {
    pub const ALL: [Kind; 13] = [
        Kind::Inherit,
        Kind::Lo,
        Kind::Ext,
        Kind::Uext,
        Kind::Bo,
        Kind::Uo,
        Kind::GuarInclude,
        Kind::RelyInclude,
        Kind::Coverage,
        Kind::Aux,
        Kind::UniqueWrite,
        Kind::BuRestrict,
        Kind::Pms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Inherit => "INHERIT",
            Kind::Lo => "LO",
            Kind::Ext => "EXT",
            Kind::Uext => "UEXT",
            Kind::Bo => "BO",
            Kind::Uo => "UO",
            Kind::GuarInclude => "GUAR_INCLUDE",
            Kind::RelyInclude => "RELY_INCLUDE",
            Kind::Coverage => "COVERAGE",
            Kind::Aux => "AUX",
            Kind::UniqueWrite => "UNIQUE_WRITE",
            Kind::BuRestrict => "BU_RESTRICT",
            Kind::Pms => "PMS",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A verdict fixed at generation time, without the solver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "by", content = "reason", rename_all = "lowercase")]
pub enum Decided {
    /// The assigned names do not occur in the assertion.
    Frame(String),
    /// A structural rule is broken.
    Structural(String),
    /// The obligation could not be formed.
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub kind: Kind,
    /// `t0:init->a`, `t1:c`, `t1:rely`, `final`, `init`.
    pub location: String,
    /// The interference or assignment the assertion is checked against.
    pub against: Option<String>,
    pub hypothesis: Expr,
    pub conclusion: Expr,
    /// Logical names standing for quotiented registers and interference
    /// binders; universally bound.
    pub quotient: Vec<String>,
    pub trail: String,
    /// Add the axiom that all threads agree on final values.
    pub pms: bool,
    pub decided: Option<Decided>,
}

impl Obligation {
    fn new(kind: Kind, location: String, hypothesis: Expr, conclusion: Expr, trail: String) -> Obligation {
        Obligation {
            kind,
            location,
            against: None,
            hypothesis,
            conclusion,
            quotient: vec![],
            trail,
            pms: false,
            decided: None,
        }
    }

    fn structural(kind: Kind, location: String, reason: String) -> Obligation {
        let mut o = Obligation::new(kind, location, Expr::tt(), Expr::ff(), reason.clone());
        o.decided = Some(Decided::Structural(reason));
        o
    }

    fn against(mut self, a: impl Into<String>) -> Obligation {
        self.against = Some(a.into());
        self
    }

    /// `hypothesis => conclusion`.
    pub fn goal(&self) -> Expr {
        Expr::implies(self.hypothesis.clone(), self.conclusion.clone())
    }

    /// Location with the interference it is checked against.
    pub fn site(&self) -> String {
        match &self.against {
            Some(a) => format!("{} vs {a}", self.location),
            None => self.location.clone(),
        }
    }
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {} => {}", self.kind, self.site(), self.hypothesis, self.conclusion)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    /// Register assignments are lo parallel only when so-between.
    pub screg: bool,
    /// Generate the PMS obligation when a final assertion is present.
    pub pms: bool,
    pub unroll: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { screg: false, pms: true, unroll: 3 }
    }
}

/// Every `sat(..)` term in elaboration preconditions, for resolution by the
/// solver before generation.
pub fn sat_terms(p: &Program) -> Vec<Expr> {
    let mut out = BTreeSet::new();
    for t in &p.threads {
        for (_, k) in t.knots() {
            let pre = lacing::precondition_from_knot(Some(k), None);
            pre.elaboration.visit(&mut |e| {
                if let Expr::Sat(b) = e {
                    out.insert((**b).clone());
                }
            });
        }
    }
    out.into_iter().collect()
}

/// Replaces `sat(P)` by its resolved truth value where known.
fn resolve_sat(e: &Expr, sat: &BTreeMap<Expr, bool>) -> Expr {
    match e {
        Expr::Sat(b) => match sat.get(b.as_ref()) {
            Some(v) => Expr::Bool(*v),
            None => e.clone(),
        },
        _ => e.map_children(&mut |c| resolve_sat(c, sat)),
    }
}

/// Registers other than `keep` become logical names `Q<reg>`, recorded in
/// `names`.
fn quotient_regs(e: &Expr, keep: &BTreeSet<String>, names: &mut BTreeSet<String>) -> Expr {
    let moved = |r: &crate::assertion::Reg| r.thread.is_none() && r.primes == 0 && !keep.contains(&r.name);
    for r in e.registers() {
        if moved(&r) {
            names.insert(format!("Q{}", r.name));
        }
    }
    e.map_registers(&|r| if moved(r) { Expr::Logical(format!("Q{}", r.name)) } else { Expr::Reg(r.clone()) })
}

fn map_assign(a: &Assign, f: &dyn Fn(&Expr) -> Expr) -> Assign {
    Assign { targets: a.targets.clone(), exprs: a.exprs.iter().map(f).collect() }
}

/// Names assigned by `a`: variables for writes, registers otherwise.
fn assigned_names(a: &Assign) -> BTreeSet<String> {
    a.targets.iter().filter_map(|t| t.name().map(str::to_string)).collect()
}

fn mentions(p: &Expr, names: &BTreeSet<String>) -> bool {
    let mut hit = false;
    p.visit(&mut |e| match e {
        Expr::Var(v, _) | Expr::Coh(v, _, _) | Expr::Cv(v) if names.contains(v) => hit = true,
        Expr::Reg(r) if names.contains(&r.name) => hit = true,
        _ => {}
    });
    hit
}

/// True if a B or U occurs under an odd number of negations.
fn negative_modal(p: &Expr) -> bool {
    fn go(e: &Expr, pos: bool) -> bool {
        match e {
            Expr::Modal(Modality::B | Modality::U, b) => !pos || go(b, pos),
            Expr::Not(a) => go(a, !pos),
            Expr::Implies(a, b) => go(a, !pos) || go(b, pos),
            Expr::Iff(a, b) => go(a, pos) || go(a, !pos) || go(b, pos) || go(b, !pos),
            _ => e.children().into_iter().any(|c| go(c, pos)),
        }
    }
    go(p, true)
}

/// Removes the outer modalities `ms` from positive positions.
fn strip(p: &Expr, ms: &[Modality]) -> Expr {
    match p {
        Expr::Modal(m, b) if ms.contains(m) => strip(b, ms),
        Expr::And(_) | Expr::Or(_) | Expr::Quant(..) => p.map_children(&mut |c| strip(c, ms)),
        Expr::Implies(a, b) => Expr::Implies(a.clone(), Box::new(strip(b, ms))),
        _ => p.clone(),
    }
}

/// A rely or guarantee interference prepared for use in another thread:
/// binders renamed apart, registers qualified by the source thread.
#[derive(Clone, Debug)]
struct Intf {
    name: String,
    thread: usize,
    pre: Expr,
    assign: Assign,
    binders: Vec<String>,
}

impl Intf {
    fn from(i: &Interference, thread: usize, name: String, tag: &str) -> Intf {
        let ren: BTreeMap<String, String> = i.binders.iter().map(|b| (b.clone(), format!("{b}_{tag}"))).collect();
        let f = |e: &Expr| {
            e.subst_logicals(&|n| ren.get(n).map(|m| Expr::Logical(m.clone()))).qualify_registers(thread)
        };
        Intf {
            name,
            thread,
            pre: f(&i.pre),
            assign: map_assign(&i.assign, &f),
            binders: ren.values().cloned().collect(),
        }
    }

    fn written(&self) -> BTreeSet<String> {
        self.assign.written_vars().into_iter().collect()
    }

    fn render(&self) -> String {
        format!("<{} | {}>", self.pre, assign_to_string(&self.assign))
    }
}

struct ThreadInfo<'a> {
    t: &'a Thread,
    pre: BTreeMap<String, Preconditions>,
    par: Parallelism,
    mentioned: BTreeSet<String>,
}

fn resolve_pre(p: Preconditions, sat: &BTreeMap<Expr, bool>) -> Preconditions {
    Preconditions {
        elaboration: resolve_sat(&p.elaboration, sat),
        overall: p.overall,
        interference: p.interference,
    }
}

fn thread_info<'a>(
    t: &'a Thread,
    k: usize,
    opts: &Options,
    sat: &BTreeMap<Expr, bool>,
) -> Result<ThreadInfo<'a>, LacingError> {
    let mut pre = BTreeMap::new();
    for c in t.components() {
        pre.insert(
            c.label.clone(),
            resolve_pre(lacing::precondition_from_knot(c.knot.as_ref(), c.intfpre.as_ref()), sat),
        );
    }
    for c in t.controls() {
        pre.insert(c.label.clone(), resolve_pre(lacing::precondition_from_knot(c.knot.as_ref(), None), sat));
    }
    pre.insert("post".into(), resolve_pre(lacing::precondition_from_knot(t.post.as_ref(), None), sat));
    let par = lacing::compute_parallelism(t, k, opts.unroll, opts.screg)?;
    let mut mentioned = BTreeSet::new();
    for a in t.assertions() {
        mentioned.extend(a.variables());
    }
    for c in t.components() {
        if let Cmd::Assign(a) = &c.cmd {
            for e in &a.exprs {
                mentioned.extend(e.variables());
            }
            mentioned.extend(a.written_vars());
        }
    }
    for g in t.guar.iter().chain(t.rely.iter()).flatten() {
        mentioned.extend(g.pre.variables());
        mentioned.extend(g.assign.written_vars());
    }
    Ok(ThreadInfo { t, pre, par, mentioned })
}

/// Generates every obligation of `p`. `sat` maps the bodies of `sat(..)`
/// terms (see [`sat_terms`]) to their satisfiability.
pub fn generate(p: &Program, opts: &Options, sat: &BTreeMap<Expr, bool>) -> Result<Vec<Obligation>, LacingError> {
    let mut infos = Vec::new();
    for (k, t) in p.threads.iter().enumerate() {
        infos.push(thread_info(t, k, opts, sat)?);
    }
    let mut out = Vec::new();
    structural(p, opts, &mut out)?;
    for (k, info) in infos.iter().enumerate() {
        let g = Gen { p, k, info, sc: p.pragmas.sc };
        g.inheritance(&mut out);
        g.lo_stability(&mut out);
        let rely = rely_for(p, k, &infos, &mut out);
        g.external(&rely, &mut out);
        g.in_flight(&mut out);
        g.guarantee(&mut out);
    }
    unique_writes(p, &infos, &mut out);
    if opts.pms {
        if let Some(f) = &p.final_ {
            out.push(pms(p, &infos, f));
        }
    }
    Ok(out)
}

fn structural(p: &Program, opts: &Options, out: &mut Vec<Obligation>) -> Result<(), LacingError> {
    for (k, t) in p.threads.iter().enumerate() {
        for u in lacing::check_constraint_coverage(t, k, opts.unroll)? {
            out.push(Obligation::structural(
                Kind::Coverage,
                format!("t{k}:{}", u.label),
                format!("no disjunct of the knot of {} is available on path {}", u.label, u.path),
            ));
        }
    }
    for v in validate_aux_discipline(p) {
        out.push(Obligation::structural(
            Kind::Aux,
            format!("t{}:{}", v.thread, v.label),
            format!("condition {}: {}", v.condition, v.message),
        ));
    }
    if let Err(bad) = restrict_init(&p.init) {
        out.push(Obligation::structural(
            Kind::BuRestrict,
            "init".into(),
            format!("multivariate coincidence {bad} in the initial assertion"),
        ));
    }
    for (k, t) in p.threads.iter().enumerate() {
        let mut sites: Vec<(String, &Expr)> = Vec::new();
        for (target, knot) in t.knots() {
            for s in knot.stitches() {
                sites.push((format!("t{k}:{}->{target}", s.source), &s.embroidery));
            }
        }
        for c in t.components() {
            if let Some(i) = &c.intfpre {
                sites.push((format!("t{k}:{}", c.label), i));
            }
        }
        for (n, g) in t.guar.iter().flatten().enumerate() {
            sites.push((format!("t{k}:guar{n}"), &g.pre));
        }
        for (n, g) in t.rely.iter().flatten().enumerate() {
            sites.push((format!("t{k}:rely{n}"), &g.pre));
        }
        for (loc, e) in sites {
            if let Err(bad) = restrict_bu(e) {
                out.push(Obligation::structural(
                    Kind::BuRestrict,
                    loc,
                    format!("multivariate coincidence {bad} inside B or U"),
                ));
            }
        }
    }
    Ok(())
}

struct Gen<'a> {
    p: &'a Program,
    k: usize,
    info: &'a ThreadInfo<'a>,
    sc: bool,
}

fn sp_ob(kind: Kind, loc: String, hyp: Expr, a: &Assign, concl: Expr, trail: String) -> Obligation {
    match sp_assign(&hyp, a) {
        Ok(h) => Obligation::new(kind, loc, h, concl, trail),
        Err(e) => {
            let mut o = Obligation::new(kind, loc, hyp, concl, trail);
            o.decided = Some(Decided::Error(e.to_string()));
            o
        }
    }
}

/// Marks `o` valid by frame when `p` does not mention what `a` assigns.
fn frame(mut o: Obligation, p: &Expr, a: &Assign) -> Obligation {
    let names = assigned_names(a);
    if o.decided.is_none() && !mentions(p, &names) && !negative_modal(p) {
        o.decided = Some(Decided::Frame(format!(
            "{} not mentioned",
            names.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    o
}

impl Gen<'_> {
    fn loc_stitch(&self, src: &LabelRef, target: &str) -> String {
        format!("t{}:{src}->{target}", self.k)
    }

    fn stitch(&self, id: &StitchId) -> Option<&crate::syntax::ast::Stitch> {
        let knots = lacing::knot_map(self.info.t);
        knots.get(&id.target).copied().flatten().and_then(|k| k.stitches().get(id.index).copied())
    }

    /// Postcondition of a stitch source, with its derivation.
    fn post_of(&self, src: &LabelRef) -> Result<(Expr, String), String> {
        if src.label == "init" {
            return Ok((Expr::modal(Modality::Sofar, self.p.init.clone()), "sofar(init)".into()));
        }
        let pre = &self.info.pre[&src.label];
        let elab = pre.elaboration.clone();
        if let Some(c) = self.info.t.component(&src.label) {
            return match &c.cmd {
                Cmd::Assign(a) => sp_assign(&elab, a)
                    .map(|e| (e, format!("sp(pre({}), {})", src.label, assign_to_string(a))))
                    .map_err(|e| e.to_string()),
                Cmd::Skip => Ok((elab, format!("pre({})", src.label))),
                Cmd::Assert(x) => Ok((Expr::and(vec![elab, x.clone()]), format!("pre({}) /\\ {x}", src.label))),
            };
        }
        let c = self.info.t.control(&src.label).ok_or_else(|| format!("unknown label {}", src.label))?;
        Ok(match src.arm {
            Some(true) => (Expr::and(vec![elab, c.cond.clone()]), format!("pre({}) /\\ {}", c.label, c.cond)),
            Some(false) => (
                Expr::and(vec![elab, Expr::not(c.cond.clone())]),
                format!("pre({}) /\\ ~({})", c.label, c.cond),
            ),
            None => (elab, format!("pre({})", c.label)),
        })
    }

    fn inheritance(&self, out: &mut Vec<Obligation>) {
        let k = self.k;
        for (target, knot) in self.info.t.knots() {
            for s in knot.stitches() {
                let loc = self.loc_stitch(&s.source, &target);
                let concl = match s.ordering {
                    Ordering::Bo => strip(&s.embroidery, &[Modality::B]),
                    Ordering::Uo => strip(&s.embroidery, &[Modality::B, Modality::U]),
                    _ => s.embroidery.clone(),
                };
                match self.post_of(&s.source) {
                    Ok((post, why)) => out.push(Obligation::new(
                        Kind::Inherit,
                        loc,
                        post,
                        concl,
                        format!("{why} => {} embroidery", s.ordering.name()),
                    )),
                    Err(e) => {
                        let mut o = Obligation::new(Kind::Inherit, loc, Expr::tt(), concl, e.clone());
                        o.decided = Some(Decided::Error(e));
                        out.push(o);
                    }
                }
            }
        }
        for c in self.info.t.components() {
            let pre = &self.info.pre[&c.label];
            if let Cmd::Assert(a) = &c.cmd {
                out.push(Obligation::new(
                    Kind::Inherit,
                    format!("t{k}:{}", c.label),
                    pre.elaboration.clone(),
                    a.clone(),
                    "assertion implied by its precondition".into(),
                ));
            }
            if let Some(i) = &c.intfpre {
                out.push(Obligation::new(
                    Kind::Inherit,
                    format!("t{k}:{}[*]", c.label),
                    pre.overall.clone(),
                    i.clone(),
                    "interference precondition implied by the precondition".into(),
                ));
            }
        }
    }

    fn lo_stability(&self, out: &mut Vec<Obligation>) {
        for (id, q) in &self.info.par.lo {
            let Some(st) = self.stitch(id) else { continue };
            let Some(c) = self.info.t.component(q) else { continue };
            let Cmd::Assign(a) = &c.cmd else { continue };
            let p = &st.embroidery;
            let keep = if a.is_write() { BTreeSet::new() } else { assigned_names(a) };
            let mut names = BTreeSet::new();
            let qpre = quotient_regs(&self.info.pre[q].elaboration, &keep, &mut names);
            let qa = map_assign(a, &|e| quotient_regs(e, &keep, &mut BTreeSet::new()));
            for e in &a.exprs {
                quotient_regs(e, &keep, &mut names);
            }
            let loc = self.loc_stitch(&st.source, &id.target);
            let mut o = sp_ob(
                Kind::Lo,
                loc,
                Expr::and(vec![p.clone(), qpre]),
                &qa,
                p.clone(),
                format!("sp(P /\\ pre({q}), {}) => P", assign_to_string(a)),
            )
            .against(q.clone());
            o.quotient = names.into_iter().collect();
            out.push(frame(o, p, a));
        }
    }

    fn embroideries(&self) -> Vec<(String, Expr)> {
        let mut v = Vec::new();
        for (target, knot) in self.info.t.knots() {
            for s in knot.stitches() {
                v.push((self.loc_stitch(&s.source, &target), s.embroidery.clone()));
            }
        }
        v
    }

    fn external(&self, rely: &[Intf], out: &mut Vec<Obligation>) {
        for (loc, p) in self.embroideries() {
            for r in rely {
                let (hyp, trail) = if self.sc {
                    (Expr::and(vec![p.clone(), r.pre.clone()]), "sp(P /\\ Q, x := E) => P")
                } else {
                    (Expr::and(vec![p.clone(), hat(&r.pre)]), "sp(P /\\ hat(Q), x := E) => P")
                };
                let mut o = sp_ob(Kind::Ext, loc.clone(), hyp, &r.assign, p.clone(), format!("{trail} against {}", r.render()))
                    .against(r.name.clone());
                o.quotient = r.binders.clone();
                out.push(frame(o, &p, &r.assign));
                if !self.sc && p.has_u_or_sofar() {
                    let mut o = sp_ob(
                        Kind::Uext,
                        loc.clone(),
                        Expr::and(vec![tw(&p), r.pre.clone()]),
                        &r.assign,
                        tw(&p),
                        format!("sp(tw(P) /\\ Q, x := E) => tw(P) against {}", r.render()),
                    )
                    .against(r.name.clone());
                    o.quotient = r.binders.clone();
                    out.push(frame(o, &p, &r.assign));
                }
            }
        }
    }

    fn own_write(&self, label: &str) -> Option<(Expr, Assign)> {
        let c = self.info.t.component(label)?;
        match &c.cmd {
            Cmd::Assign(a) if a.is_write() => Some((self.info.pre[label].interference.clone(), a.clone())),
            _ => None,
        }
    }

    fn in_flight(&self, out: &mut Vec<Obligation>) {
        if self.sc {
            return;
        }
        let k = self.k;
        for (a, b) in &self.info.par.bo {
            let (Some((pa, _)), Some((qb, ab))) = (self.own_write(a), self.own_write(b)) else { continue };
            let mut names = BTreeSet::new();
            let qb = quotient_regs(&qb, &BTreeSet::new(), &mut names);
            let ab2 = map_assign(&ab, &|e| quotient_regs(e, &BTreeSet::new(), &mut BTreeSet::new()));
            for e in &ab.exprs {
                quotient_regs(e, &BTreeSet::new(), &mut names);
            }
            let mut o = sp_ob(
                Kind::Bo,
                format!("t{k}:{a}"),
                Expr::and(vec![hat(&pa), dhat(&qb)]),
                &ab2,
                hat(&pa),
                format!("sp(hat(intf({a})) /\\ dhat(intf({b})), {}) => hat(intf({a}))", assign_to_string(&ab)),
            )
            .against(b.clone());
            o.quotient = names.into_iter().collect();
            out.push(frame(o, &pa, &ab));
        }
        for (a, b) in &self.info.par.uo {
            let (Some((pa, _)), Some((qb, ab))) = (self.own_write(a), self.own_write(b)) else { continue };
            if !pa.has_u_or_sofar() {
                continue;
            }
            let mut names = BTreeSet::new();
            let qb = quotient_regs(&qb, &BTreeSet::new(), &mut names);
            let ab2 = map_assign(&ab, &|e| quotient_regs(e, &BTreeSet::new(), &mut BTreeSet::new()));
            for e in &ab.exprs {
                quotient_regs(e, &BTreeSet::new(), &mut names);
            }
            let mut o = sp_ob(
                Kind::Uo,
                format!("t{k}:{a}"),
                Expr::and(vec![tw(&pa), dtw(&qb)]),
                &ab2,
                tw(&pa),
                format!("sp(tw(intf({a})) /\\ dtw(intf({b})), {}) => tw(intf({a}))", assign_to_string(&ab)),
            )
            .against(b.clone());
            o.quotient = names.into_iter().collect();
            out.push(frame(o, &pa, &ab));
        }
    }

    fn guarantee(&self, out: &mut Vec<Obligation>) {
        let k = self.k;
        let guar: Vec<Intf> = self
            .info
            .t
            .guar
            .iter()
            .flatten()
            .enumerate()
            .map(|(n, g)| {
                let tag = format!("g{n}");
                Intf {
                    name: format!("t{k}.g{n}"),
                    thread: k,
                    pre: rename_binders(&g.pre, &g.binders, &tag),
                    assign: map_assign(&g.assign, &|e| rename_binders(e, &g.binders, &tag)),
                    binders: g.binders.iter().map(|b| format!("{b}_{tag}")).collect(),
                }
            })
            .collect();
        for c in self.info.t.components() {
            let Cmd::Assign(a) = &c.cmd else { continue };
            if !a.is_write() {
                continue;
            }
            let pre = self.info.pre[&c.label].interference.clone();
            let (hyp, concl, q) = inclusion(&pre, a, &guar);
            let mut o = Obligation::new(
                Kind::GuarInclude,
                format!("t{k}:{}", c.label),
                hyp,
                concl,
                format!("<{pre} | {}> included in the guarantee", assign_to_string(a)),
            );
            o.quotient = q;
            out.push(o);
        }
    }
}

fn rename_binders(e: &Expr, binders: &[String], tag: &str) -> Expr {
    e.subst_logicals(&|n| binders.iter().any(|b| b == n).then(|| Expr::Logical(format!("{n}_{tag}"))))
}

/// Effect of `<pre | a>` implied by no change or some entry of `entries`.
fn inclusion(pre: &Expr, a: &Assign, entries: &[Intf]) -> (Expr, Expr, Vec<String>) {
    let pairs = match a.kind() {
        Some(crate::syntax::ast::AssignKind::Write(p)) => p,
        _ => vec![],
    };
    let nu = |v: &str| Expr::Logical(format!("New_{v}"));
    let mut hyp = vec![pre.clone()];
    for (v, e) in &pairs {
        hyp.push(Expr::eq(nu(v), e.clone()));
    }
    let targets: BTreeSet<&String> = pairs.iter().map(|(v, _)| v).collect();
    let mut alts = vec![Expr::and(pairs.iter().map(|(v, _)| Expr::eq(nu(v), Expr::var(v))).collect())];
    for g in entries {
        let gp = match g.assign.kind() {
            Some(crate::syntax::ast::AssignKind::Write(p)) => p,
            _ => continue,
        };
        let gt: BTreeSet<&String> = gp.iter().map(|(v, _)| v).collect();
        if gt != targets {
            continue;
        }
        let mut parts = vec![g.pre.clone()];
        for (v, e) in &gp {
            parts.push(Expr::eq(nu(v), e.clone()));
        }
        let body = Expr::and(parts);
        alts.push(if g.binders.is_empty() { body } else { Expr::Quant(Quant::Exists, g.binders.clone(), Box::new(body)) });
    }
    let q = pairs.iter().map(|(v, _)| format!("New_{v}")).collect();
    (Expr::and(hyp), Expr::or(alts), q)
}

/// Interference of thread `k`'s rely, with merge obligations.
fn rely_for(p: &Program, k: usize, infos: &[ThreadInfo], out: &mut Vec<Obligation>) -> Vec<Intf> {
    let mentioned = &infos[k].mentioned;
    let relevant = |i: &Intf| i.written().iter().any(|v| mentioned.contains(v));
    let mut merged = Vec::new();
    for (j, t) in p.threads.iter().enumerate() {
        if j == k {
            continue;
        }
        for (n, g) in t.guar.iter().flatten().enumerate() {
            let i = Intf::from(g, j, format!("t{j}.g{n}"), &format!("t{j}g{n}"));
            if relevant(&i) {
                merged.push(i);
            }
        }
    }
    let rely = match &p.threads[k].rely {
        None => merged,
        Some(declared) => {
            let declared: Vec<Intf> = declared
                .iter()
                .enumerate()
                .map(|(n, r)| {
                    let mut i = Intf::from(r, k, format!("t{k}.r{n}"), &format!("r{n}"));
                    i.thread = usize::MAX;
                    i
                })
                .collect();
            for g in &merged {
                let (hyp, concl, mut q) = inclusion(&g.pre, &g.assign, &declared);
                q.extend(g.binders.iter().cloned());
                let mut o = Obligation::new(
                    Kind::RelyInclude,
                    format!("t{k}:rely"),
                    hyp,
                    concl,
                    format!("{} included in the declared rely", g.render()),
                )
                .against(g.name.clone());
                o.quotient = q;
                out.push(o);
            }
            declared
        }
    };
    if !p.pragmas.sc {
        merge_obligations(k, &rely, out);
    }
    rely
}

/// BO and UO stability between rely interferences from different threads.
fn merge_obligations(k: usize, rely: &[Intf], out: &mut Vec<Obligation>) {
    for a in rely {
        for b in rely {
            let cross = a.thread != b.thread || a.thread == usize::MAX;
            if !cross || std::ptr::eq(a, b) {
                continue;
            }
            let mut quotient: Vec<String> = a.binders.clone();
            quotient.extend(b.binders.iter().cloned());
            if a.written().is_disjoint(&b.written()) {
                let mut o = sp_ob(
                    Kind::Bo,
                    format!("t{k}:rely"),
                    Expr::and(vec![hat(&a.pre), dhat(&b.pre)]),
                    &b.assign,
                    hat(&a.pre),
                    format!("{} in flight against {}", a.render(), b.render()),
                )
                .against(format!("{}/{}", a.name, b.name));
                o.quotient = quotient.clone();
                out.push(frame(o, &a.pre, &b.assign));
            }
            if a.pre.has_u_or_sofar() {
                let mut o = sp_ob(
                    Kind::Uo,
                    format!("t{k}:rely"),
                    Expr::and(vec![tw(&a.pre), dtw(&b.pre)]),
                    &b.assign,
                    tw(&a.pre),
                    format!("{} in flight against {}", a.render(), b.render()),
                )
                .against(format!("{}/{}", a.name, b.name));
                o.quotient = quotient;
                out.push(frame(o, &a.pre, &b.assign));
            }
        }
    }
}

fn unique_writes(p: &Program, infos: &[ThreadInfo], out: &mut Vec<Obligation>) {
    let cvs = p.coherence_vars();
    if cvs.is_empty() {
        return;
    }
    for (k, info) in infos.iter().enumerate() {
        for c in info.t.components() {
            let Cmd::Assign(a) = &c.cmd else { continue };
            let Some(crate::syntax::ast::AssignKind::Write(pairs)) = a.kind() else { continue };
            for (v, e) in pairs {
                if !cvs.contains(&v) {
                    continue;
                }
                out.push(
                    Obligation::new(
                        Kind::UniqueWrite,
                        format!("t{k}:{}", c.label),
                        info.pre[&c.label].elaboration.clone(),
                        Expr::modal(Modality::Sofar, Expr::ne(Expr::var(&v), e.clone())),
                        format!("write to coherence-ordered {v} is unique"),
                    )
                    .against(v.clone()),
                );
            }
        }
    }
}

fn pms(p: &Program, infos: &[ThreadInfo], f: &Expr) -> Obligation {
    let n = p.threads.len();
    let mut parts = Vec::new();
    let mut downs = Vec::new();
    let mut rules = BTreeSet::new();
    for (i, info) in infos.iter().enumerate() {
        let post = info.pre["post"].elaboration.qualify_registers(i);
        let (d, steps) = down_traced(&post);
        rules.extend(steps.into_iter().map(|s| s.rule));
        parts.push(Expr::AtThread(Box::new(post), i));
        downs.push(Expr::AtThread(Box::new(d), n));
    }
    parts.extend(downs);
    let mut o = Obligation::new(
        Kind::Pms,
        "final".into(),
        Expr::and(parts),
        Expr::AtThread(Box::new(f.clone()), n),
        format!(
            "(/\\ post_i @@ i) /\\ (/\\ down(post_i) @@ {n}) => final @@ {n}; down rules: {}",
            if rules.is_empty() { "none".to_string() } else { rules.into_iter().collect::<Vec<_>>().join(", ") }
        ),
    );
    o.pms = true;
    o
}

/// One line per obligation: kind, site and rendered implication.
pub fn dump(obs: &[Obligation]) -> String {
    let mut s = String::new();
    for o in obs {
        s.push_str(&format!(
            "{} {}: {} => {}\n",
            o.kind,
            o.site(),
            expr_to_string(&o.hypothesis),
            expr_to_string(&o.conclusion)
        ));
    }
    s
}
