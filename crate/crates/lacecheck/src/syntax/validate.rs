//! Structural checks on parsed programs and the auxiliary discipline.

use super::ast::*;
use super::FrontendError;
use crate::assertion::{classify_name, is_aux_name, Expr, NameClass};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashSet};

pub(crate) fn check_structure(p: &Program) -> Result<(), FrontendError> {
    for (ti, t) in p.threads.iter().enumerate() {
        let mut seen = HashSet::new();
        let mut controls = HashSet::new();
        for c in t.controls() {
            controls.insert(c.label.clone());
        }
        let labels: Vec<(String, Pos)> = t
            .components()
            .iter()
            .map(|c| (c.label.clone(), c.pos))
            .chain(t.controls().iter().map(|c| (c.label.clone(), c.pos)))
            .collect();
        for (l, pos) in &labels {
            if l == "init" || l == "post" || !seen.insert(l.clone()) {
                return Err(FrontendError::DuplicateLabel { thread: ti, label: l.clone(), pos: *pos });
            }
        }
        for (_, k) in t.knots() {
            for s in k.stitches() {
                let ok = if s.source.label == "init" {
                    s.source.arm.is_none()
                } else if s.source.arm.is_some() {
                    controls.contains(&s.source.label)
                } else {
                    seen.contains(&s.source.label)
                };
                if !ok {
                    return Err(FrontendError::UnresolvedSource {
                        thread: ti,
                        source_label: s.source.to_string(),
                        pos: s.pos,
                    });
                }
            }
        }
        for c in t.components() {
            if let Cmd::Assign(a) = &c.cmd {
                let kind = a.kind().ok_or_else(|| FrontendError::Malformed {
                    msg: format!("ill-formed assignment in `{}`: expressions may not read variables", c.label),
                    pos: c.pos,
                })?;
                check_assign_naming(a, &kind, c.pos)?;
                if c.intfpre.is_some() && !matches!(kind, AssignKind::Write(_)) {
                    return Err(FrontendError::Malformed {
                        msg: format!("interference precondition on `{}`, which writes no variable", c.label),
                        pos: c.pos,
                    });
                }
            } else if c.intfpre.is_some() {
                return Err(FrontendError::Malformed {
                    msg: format!("interference precondition on `{}`, which is not an assignment", c.label),
                    pos: c.pos,
                });
            }
        }
        for c in t.controls() {
            if c.cond.mentions_variables() {
                return Err(FrontendError::Malformed {
                    msg: format!("control expression `{}` mentions a variable", c.label),
                    pos: c.pos,
                });
            }
        }
        for i in t.guar.iter().chain(t.rely.iter()).flatten() {
            let kind = i.assign.kind().ok_or_else(|| FrontendError::Malformed {
                msg: format!("ill-formed interference assignment `{}`", super::pretty::assign_to_string(&i.assign)),
                pos: t.pos,
            })?;
            if !matches!(kind, AssignKind::Write(_)) {
                return Err(FrontendError::Malformed {
                    msg: "interference must assign variables".to_string(),
                    pos: t.pos,
                });
            }
            check_assign_naming(&i.assign, &kind, t.pos)?;
        }
    }
    Ok(())
}

fn check_assign_naming(a: &Assign, kind: &AssignKind, pos: Pos) -> Result<(), FrontendError> {
    if let AssignKind::Write(pairs) = kind {
        let regular = pairs.iter().filter(|(v, _)| !is_aux_name(v)).count();
        if regular > 1 {
            return Err(FrontendError::AuxNaming {
                msg: format!(
                    "composite write `{}` assigns more than one regular variable; extra targets must be named aux...",
                    super::pretty::assign_to_string(a)
                ),
                pos,
            });
        }
    }
    Ok(())
}

/// Which of the five auxiliary conditions a violation breaks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuxViolation {
    pub condition: u8,
    pub thread: usize,
    pub label: String,
    pub message: String,
}

fn aux_regs(e: &Expr) -> Vec<String> {
    e.registers().into_iter().filter(|r| classify_name(&r.name) == NameClass::AuxRegister).map(|r| r.name).collect()
}

/// A command is auxiliary when everything it assigns is auxiliary.
pub fn is_aux_command(c: &Component) -> bool {
    match &c.cmd {
        Cmd::Assign(a) => a.targets.iter().all(|t| match t {
            Target::Var(n) | Target::Reg(n) => is_aux_name(n),
            Target::Discard => true,
        }),
        _ => false,
    }
}

/// Checks the five conditions for sound use of auxiliaries.
pub fn validate_aux_discipline(p: &Program) -> Vec<AuxViolation> {
    let mut out = Vec::new();
    for (ti, t) in p.threads.iter().enumerate() {
        let mut v = |condition: u8, label: &str, message: String| {
            out.push(AuxViolation { condition, thread: ti, label: label.to_string(), message })
        };
        for c in t.components() {
            let Cmd::Assign(a) = &c.cmd else { continue };
            match a.kind() {
                Some(AssignKind::Write(pairs)) => {
                    for (var, e) in &pairs {
                        // An extended write's first component is the regular part.
                        let regular_part = match e {
                            Expr::Tuple(xs) if !is_aux_name(var) => xs.first().cloned(),
                            _ if !is_aux_name(var) => Some(e.clone()),
                            _ => None,
                        };
                        if let Some(r) = regular_part {
                            if let Some(x) = aux_regs(&r).first() {
                                v(1, &c.label, format!("regular variable {var} is assigned from auxiliary register {x}"));
                            }
                        }
                    }
                }
                Some(AssignKind::Calc(pairs)) => {
                    for (reg, e) in &pairs {
                        if !is_aux_name(reg) {
                            if let Some(x) = aux_regs(e).first() {
                                v(1, &c.label, format!("regular register {reg} is assigned from auxiliary register {x}"));
                            }
                        }
                    }
                }
                Some(AssignKind::Read { var, regs }) => {
                    for (reg, comp) in &regs {
                        let aux_source = is_aux_name(&var) || comp.map_or(false, |k| k > 0);
                        if aux_source && !is_aux_name(reg) {
                            v(2, &c.label, format!("regular register {reg} receives an auxiliary value from {var}"));
                        }
                    }
                }
                None => {}
            }
        }
        for c in t.controls() {
            if let Some(x) = aux_regs(&c.cond).first() {
                v(3, &c.label, format!("control expression mentions auxiliary register {x}"));
            }
        }

        // Conditions 4 and 5 concern auxiliary-to-regular constraints.
        let comps = t.components();
        let aux: BTreeSet<String> = comps.iter().filter(|c| is_aux_command(c)).map(|c| c.label.clone()).collect();
        let mut preds: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (target, k) in t.knots() {
            for s in k.stitches() {
                if s.ordering == Ordering::Go {
                    continue;
                }
                preds.entry(target.clone()).or_default().insert(s.source.label.clone());
            }
        }
        for (target, k) in t.knots() {
            if aux.contains(&target) {
                continue;
            }
            for s in k.stitches() {
                if !aux.contains(&s.source.label) {
                    continue;
                }
                let mentions_regular = s.embroidery.variables().iter().any(|x| !is_aux_name(x));
                if mentions_regular {
                    v(
                        5,
                        &target,
                        format!("embroidery on auxiliary constraint {}->{} mentions a regular variable", s.source, target),
                    );
                }
                for p in regular_predecessors(&s.source.label, &preds, &aux) {
                    // init precedes every command on every path.
                    if p != "init" && !regular_path(&p, &target, &preds, &aux) {
                        v(
                            4,
                            &target,
                            format!(
                                "constraint {}->{} orders {} before {} with no regular lacing to match",
                                s.source, target, p, target
                            ),
                        );
                    }
                }
            }
        }
    }
    out
}

fn regular_predecessors(
    label: &str,
    preds: &BTreeMap<String, BTreeSet<String>>,
    aux: &BTreeSet<String>,
) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack = vec![label.to_string()];
    let mut seen = BTreeSet::new();
    while let Some(l) = stack.pop() {
        if !seen.insert(l.clone()) {
            continue;
        }
        for p in preds.get(&l).into_iter().flatten() {
            if aux.contains(p) {
                stack.push(p.clone());
            } else {
                out.insert(p.clone());
            }
        }
    }
    out
}

/// Is there a chain of constraints from `from` to `to` avoiding auxiliary
/// commands?
fn regular_path(from: &str, to: &str, preds: &BTreeMap<String, BTreeSet<String>>, aux: &BTreeSet<String>) -> bool {
    let mut stack = vec![to.to_string()];
    let mut seen = BTreeSet::new();
    while let Some(l) = stack.pop() {
        if !seen.insert(l.clone()) {
            continue;
        }
        for p in preds.get(&l).into_iter().flatten() {
            if p == from {
                return true;
            }
            if !aux.contains(p) {
                stack.push(p.clone());
            }
        }
    }
    false
}
