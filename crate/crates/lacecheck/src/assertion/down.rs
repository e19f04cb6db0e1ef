//! `down(P)`: the part of a thread's postcondition that other threads can
//! rely on once every thread has finished.
//!
//! Current-state atoms and coherence facts carry over. `P since Q` keeps
//! `down(P) /\ ouat(Q)`. An `ouat` survives when its body mentions at most
//! one variable; otherwise it is split across conjunctions and disjunctions.
//! B, U and sofar keep their shape. Anything else temporal is a
//! multivariate coincidence that cannot be propagated and is replaced by a
//! fresh proposition; since the result only ever appears as a hypothesis,
//! that proposition is instantiated as `true`.

use super::{CmpOp, Expr, Modality, Quant};
use serde::Serialize;

/// One rule application, for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DownStep {
    pub rule: &'static str,
    pub subformula: String,
}

pub fn down(p: &Expr) -> Expr {
    down_traced(p).0
}

pub fn down_traced(p: &Expr) -> (Expr, Vec<DownStep>) {
    let mut trace = Vec::new();
    let out = go(&nnf(p, true), &mut trace);
    (out, trace)
}

/// Negation normal form; `pos` is false under an odd number of negations.
pub fn nnf(p: &Expr, pos: bool) -> Expr {
    match p {
        Expr::Not(q) => nnf(q, !pos),
        Expr::And(xs) | Expr::Or(xs) => {
            let items = xs.iter().map(|x| nnf(x, pos)).collect();
            if matches!(p, Expr::And(_)) == pos {
                Expr::and(items)
            } else {
                Expr::or(items)
            }
        }
        Expr::Implies(a, b) => {
            if pos {
                Expr::or(vec![nnf(a, false), nnf(b, true)])
            } else {
                Expr::and(vec![nnf(a, true), nnf(b, false)])
            }
        }
        Expr::Iff(a, b) => {
            let both = Expr::and(vec![nnf(a, true), nnf(b, true)]);
            let neither = Expr::and(vec![nnf(a, false), nnf(b, false)]);
            if pos {
                Expr::or(vec![both, neither])
            } else {
                let l = Expr::and(vec![nnf(a, true), nnf(b, false)]);
                let r = Expr::and(vec![nnf(a, false), nnf(b, true)]);
                Expr::or(vec![l, r])
            }
        }
        Expr::Quant(q, vs, body) => {
            let q = if pos {
                *q
            } else if *q == Quant::Exists {
                Quant::Forall
            } else {
                Quant::Exists
            };
            Expr::Quant(q, vs.clone(), Box::new(nnf(body, pos)))
        }
        Expr::Bool(b) => Expr::Bool(*b == pos),
        Expr::Cmp(op, a, b) if !pos => {
            let op = match op {
                CmpOp::Eq => CmpOp::Ne,
                CmpOp::Ne => CmpOp::Eq,
                CmpOp::Lt => CmpOp::Ge,
                CmpOp::Le => CmpOp::Gt,
                CmpOp::Gt => CmpOp::Le,
                CmpOp::Ge => CmpOp::Lt,
            };
            Expr::Cmp(op, a.clone(), b.clone())
        }
        _ if pos => p.clone(),
        _ => Expr::not(p.clone()),
    }
}

fn go(p: &Expr, trace: &mut Vec<DownStep>) -> Expr {
    match p {
        Expr::And(xs) => Expr::and(xs.iter().map(|x| go(x, trace)).collect()),
        Expr::Or(xs) => Expr::or(xs.iter().map(|x| go(x, trace)).collect()),
        Expr::Quant(q, vs, body) => Expr::Quant(*q, vs.clone(), Box::new(go(body, trace))),
        Expr::Since(a, b) => {
            trace.push(DownStep { rule: "since", subformula: p.to_string() });
            Expr::and(vec![go(a, trace), ouat(&nnf(b, true), trace)])
        }
        Expr::Modal(Modality::Ouat, body) => ouat(&nnf(body, true), trace),
        Expr::Modal(m @ (Modality::B | Modality::U), body) => Expr::modal(*m, go(&nnf(body, true), trace)),
        Expr::Modal(Modality::Sofar, _) => p.clone(),
        _ if p.is_temporal() || matches!(p, Expr::Shift(..)) => fresh(p, trace),
        _ => p.clone(),
    }
}

fn ouat(body: &Expr, trace: &mut Vec<DownStep>) -> Expr {
    if body.variables().len() <= 1 {
        return Expr::modal(Modality::Ouat, body.clone());
    }
    match body {
        Expr::And(xs) => {
            trace.push(DownStep { rule: "ouat-and", subformula: body.to_string() });
            Expr::and(xs.iter().map(|x| ouat(x, trace)).collect())
        }
        Expr::Or(xs) => {
            trace.push(DownStep { rule: "ouat-or", subformula: body.to_string() });
            Expr::or(xs.iter().map(|x| ouat(x, trace)).collect())
        }
        Expr::Quant(Quant::Exists, vs, b) => Expr::Quant(Quant::Exists, vs.clone(), Box::new(ouat(b, trace))),
        _ => fresh(&Expr::modal(Modality::Ouat, body.clone()), trace),
    }
}

fn fresh(p: &Expr, trace: &mut Vec<DownStep>) -> Expr {
    trace.push(DownStep { rule: "fresh", subformula: p.to_string() });
    Expr::tt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_assertion;

    fn a(s: &str) -> Expr {
        parse_assertion(s).unwrap()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(down(&a("ouat(x = 0 /\\ y = 2)")), a("ouat(x = 0) /\\ ouat(y = 2)"));
        assert_eq!(down(&a("x = 1")), a("x = 1"));
        assert_eq!(down(&a("U(x = 1) since y = 1")), a("U(x = 1) /\\ ouat(y = 1)"));
    }

    #[test]
    fn negated_temporal_is_dropped() {
        let (d, trace) = down_traced(&a("x = 1 /\\ !ouat(y = 1)"));
        assert_eq!(d, a("x = 1"));
        assert_eq!(trace[0].rule, "fresh");
    }

    #[test]
    fn nnf_pushes_negation() {
        assert_eq!(nnf(&a("!(x = 1 /\\ y < 2)"), true), a("x != 1 \\/ y >= 2"));
    }
}
