//! Strongest postconditions of primitive commands.
//!
//! A variable write `x := E` produces `P[x\x'] /\ x = E /\ y' = y ...` where
//! `y` ranges over the other variables of P. Substitution pushes the hook
//! into plain variables; a modal formula `M(Q)` becomes `hook(M(Q)) /\
//! Q[x\x']` and `ouat(Q)` becomes `hook(ouat(Q))`. Register updates rename
//! the old register to a fresh primed name.

use super::{Accent, Expr, Modality, Reg};
use crate::syntax::ast::{Assign, AssignKind};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SpError {
    #[error("nested hook on variable {0}")]
    NestedHook(String),
    #[error("ill-formed assignment")]
    Malformed,
}

/// `P[x\x']` for every x in `vars`.
pub fn hook_subst(p: &Expr, vars: &BTreeSet<String>) -> Result<Expr, SpError> {
    Ok(match p {
        Expr::Var(v, Accent::Plain) if vars.contains(v) => Expr::Var(v.clone(), Accent::Hook),
        Expr::Var(v, Accent::Hook) if vars.contains(v) => return Err(SpError::NestedHook(v.clone())),
        Expr::Shift(..) => p.clone(),
        Expr::Modal(Modality::Ouat, _) => Expr::shift(Accent::Hook, p.clone()),
        Expr::Modal(_, q) | Expr::Since(q, _) => {
            Expr::and(vec![Expr::shift(Accent::Hook, p.clone()), hook_subst(q, vars)?])
        }
        _ => {
            let mut err = None;
            let out = p.map_children(&mut |c| match hook_subst(c, vars) {
                Ok(e) => e,
                Err(e) => {
                    err.get_or_insert(e);
                    c.clone()
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            out
        }
    })
}

/// Strongest postcondition of a write of `pairs` (atomically) from `p`.
/// `frame` lists further variables whose value is unchanged.
pub fn sp_write(p: &Expr, pairs: &[(String, Expr)], frame: &BTreeSet<String>) -> Result<Expr, SpError> {
    let assigned: BTreeSet<String> = pairs.iter().map(|(v, _)| v.clone()).collect();
    let mut parts = vec![hook_subst(p, &assigned)?];
    for (v, e) in pairs {
        parts.push(Expr::eq(Expr::var(v), e.clone()));
    }
    let mut others: BTreeSet<String> = p.value_variables();
    others.extend(p.variables());
    others.extend(frame.iter().cloned());
    for y in others.difference(&assigned) {
        parts.push(Expr::eq(Expr::Var(y.clone(), Accent::Hook), Expr::var(y)));
    }
    Ok(Expr::and(parts))
}

/// The highest prime level of register `name` in any of `es`.
pub fn max_primes<'a>(name: &str, es: impl IntoIterator<Item = &'a Expr>) -> u32 {
    es.into_iter()
        .flat_map(|e| e.registers())
        .filter(|r| r.name == name && r.thread.is_none())
        .map(|r| r.primes)
        .max()
        .unwrap_or(0)
}

/// Renames unprimed occurrences of register `name` to `name` with `primes`.
pub fn rename_register(p: &Expr, name: &str, primes: u32) -> Expr {
    p.map_registers(&|r| {
        if r.name == name && r.primes == 0 && r.thread.is_none() {
            Expr::Reg(Reg { name: r.name.clone(), primes, thread: None })
        } else {
            Expr::Reg(r.clone())
        }
    })
}

/// Strongest postcondition of register updates `r := E` (atomically).
pub fn sp_registers(p: &Expr, pairs: &[(String, Expr)]) -> Expr {
    let mut cur = p.clone();
    let mut eqs = Vec::new();
    let mut exprs: Vec<Expr> = pairs.iter().map(|(_, e)| e.clone()).collect();
    for (r, _) in pairs {
        let mut all = vec![&cur];
        all.extend(exprs.iter());
        all.extend(eqs.iter());
        let level = max_primes(r, all) + 1;
        cur = rename_register(&cur, r, level);
        exprs = exprs.iter().map(|e| rename_register(e, r, level)).collect();
        eqs = eqs.iter().map(|e| rename_register(e, r, level)).collect();
    }
    for ((r, _), e) in pairs.iter().zip(exprs) {
        eqs.push(Expr::eq(Expr::reg(r), e));
    }
    let mut parts = vec![cur];
    parts.extend(eqs);
    Expr::and(parts)
}

/// Strongest postcondition of any assignment.
pub fn sp_assign(p: &Expr, a: &Assign) -> Result<Expr, SpError> {
    match a.kind().ok_or(SpError::Malformed)? {
        AssignKind::Write(pairs) => sp_write(p, &pairs, &BTreeSet::new()),
        AssignKind::Calc(pairs) => Ok(sp_registers(p, &pairs)),
        AssignKind::Read { var, regs } => {
            let pairs: Vec<(String, Expr)> = regs
                .into_iter()
                .map(|(r, k)| {
                    let v = Expr::var(&var);
                    (r, match k {
                        Some(k) => Expr::Proj(Box::new(v), k),
                        None => v,
                    })
                })
                .collect();
            // The read value is taken from the current state, so registers
            // are renamed first and the equations mention plain variables.
            let mut cur = p.clone();
            for (r, _) in &pairs {
                let level = max_primes(r, [&cur]) + 1;
                cur = rename_register(&cur, r, level);
            }
            let mut parts = vec![cur];
            parts.extend(pairs.into_iter().map(|(r, e)| Expr::eq(Expr::reg(&r), e)));
            Ok(Expr::and(parts))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_assertion, parse_assertion_internal};

    fn a(s: &str) -> Expr {
        parse_assertion(s).unwrap()
    }

    fn i(s: &str) -> Expr {
        parse_assertion_internal(s).unwrap()
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn write_hooks_the_assigned_variable_and_frames_the_rest() {
        let p = a("x = 0 /\\ y = 1");
        let got = sp_write(&p, &[("x".into(), Expr::int(1))], &BTreeSet::new()).unwrap();
        assert!(got.ac_eq(&i("x' = 0 /\\ y = 1 /\\ x = 1 /\\ y' = y")));
    }

    #[test]
    fn modal_substitution() {
        let p = a("B(msg = 1)");
        let got = hook_subst(&p, &set(&["flag"])).unwrap();
        assert_eq!(got, i("hook(B(msg = 1)) /\\ msg = 1"));
        let got = hook_subst(&a("ouat(x = 1)"), &set(&["x"])).unwrap();
        assert_eq!(got, i("hook(ouat(x = 1))"));
    }

    #[test]
    fn nested_hooks_are_rejected() {
        assert!(hook_subst(&i("x' = 1"), &set(&["x"])).is_err());
    }

    #[test]
    fn register_update_renames() {
        let got = sp_registers(&a("r1 = 2"), &[("r1".into(), a("r1 + 1"))]);
        assert_eq!(got, i("r1' = 2 /\\ r1 = r1' + 1"));
        let again = sp_registers(&got, &[("r1".into(), Expr::int(0))]);
        assert_eq!(again, i("r1' = 2 /\\ r1'2 = r1' + 1 /\\ r1 = 0"));
    }
}
