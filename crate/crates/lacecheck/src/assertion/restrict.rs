//! Restriction on B and U bodies (and the initial assertion): a `since` or
//! `ouat` inside them may mention at most one variable. Historical
//! coincidences of several variables cannot be propagated between threads.
//! `sofar` bodies are exempt.

use super::{Expr, Modality};

/// Returns the first offending subformula, if any.
pub fn restrict_bu(p: &Expr) -> Result<(), Expr> {
    let mut bad = None;
    p.visit(&mut |e| {
        if bad.is_some() {
            return;
        }
        if let Expr::Modal(Modality::B | Modality::U, body) = e {
            if let Some(x) = multivariate_coincidence(body) {
                bad = Some(x);
            }
        }
    });
    bad.map_or(Ok(()), Err)
}

/// The initial assertion is constrained as if it were a B body.
pub fn restrict_init(p: &Expr) -> Result<(), Expr> {
    match multivariate_coincidence(p) {
        Some(x) => Err(x),
        None => restrict_bu(p),
    }
}

fn multivariate_coincidence(p: &Expr) -> Option<Expr> {
    let mut bad = None;
    walk(p, &mut bad);
    bad
}

fn walk(p: &Expr, bad: &mut Option<Expr>) {
    if bad.is_some() {
        return;
    }
    match p {
        Expr::Modal(Modality::Sofar, _) => {}
        Expr::Since(..) | Expr::Modal(Modality::Ouat, _) if p.variables().len() >= 2 => *bad = Some(p.clone()),
        _ => {
            for c in p.children() {
                walk(c, bad);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_assertion;

    fn a(s: &str) -> Expr {
        parse_assertion(s).unwrap()
    }

    #[test]
    fn examples() {
        assert!(restrict_bu(&a("B(ouat(msg = 1))")).is_ok());
        assert!(restrict_bu(&a("B(ouat(msg = 1 /\\ flag = 0))")).is_err());
        assert!(restrict_bu(&a("U(x = 1)")).is_ok());
        assert!(restrict_bu(&a("B(sofar(x = 1 /\\ y = 0))")).is_ok());
        assert!(restrict_bu(&a("ouat(x = 1 /\\ y = 0)")).is_ok());
        assert!(restrict_init(&a("ouat(x = 1 /\\ y = 0)")).is_err());
    }
}
