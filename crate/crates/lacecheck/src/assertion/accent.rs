//! Syntactic hatting and twiddling.
//!
//! `accent(Hat, P)` pushes the accent through P: variables become hatted,
//! operators are mapped homomorphically, and temporal formulas are handled
//! by the rules below.
//!
//! | P          | hat / dhat             | tw / dtw               |
//! |------------|------------------------|------------------------|
//! | `B(Q)`     | `B(Q) /\ hat(Q)`       | whole-formula `tw(B(Q))` |
//! | `U(Q)`     | `U(Q) /\ hat(Q)`       | `U(Q) /\ tw(Q)`        |
//! | `sofar(Q)` | `sofar(Q)`             | `sofar(Q)`             |
//! | `Q since R`, `ouat(Q)`, `Fandw(Q)` | whole-formula shift | whole-formula shift |

use super::{Accent, Expr, Modality};

pub fn accent(acc: Accent, p: &Expr) -> Expr {
    debug_assert!(acc.is_hat() || acc.is_twiddle());
    match p {
        Expr::Var(v, Accent::Plain) => Expr::Var(v.clone(), acc),
        Expr::Var(..) | Expr::Reg(_) | Expr::Bool(_) | Expr::Int(_) | Expr::Logical(_) | Expr::Cv(_) => p.clone(),
        Expr::Shift(..) | Expr::Sat(_) => p.clone(),
        Expr::Modal(Modality::B, q) => {
            if acc.is_twiddle() {
                Expr::shift(acc, p.clone())
            } else {
                Expr::and(vec![p.clone(), accent(acc, q)])
            }
        }
        Expr::Modal(Modality::U, q) => Expr::and(vec![p.clone(), accent(acc, q)]),
        Expr::Modal(Modality::Sofar, _) => p.clone(),
        Expr::Modal(Modality::Ouat | Modality::Fandw, _) | Expr::Since(..) => Expr::shift(acc, p.clone()),
        _ => p.map_children(&mut |c| accent(acc, c)),
    }
}

pub fn hat(p: &Expr) -> Expr {
    accent(Accent::Hat, p)
}

pub fn dhat(p: &Expr) -> Expr {
    accent(Accent::DHat, p)
}

pub fn tw(p: &Expr) -> Expr {
    accent(Accent::Tw, p)
}

pub fn dtw(p: &Expr) -> Expr {
    accent(Accent::DTw, p)
}

/// Replaces every whole-formula accent `hat(P)` written in an assertion by
/// its syntactic expansion. Hooks and shifts of temporal formulas stay.
pub fn expand_accents(p: &Expr) -> Expr {
    match p {
        Expr::Shift(acc, q) if acc.is_hat() || acc.is_twiddle() => accent(*acc, &expand_accents(q)),
        _ => p.map_children(&mut |c| expand_accents(c)),
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

    #[test]
    fn variables_are_accented_registers_are_not() {
        assert_eq!(hat(&a("x = r1 + 1")), i("x^ = r1 + 1"));
        assert_eq!(dtw(&a("x = r1")), i("x~~ = r1"));
    }

    #[test]
    fn modal_rules() {
        assert_eq!(hat(&a("B(x = 1)")), i("B(x = 1) /\\ x^ = 1"));
        assert_eq!(tw(&a("B(x = 1)")), i("tw(B(x = 1))"));
        assert_eq!(tw(&a("U(x = 1)")), i("U(x = 1) /\\ x~ = 1"));
        assert_eq!(hat(&a("sofar(x = 1)")), a("sofar(x = 1)"));
        assert_eq!(hat(&a("ouat(x = 1)")), i("hat(ouat(x = 1))"));
        assert_eq!(dhat(&a("x = 1 since y = 2")), i("dhat(x = 1 since y = 2)"));
    }

    #[test]
    fn coherence_arguments_are_accented() {
        assert_eq!(hat(&a("x_c(1, x)")), i("x_c(1, x^)"));
    }
}
