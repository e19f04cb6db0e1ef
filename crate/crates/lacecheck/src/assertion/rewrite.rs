//! Equational normalisation of modal formulas, applied before embedding.

use super::{Expr, Modality};

const MAX_ROUNDS: usize = 64;

/// Rewrites to a fixed point with the modality equivalences:
///
/// * `M(P /\ Q) = M(P) /\ M(Q)` and `M(M(P)) = M(P)` for B, U, sofar
/// * `M(true) = true`, `M(false) = false`
/// * `U(B(P)) = B(U(P)) = U(P)`, `U(sofar(P)) = sofar(U(P)) = sofar(B(P)) = sofar(P)`
/// * `(P since Q) since R = P since ((P since Q) /\ R)`
/// * `sofar(P) since Q = sofar(P) /\ ouat(Q)`
///
/// `U(P since Q)` is left alone: `Fandw(P) since (Fandw(P) /\ Q)` is not
/// equivalent to it under the embedding in either direction.
pub fn rewrite_modal(p: &Expr) -> Expr {
    let mut cur = p.clone();
    for _ in 0..MAX_ROUNDS {
        let next = step(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn distributes(m: Modality) -> bool {
    matches!(m, Modality::B | Modality::U | Modality::Sofar | Modality::Fandw)
}

fn step(p: &Expr) -> Expr {
    let p = p.map_children(&mut |c| step(c));
    match p {
        Expr::Modal(m, body) => match *body {
            Expr::Bool(b) => Expr::Bool(b),
            Expr::And(xs) if distributes(m) => Expr::and(xs.into_iter().map(|x| Expr::modal(m, x)).collect()),
            Expr::Modal(inner, q) => {
                use Modality::*;
                match (m, inner) {
                    (B, B) | (U, U) | (Sofar, Sofar) | (U, B) => Expr::modal(m, *q),
                    (B, U) => Expr::modal(U, *q),
                    (U, Sofar) | (Sofar, U) | (Sofar, B) => Expr::modal(Sofar, *q),
                    _ => Expr::modal(m, Expr::Modal(inner, q)),
                }
            }
            body => Expr::modal(m, body),
        },
        Expr::Since(a, r) => match *a {
            Expr::Since(p1, q1) => {
                let inner = Expr::Since(p1.clone(), q1);
                Expr::since(*p1, Expr::and(vec![inner, *r]))
            }
            Expr::Modal(Modality::Sofar, q) => {
                Expr::and(vec![Expr::Modal(Modality::Sofar, q), Expr::modal(Modality::Ouat, *r)])
            }
            a => Expr::Since(Box::new(a), r),
        },
        p => p,
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
    fn table_rows() {
        assert_eq!(rewrite_modal(&a("U(U(x = 1))")), a("U(x = 1)"));
        assert_eq!(rewrite_modal(&a("B(true)")), Expr::tt());
        assert_eq!(rewrite_modal(&a("sofar(B(x = 1))")), a("sofar(x = 1)"));
        assert_eq!(rewrite_modal(&a("B(U(x = 1))")), a("U(x = 1)"));
        assert_eq!(rewrite_modal(&a("B(x = 1 /\\ y = 2)")), a("B(x = 1) /\\ B(y = 2)"));
        assert_eq!(
            rewrite_modal(&a("(x = 1 since y = 1) since z = 1")),
            a("x = 1 since ((x = 1 since y = 1) /\\ z = 1)")
        );
        assert_eq!(rewrite_modal(&a("sofar(x = 1) since y = 1")), a("sofar(x = 1) /\\ ouat(y = 1)"));
        assert_eq!(rewrite_modal(&a("U(x = 1 since y = 1)")), a("U(x = 1 since y = 1)"));
    }
}
