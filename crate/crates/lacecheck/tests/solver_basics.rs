use lacecheck::smt::{validity_query, EmbedCtx};
use lacecheck::solver::{Solver, SolverConfig, Status};
use lacecheck::syntax::parse_assertion_internal;

fn verdict(src: &str) -> Status {
    let solver = Solver::new(SolverConfig::default()).expect("z3 on PATH");
    let e = parse_assertion_internal(src).unwrap();
    let q = validity_query(&e, &EmbedCtx::default(), false).unwrap();
    let o = solver.run(&q);
    Status::from_answer(q.kind, o.answer)
}

#[test]
fn b_implies_body() {
    assert_eq!(verdict("B(x = 1) => x = 1"), Status::Valid);
}

#[test]
fn ouat_does_not_imply_body() {
    assert_eq!(verdict("ouat(x = 1) => x = 1"), Status::Invalid);
}

#[test]
fn trivial_truth() {
    assert_eq!(verdict("true"), Status::Valid);
}

#[test]
fn sofar_implies_hat() {
    assert_eq!(verdict("sofar(x = 1) => hat(x = 1)"), Status::Valid);
}
