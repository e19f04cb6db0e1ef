//! Decide a few assertions both by brute-force enumeration and by the
//! solver, printing the oracle's countermodel where there is one.

use lacecheck::oracle::{check_validity, OracleConfig, OracleVerdict};
use lacecheck::smt::{validity_query, Bounds, EmbedCtx};
use lacecheck::solver::{Solver, SolverConfig, Status};
use lacecheck::syntax::parse_assertion_internal;

fn main() {
    let cfg = OracleConfig { max_value: 1, instants: 4, ..OracleConfig::default() };
    let solver = Solver::new(SolverConfig::default()).expect("solver available");
    for src in ["B(x = 1) => x = 1", "ouat(x = 1) => x = 1", "sofar(x = 1) => hat(x = 1)", "x = 1 since y = 1 => ouat(y = 1)"]
    {
        let e = parse_assertion_internal(src).expect("assertion");
        let grid = lacecheck::smt::grid_for(&e);
        let ctx = EmbedCtx { bounds: Some(Bounds { max_value: cfg.max_value, himin: cfg.himin(grid) }), ..Default::default() };
        let q = validity_query(&e, &ctx, false).expect("embeddable");
        let z3 = Status::from_answer(q.kind, solver.run(&q).answer);
        match check_validity(&e, &cfg) {
            Ok(OracleVerdict::Valid) => println!("{src}: oracle valid, solver {}", z3.name()),
            Ok(OracleVerdict::Counter(m)) => println!("{src}: oracle invalid, solver {}\n{m}", z3.name()),
            Err(err) => println!("{src}: oracle {err}"),
        }
    }
}
