mod common;

use lacecheck::oracle::{check_validity, OracleConfig, OracleVerdict};
use lacecheck::solver::Status;
use lacecheck::syntax::parse_assertion_internal;
use rayon::prelude::*;

#[test]
fn every_modal_property_is_valid() {
    let solver = common::solver();
    let props = common::modal_properties();
    let failed: Vec<String> = props
        .par_iter()
        .filter(|(row, _)| row != common::INVALID_ROW)
        .filter_map(|(row, f)| {
            let v = common::verdict(&solver, f);
            (v != Status::Valid).then(|| format!("{row}: {f} is {}", v.name()))
        })
        .collect();
    assert!(failed.is_empty(), "{} of {} failed:\n{}", failed.len(), props.len(), failed.join("\n"));
}

#[test]
fn converse_of_b_elimination_is_not_valid() {
    let solver = common::solver();
    assert_eq!(common::verdict(&solver, "x = 1 => B(x = 1)"), Status::Invalid);
    assert_eq!(common::verdict(&solver, "B(x = 1) => U(x = 1)"), Status::Invalid);
    assert_eq!(common::verdict(&solver, "ouat(x = 1) /\\ ouat(y = 2) => ouat(x = 1 /\\ y = 2)"), Status::Invalid);
}

/// The equivalence row for `U(P since Q)` fails in both directions under the
/// embedding; the enumerating oracle agrees.
#[test]
fn u_since_row_is_not_an_equivalence() {
    let solver = common::solver();
    let lhs = "U(y = 1 since x = 1)";
    let rhs = "Fandw(y = 1) since (Fandw(y = 1) /\\ x = 1)";
    for f in [format!("{lhs} => {rhs}"), format!("{rhs} => {lhs}")] {
        assert_eq!(common::verdict(&solver, &f), Status::Invalid, "{f}");
        let e = parse_assertion_internal(&f).unwrap();
        let cfg = OracleConfig { max_value: 1, instants: 3, ..OracleConfig::default() };
        assert!(matches!(check_validity(&e, &cfg), Ok(OracleVerdict::Counter(_))), "{f}");
    }
}
