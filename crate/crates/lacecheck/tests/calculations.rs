mod common;

use lacecheck::solver::Status;

#[test]
fn displayed_calculations_have_their_verdicts() {
    let solver = common::solver();
    let mut wrong = Vec::new();
    for c in common::CALCS {
        let want = if c.valid { Status::Valid } else { Status::Invalid };
        let got = common::calc_verdict(&solver, c);
        if got != want {
            wrong.push(format!("{}: expected {}, got {}", c.name, want.name(), got.name()));
        }
    }
    assert!(wrong.is_empty(), "{}", wrong.join("\n"));
}

#[test]
fn sc_stability_check_shows_hooked_msg() {
    let c = &common::CALCS[0];
    let goal = common::calc_goal(c).to_string();
    assert!(goal.contains("msg' = 1"), "{goal}");
}
