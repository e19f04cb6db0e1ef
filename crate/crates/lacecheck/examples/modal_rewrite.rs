//! Modal rewriting to the temporal core, and the propagatable part of an
//! assertion.

use lacecheck::assertion::down::down_traced;
use lacecheck::assertion::rewrite::rewrite_modal;
use lacecheck::syntax::parse_assertion;

fn main() {
    for src in [
        "B(msg = 1)",
        "U(x = 1)",
        "U(x = 1) since y = 1",
        "sofar(y != 1)",
        "ouat(x = 0 /\\ y = 2)",
        "r1 = 0 => ouat(x = 0 /\\ y = 2)",
        "!ouat(y = 1)",
    ] {
        let p = parse_assertion(src).expect("assertion");
        let (d, steps) = down_traced(&p);
        println!("{p}");
        println!("  rewritten: {}", rewrite_modal(&p));
        println!("  down:      {d}");
        for s in steps {
            println!("    {}: {}", s.rule, s.subformula);
        }
    }
}
