//! Strongest postconditions of writes and the hat/hook expansions they use.

use lacecheck::assertion::accent::{expand_accents, hat};
use lacecheck::assertion::sp::sp_assign;
use lacecheck::assertion::Expr;
use lacecheck::syntax::ast::{Assign, Target};
use lacecheck::syntax::parse_assertion;

fn write(var: &str, e: Expr) -> Assign {
    Assign { targets: vec![Target::Var(var.into())], exprs: vec![e] }
}

fn main() {
    let cases = [
        ("flag = 1 => msg = 1", write("msg", Expr::int(1))),
        ("B(r1 = 1 => msg = 1)", write("msg", Expr::int(1))),
        ("flag = 1 => B(msg = 1)", write("flag", Expr::int(1))),
        ("y = 2 \\/ y = 1 /\\ y_c(2, 1)", write("y", Expr::int(1))),
    ];
    for (src, a) in cases {
        let p = parse_assertion(src).expect("assertion");
        let a_text = lacecheck::syntax::pretty::assign_to_string(&a);
        match sp_assign(&p, &a) {
            Ok(q) => println!("sp({p}, {a_text})\n  = {q}"),
            Err(e) => println!("sp({p}, {a_text}): {e}"),
        }
    }
    let p = parse_assertion("B(msg = 1) /\\ ouat(flag = 0)").expect("assertion");
    println!("hat({p})\n  = {}", expand_accents(&hat(&p)));
}
