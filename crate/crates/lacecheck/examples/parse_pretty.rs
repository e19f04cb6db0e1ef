//! Parse a laced program and print it back in canonical form.
//!
//! cargo run --example parse_pretty -- corpus/MP.lace

use lacecheck::syntax::validate::validate_aux_discipline;
use lacecheck::syntax::{parse_program, pretty};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "corpus/MP.lace".into());
    let src = std::fs::read_to_string(&path).expect("readable program");
    let p = match parse_program(&src) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(1);
        }
    };
    print!("{}", pretty::program_to_string(&p));
    for (k, t) in p.threads.iter().enumerate() {
        println!("# thread {k}: {} components, {} controls", t.components().len(), t.controls().len());
    }
    for v in validate_aux_discipline(&p) {
        println!("# aux condition {} at t{}:{}: {}", v.condition, v.thread, v.label, v.message);
    }
}
