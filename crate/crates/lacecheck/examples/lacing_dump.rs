//! So-tree paths, coverage and parallelism of each thread.
//!
//! cargo run --example lacing_dump -- corpus/lo-parallel-abused.lace [--screg]

use lacecheck::lacing;
use lacecheck::syntax::parse_program;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args.iter().find(|a| !a.starts_with("--")).cloned().unwrap_or_else(|| "corpus/MP-cond.lace".into());
    let screg = args.iter().any(|a| a == "--screg");
    let src = std::fs::read_to_string(&path).expect("readable program");
    let p = parse_program(&src).expect("well-formed program");
    for (k, t) in p.threads.iter().enumerate() {
        println!("== thread {k}");
        print!("{}", lacing::dump(t, k, 3, screg).expect("lacing"));
        for u in lacing::check_constraint_coverage(t, k, 3).expect("coverage") {
            println!("uncovered {} on {}", u.label, u.path);
        }
    }
}
