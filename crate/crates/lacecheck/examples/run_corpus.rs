//! Check every program in a directory against its `.expect` sidecar.
//!
//! cargo run --release --example run_corpus -- corpus

use lacecheck::check::Checker;
use lacecheck::config::Config;
use lacecheck::corpus;
use std::path::Path;

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "corpus".into());
    let checker = Checker::new(Config::default()).expect("solver available");
    let entries = corpus::run_corpus(&checker, Path::new(&dir)).expect("readable corpus");
    print!("{}", corpus::table(&entries));
    for e in entries.iter().filter(|e| !e.passed()) {
        println!("{}:", e.name);
        for m in &e.problems {
            println!("  {m}");
        }
    }
}
