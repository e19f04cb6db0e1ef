//! Check one program end to end and print the report.
//!
//! cargo run --example check_program -- corpus/SB.lace [--json]

use lacecheck::check::Checker;
use lacecheck::config::Config;
use std::path::Path;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args.iter().find(|a| !a.starts_with("--")).cloned().unwrap_or_else(|| "corpus/MP.lace".into());
    let checker = Checker::new(Config::default()).expect("solver available");
    let report = checker.check_file(Path::new(&path)).expect("checkable program");
    if args.iter().any(|a| a == "--json") {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text(false));
    }
}
