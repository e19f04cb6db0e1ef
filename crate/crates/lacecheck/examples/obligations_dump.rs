//! The proof obligations of a program, before any solver runs.
//!
//! cargo run --example obligations_dump -- corpus/MP.lace

use lacecheck::obligations::{self, Options};
use lacecheck::syntax::parse_program;
use std::collections::BTreeMap;

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "corpus/MP.lace".into());
    let src = std::fs::read_to_string(&path).expect("readable program");
    let p = parse_program(&src).expect("well-formed program");
    // Unresolved sat(..) terms stay symbolic in the dump.
    let sat = BTreeMap::new();
    let obs = obligations::generate(&p, &Options::default(), &sat).expect("lacing");
    print!("{}", obligations::dump(&obs));
    println!("{} obligations", obs.len());
}
