//! Proof checking for weak-memory laced programs with modal assertions.

pub mod assertion;
pub mod check;
pub mod config;
pub mod corpus;
pub mod syntax;
pub mod smt;
pub mod solver;
pub mod lacing;
pub mod obligations;
pub mod oracle;
pub mod report;
