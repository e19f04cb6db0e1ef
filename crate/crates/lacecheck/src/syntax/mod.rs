//! Concrete syntax: lexer, parser, pretty-printer and the program AST.

pub mod ast;
pub mod lexer;
mod macros;
pub mod parser;
pub mod pretty;
pub mod validate;

use ast::Pos;
use thiserror::Error;

pub use parser::{parse_assertion, parse_assertion_internal, parse_program, parse_program_unchecked};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

impl ParseError {
    pub fn at(pos: Pos, msg: impl Into<String>) -> ParseError {
        ParseError { pos, msg: msg.into() }
    }
}

/// Errors reported by `parse_program`.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FrontendError {
    #[error("syntax error at {0}")]
    Syntax(#[from] ParseError),
    #[error("{pos}: duplicate label `{label}` in thread {thread}")]
    DuplicateLabel { thread: usize, label: String, pos: Pos },
    #[error("{pos}: stitch source `{source_label}` does not name a component of thread {thread}")]
    UnresolvedSource { thread: usize, source_label: String, pos: Pos },
    #[error("{pos}: {msg}")]
    AuxNaming { msg: String, pos: Pos },
    #[error("{pos}: {msg}")]
    Malformed { msg: String, pos: Pos },
}

impl FrontendError {
    pub fn pos(&self) -> Pos {
        match self {
            FrontendError::Syntax(e) => e.pos,
            FrontendError::DuplicateLabel { pos, .. }
            | FrontendError::UnresolvedSource { pos, .. }
            | FrontendError::AuxNaming { pos, .. }
            | FrontendError::Malformed { pos, .. } => *pos,
        }
    }
}
