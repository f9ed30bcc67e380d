//! The agent plan language.
//!
//! Programs are lists of plans of the form
//!
//! ```text
//! trigger : {guard} <- deed, deed, ...;
//! ```
//!
//! where the trigger is `+b`, `-b` or `+!g`, the guard is a conjunction of
//! `.B b` atoms (or `True`), and deeds add or remove beliefs, post perform
//! goals, or call actions provided by the host engine. Comments run from
//! `//` to end of line.

mod ast;
mod lexer;
mod parser;
mod pretty;
mod term;

use std::fmt;

use thiserror::Error;

pub use ast::{Deed, Event, EventKind, GoalKind, Guard, GuardAtom, Plan};
pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse_program, parse_term};
pub use pretty::pretty_print;
pub use term::{apply_subst, unify, unify_into, Number, Substitution, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: expected {}, found {}",
            self.line,
            self.column,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("{line}:{column}: variable {variable} is unbound in plan {plan}")]
    UnboundVariable {
        variable: String,
        plan: usize,
        line: usize,
        column: usize,
    },
}
