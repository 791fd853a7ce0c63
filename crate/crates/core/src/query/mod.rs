//! Query text to AST and back.
//!
//! Pattern operator strength, tightest first: postfix `*` and `END`, prefix
//! `START`, `->`, `~>`. The binary operators associate to the left. `OR`
//! and `NOT (..)` only combine identifiers, never whole patterns. Keywords
//! are case-insensitive. The Unicode arrows `→` and `⇝` are read as `->`
//! and `~>` but never printed.

mod ast;
mod lexer;
mod parser;
mod printer;

use thiserror::Error;

pub use ast::*;
pub use lexer::is_keyword;
pub use printer::{pretty_print, print_behaviour, print_condition, print_pattern};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unsupported feature at {line}:{column}: {construct}")]
    UnsupportedFeature {
        construct: String,
        line: usize,
        column: usize,
    },
    #[error("NOT at {line}:{column} applies to identifiers only, not to patterns")]
    NegatedPattern { line: usize, column: usize },
    #[error("behaviour `{0}` is defined twice")]
    DuplicateBehaviour(String),
    #[error("{found} behaviours defined, at most {limit} allowed")]
    TooManyBehaviours { limit: usize, found: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Behaviour conjuncts must compare two attributes (no constants).
    pub strict_grammar: bool,
    /// Maximum behaviours in one `BEHAVIOUR .. MATCHES`; `None` is unlimited.
    pub max_behaviours: Option<usize>,
}

pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    parse_query_with(text, ParseOptions::default())
}

pub fn parse_query_with(text: &str, options: ParseOptions) -> Result<Query, ParseError> {
    parser::Parser::new(text, options)?.query()
}

/// Parses a simple pattern on its own, e.g. `START ('a' -> 'b')`.
pub fn parse_pattern(text: &str) -> Result<PatternFormula, ParseError> {
    parser::Parser::new(text, ParseOptions::default())?.standalone_pattern()
}
