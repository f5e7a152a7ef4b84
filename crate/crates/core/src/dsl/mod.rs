//! Surface syntax for models, epistemic states, formulas and queries, and
//! the report emitter. See `docs/grammar.md` for the grammar.

use std::fmt;

mod formula;
mod lexer;
mod model;
pub mod query;
pub mod report;
mod state;

pub use formula::{parse_conjunction, parse_formula, parse_formula_in, parse_values};
pub use lexer::Pos;
pub use model::{parse_model, print_model, print_models};
pub use query::{parse_query, print_query, Expectation, Query, QueryKind};
pub use report::{emit, Format};
pub use state::{parse_context, parse_state, parse_state_document, print_state, resolve_states, StateDocument, StateEntry, StateSource};

use crate::model::Value;
use lexer::{Cursor, Tok};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    Lexical,
    Syntax,
    Resolution,
    Type,
    Probability,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Lexical => "lexical",
            ErrorKind::Syntax => "syntax",
            ErrorKind::Resolution => "resolution",
            ErrorKind::Type => "type",
            ErrorKind::Probability => "probability",
        })
    }
}

/// A diagnostic with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {kind} error: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ErrorKind,
    pub message: String,
}

pub type ParseResult<T> = std::result::Result<T, ParseError>;

const RESERVED: &[&str] =
    &["model", "exo", "endo", "if", "then", "else", "min", "max", "and", "or", "not", "true", "false", "state", "models"];

pub fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

const START: Pos = Pos { line: 1, column: 1 };

/// `INT | '-' INT | IDENT | STRING`, the latter two being symbols.
fn value(c: &mut Cursor) -> ParseResult<(Value, Pos)> {
    let pos = c.pos();
    let neg = c.eat(&Tok::Minus);
    match c.peek().clone() {
        Tok::Int(n) => {
            c.bump();
            Ok((Value::Int(signed(n, neg, pos)?), pos))
        }
        Tok::Ident(s) | Tok::Str(s) if !neg => {
            if !crate::value::is_identifier(&s) || is_reserved(&s) {
                return Err(pos.error(ErrorKind::Syntax, format!("`{s}` is not a valid symbol")));
            }
            c.bump();
            Ok((Value::Sym(s), pos))
        }
        _ => Err(c.unexpected("a value")),
    }
}

fn signed(n: u64, neg: bool, pos: Pos) -> ParseResult<i64> {
    let wide = if neg { -(n as i128) } else { n as i128 };
    i64::try_from(wide).map_err(|_| pos.error(ErrorKind::Lexical, format!("integer `{wide}` is out of range")))
}
