//! Concrete syntax: parsers, printers, LTS serialisation and CSPm export.
//!
//! The grammar is documented in `docs/grammar.md` at the repository root.

mod export;
mod lexer;
mod parse;
mod print;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use export::{export_cspm, export_lts, import_lts_json, ExportError, LtsFormat};
pub use parse::{parse_ccs, parse_cspmn, parse_event, parse_label};
pub use print::{print_ccs, print_csp};

/// Position of a token in the source text (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

impl ParseError {
    pub(crate) fn new(message: impl Into<String>, span: SourceSpan) -> Self {
        ParseError { message: message.into(), span }
    }
}
