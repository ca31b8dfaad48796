//! The logical-form DSL: tokenizer, recursive-descent parser, canonical
//! serializer, catalog validation and syntax-style conversion.

mod annotation;
mod ast;
mod catalog;
mod parser;
mod random;
mod serialize;
mod style;
mod token;
mod validate;

use thiserror::Error;

pub use annotation::{is_annotation, read_annotation};
pub use ast::{Criterion, LfArg, LfNode, Polarity};
pub use catalog::{is_function_name, Arity, CatalogEntry, FunctionCatalog, FunctionKind};
pub use parser::{is_symbol, parse, parse_unchecked};
pub use random::random_node;
pub use serialize::serialize;
pub use style::{convert_style, extract_spans, parse_style, render_style, Style};
pub use token::{escape, tokenize, Token, TokenKind};
pub use validate::{validate, Diagnostic, DiagnosticKind, OPERATORS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LfError {
    #[error("unterminated string starting at {position}")]
    UnterminatedString { position: usize },
    #[error("illegal character {ch:?} at {position}")]
    IllegalCharacter { position: usize, ch: char },
    #[error("syntax error at {position}: expected {expected}, found {found}")]
    Syntax { position: usize, expected: String, found: String },
    #[error("unknown function `{name}` at {position}")]
    UnknownFunction { name: String, position: usize },
    #[error("{name} takes {allowed} argument(s), got {got}")]
    Arity { name: String, got: usize, allowed: String },
    #[error("malformed input at {position}: {message}")]
    MalformedStyle { position: usize, message: String },
    #[error("span-index input requires a span table")]
    MissingSpanTable,
    #[error("span index @{index} is out of range")]
    SpanIndexOutOfRange { index: usize },
    #[error("catalog line {line}: {message}")]
    Catalog { line: usize, message: String },
    #[error("annotation line {line}: {message}")]
    Annotation { line: usize, message: String },
}

impl LfError {
    /// Short machine-readable name of the error variant.
    pub fn code(&self) -> &'static str {
        match self {
            LfError::UnterminatedString { .. } => "UnterminatedString",
            LfError::IllegalCharacter { .. } => "IllegalCharacter",
            LfError::Syntax { .. } => "SyntaxError",
            LfError::UnknownFunction { .. } => "UnknownFunction",
            LfError::Arity { .. } => "ArityError",
            LfError::MalformedStyle { .. } => "MalformedStyle",
            LfError::MissingSpanTable => "MissingSpanTable",
            LfError::SpanIndexOutOfRange { .. } => "SpanIndexOutOfRange",
            LfError::Catalog { .. } => "CatalogError",
            LfError::Annotation { .. } => "AnnotationError",
        }
    }

    /// Character offset of the error in the input, when it has one.
    pub fn position(&self) -> Option<usize> {
        match self {
            LfError::UnterminatedString { position }
            | LfError::IllegalCharacter { position, .. }
            | LfError::Syntax { position, .. }
            | LfError::UnknownFunction { position, .. }
            | LfError::MalformedStyle { position, .. } => Some(*position),
            _ => None,
        }
    }
}
