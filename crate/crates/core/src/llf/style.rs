//! Conversion among the three logical-form syntax styles.
//!
//! * `Standard`: `cond("Diabetic")`
//! * `ShiftReduce`: square brackets, space-separated arguments and a trailing
//!   repeat of the function name: `[cond "Diabetic" cond]`
//! * `SpanIndex`: Standard syntax with each quoted span replaced by `@k`,
//!   where `k` is the span's 0-based position among the criterion's quoted
//!   spans: `cond(@0)`
//!
//! Every conversion goes through the AST, so the output is canonical and the
//! conversions are lossless given the span table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ast::{LfArg, LfNode};
use super::parser::{Parser, Spans};
use super::serialize::serialize;
use super::token::escape;
use super::LfError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Style {
    Standard,
    ShiftReduce,
    SpanIndex,
}

impl FromStr for Style {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "standard" => Ok(Style::Standard),
            "shift-reduce" | "shiftreduce" | "sr" => Ok(Style::ShiftReduce),
            "span-index" | "spanindex" | "pointer" => Ok(Style::SpanIndex),
            other => Err(format!("unknown style `{other}`")),
        }
    }
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Style::Standard => "standard",
            Style::ShiftReduce => "shift-reduce",
            Style::SpanIndex => "span-index",
        })
    }
}

/// Reads `text` written in `style`. SpanIndex input needs the span table.
pub fn parse_style(text: &str, style: Style, spans: Option<&[String]>) -> Result<LfNode, LfError> {
    let span_mode = match spans {
        Some(t) => Spans::Table(t),
        None => Spans::Missing,
    };
    match style {
        Style::Standard => Parser::new(text, None, Spans::Reject)?.parse_standard_root(),
        Style::SpanIndex => Parser::new(text, None, span_mode)?.parse_standard_root(),
        Style::ShiftReduce => Parser::new(text, None, span_mode)?.parse_shift_reduce_root(),
    }
}

/// Renders `node` in `style`.
pub fn render_style(node: &LfNode, style: Style) -> String {
    match style {
        Style::Standard => serialize(node, false),
        Style::SpanIndex => {
            let mut next = 0;
            let mut out = String::new();
            write_span_index(node, &mut next, &mut out);
            out
        }
        Style::ShiftReduce => {
            let mut out = String::new();
            write_shift_reduce(node, &mut out);
            out
        }
    }
}

/// Converts `text` from one style to another. `spans` is required when
/// reading SpanIndex input.
pub fn convert_style(text: &str, from: Style, to: Style, spans: Option<&[String]>) -> Result<String, LfError> {
    let node = parse_style(text, from, spans)?;
    Ok(render_style(&node, to))
}

/// The span table of a Standard-style logical form: its quoted values in
/// source order.
pub fn extract_spans(text: &str) -> Result<Vec<String>, LfError> {
    Ok(parse_style(text, Style::Standard, None)?.spans())
}

fn write_span_index(node: &LfNode, next: &mut usize, out: &mut String) {
    out.push_str(&node.function);
    out.push('(');
    for (i, arg) in node.args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        match arg {
            LfArg::Node(n) => write_span_index(n, next, out),
            LfArg::Quoted(_) => {
                out.push('@');
                out.push_str(&next.to_string());
                *next += 1;
            }
            LfArg::Symbol(s) => out.push_str(s),
        }
    }
    out.push(')');
    for p in &node.predicates {
        out.push('.');
        write_span_index(p, next, out);
    }
}

fn write_shift_reduce(node: &LfNode, out: &mut String) {
    out.push('[');
    out.push_str(&node.function);
    for arg in &node.args {
        out.push(' ');
        match arg {
            LfArg::Node(n) => write_shift_reduce(n, out),
            LfArg::Quoted(s) => {
                out.push('"');
                out.push_str(&escape(s));
                out.push('"');
            }
            LfArg::Symbol(s) => out.push_str(s),
        }
    }
    out.push(' ');
    out.push_str(&node.function);
    out.push(']');
    for p in &node.predicates {
        out.push('.');
        write_shift_reduce(p, out);
    }
}
