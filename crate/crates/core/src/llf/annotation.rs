//! Reader for corpus annotation files.
//!
//! Layout (1-based lines): line 1 `INC` or `EXC`, line 3 the raw criterion,
//! line 5 the augmented criterion, line 7 onward the logical form (which may
//! span several lines when pretty-printed, and may be blank when not yet
//! annotated). Even lines are separators and ignored.

use super::ast::{Criterion, Polarity};
use super::catalog::FunctionCatalog;
use super::parser::parse;
use super::LfError;

pub fn read_annotation(text: &str, catalog: &FunctionCatalog, line_number: usize) -> Result<Criterion, LfError> {
    let lines: Vec<&str> = text.lines().collect();
    let get = |n: usize| lines.get(n - 1).map(|l| l.trim()).unwrap_or("");
    let polarity = Polarity::from_header(get(1))
        .ok_or_else(|| LfError::Annotation { line: 1, message: format!("expected INC or EXC, found `{}`", get(1)) })?;
    let raw_text = get(3).to_string();
    if raw_text.is_empty() {
        return Err(LfError::Annotation { line: 3, message: "missing raw criterion".into() });
    }
    let augmented = get(5);
    let lf_text = lines.iter().skip(6).copied().collect::<Vec<_>>().join("\n");
    let logical_form = if lf_text.trim().is_empty() { None } else { Some(parse(&lf_text, catalog)?) };
    Ok(Criterion {
        polarity,
        raw_text,
        augmented_text: (!augmented.is_empty()).then(|| augmented.to_string()),
        logical_form,
        line_number,
    })
}

/// True when `text` looks like an annotation file rather than a bare
/// logical form.
pub fn is_annotation(text: &str) -> bool {
    text.lines().next().and_then(Polarity::from_header).is_some()
}
