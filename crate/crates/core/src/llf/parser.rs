//! Recursive-descent parsers for the Standard and Shift-Reduce syntaxes.
//!
//! Standard grammar (whitespace between tokens is insignificant):
//!
//! ```text
//! expr   := call ('.' call)*
//! call   := IDENT '(' [arg (',' arg)*] ')'
//! arg    := QUOTED | SYMBOL | expr
//! ```
//!
//! Shift-Reduce grammar:
//!
//! ```text
//! expr   := call ('.' call)*
//! call   := '[' IDENT arg* IDENT ']'      (closing IDENT repeats the opening one)
//! ```

use super::ast::{LfArg, LfNode};
use super::catalog::{is_function_name, FunctionCatalog};
use super::token::{tokenize, Token, TokenKind};
use super::LfError;

/// How `@k` span references are treated.
#[derive(Clone, Copy)]
pub(crate) enum Spans<'a> {
    Reject,
    Missing,
    Table(&'a [String]),
}

pub(crate) struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    catalog: Option<&'a FunctionCatalog>,
    spans: Spans<'a>,
}

/// Parses a single Standard-style logical form and checks every function
/// name and argument count against `catalog`.
pub fn parse(text: &str, catalog: &FunctionCatalog) -> Result<LfNode, LfError> {
    Parser::new(text, Some(catalog), Spans::Reject)?.parse_standard_root()
}

/// Parses Standard syntax without consulting a catalog.
pub fn parse_unchecked(text: &str) -> Result<LfNode, LfError> {
    Parser::new(text, None, Spans::Reject)?.parse_standard_root()
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &str, catalog: Option<&'a FunctionCatalog>, spans: Spans<'a>) -> Result<Self, LfError> {
        let end = text.chars().count();
        let tokens = tokenize(text)?.into_iter().filter(|t| !t.is_trivia()).collect();
        Ok(Parser { tokens, pos: 0, end, catalog, spans })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset)
    }

    fn here(&self) -> usize {
        self.peek().map(|t| t.position).unwrap_or(self.end)
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(t) => format!("`{}`", t.text),
            None => "end of input".to_string(),
        }
    }

    fn syntax(&self, expected: &str) -> LfError {
        LfError::Syntax { position: self.here(), expected: expected.to_string(), found: self.found() }
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> Result<Token, LfError> {
        match self.peek() {
            Some(t) if t.kind == kind => {
                let t = t.clone();
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.syntax(expected)),
        }
    }

    fn finish(&self) -> Result<(), LfError> {
        if self.pos < self.tokens.len() {
            return Err(self.syntax("end of input"));
        }
        Ok(())
    }

    fn function_name(&mut self) -> Result<(String, usize), LfError> {
        let tok = self.expect(TokenKind::Identifier, "function name")?;
        if !is_function_name(&tok.text) {
            if let Some(cat) = self.catalog {
                if cat.get(&tok.text).is_none() {
                    return Err(LfError::UnknownFunction { name: tok.text, position: tok.position });
                }
            }
            return Err(LfError::Syntax {
                position: tok.position,
                expected: "lower-case function name".into(),
                found: format!("`{}`", tok.text),
            });
        }
        if let Some(cat) = self.catalog {
            if cat.get(&tok.text).is_none() {
                return Err(LfError::UnknownFunction { name: tok.text, position: tok.position });
            }
        }
        Ok((tok.text, tok.position))
    }

    fn check_arity(&self, node: &LfNode) -> Result<(), LfError> {
        if let Some(entry) = self.catalog.and_then(|c| c.get(&node.function)) {
            if !entry.arity.accepts(node.args.len()) {
                return Err(LfError::Arity {
                    name: node.function.clone(),
                    got: node.args.len(),
                    allowed: entry.arity.to_string(),
                });
            }
        }
        Ok(())
    }

    fn span_value(&self, tok: &Token) -> Result<String, LfError> {
        match self.spans {
            Spans::Reject => Err(LfError::Syntax {
                position: tok.position,
                expected: "argument".into(),
                found: format!("`{}`", tok.text),
            }),
            Spans::Missing => Err(LfError::MissingSpanTable),
            Spans::Table(table) => {
                let k: usize = tok.value().parse().map_err(|_| LfError::SpanIndexOutOfRange { index: usize::MAX })?;
                table.get(k).cloned().ok_or(LfError::SpanIndexOutOfRange { index: k })
            }
        }
    }

    // ---- Standard ----

    pub(crate) fn parse_standard_root(mut self) -> Result<LfNode, LfError> {
        let mut node = self.standard_expr()?;
        self.finish()?;
        node.assign_span_indices();
        Ok(node)
    }

    fn standard_expr(&mut self) -> Result<LfNode, LfError> {
        let mut head = self.standard_call()?;
        while self.peek_kind() == Some(TokenKind::Dot) {
            self.pos += 1;
            let pred = self.standard_call()?;
            head.predicates.push(pred);
        }
        Ok(head)
    }

    fn standard_call(&mut self) -> Result<LfNode, LfError> {
        let (name, _) = self.function_name()?;
        self.expect(TokenKind::OpenParen, "`(`")?;
        let mut node = LfNode::new(name);
        if self.peek_kind() != Some(TokenKind::CloseParen) {
            loop {
                let arg = self.standard_arg()?;
                node.args.push(arg);
                match self.peek_kind() {
                    Some(TokenKind::Comma) => self.pos += 1,
                    Some(TokenKind::CloseParen) => break,
                    _ => return Err(self.syntax("`,` or `)`")),
                }
            }
        }
        self.expect(TokenKind::CloseParen, "`)`")?;
        self.check_arity(&node)?;
        Ok(node)
    }

    fn standard_arg(&mut self) -> Result<LfArg, LfError> {
        let tok = self.peek().cloned().ok_or_else(|| self.syntax("argument"))?;
        match tok.kind {
            TokenKind::QuotedString => {
                self.pos += 1;
                Ok(LfArg::Quoted(tok.value().into_owned()))
            }
            TokenKind::SpanRef => {
                let v = self.span_value(&tok)?;
                self.pos += 1;
                Ok(LfArg::Quoted(v))
            }
            TokenKind::Identifier => {
                let is_call = self.peek_at(1).map(|t| t.kind) == Some(TokenKind::OpenParen);
                if is_call {
                    Ok(LfArg::Node(self.standard_expr()?))
                } else if is_symbol(&tok.text) {
                    self.pos += 1;
                    Ok(LfArg::Symbol(tok.text))
                } else {
                    self.pos += 1;
                    Err(self.syntax("`(`"))
                }
            }
            _ => Err(self.syntax("argument")),
        }
    }

    // ---- Shift-Reduce ----

    pub(crate) fn parse_shift_reduce_root(mut self) -> Result<LfNode, LfError> {
        let mut node = self.sr_expr()?;
        if self.pos < self.tokens.len() {
            return Err(LfError::MalformedStyle {
                position: self.here(),
                message: format!("expected end of input, found {}", self.found()),
            });
        }
        node.assign_span_indices();
        Ok(node)
    }

    fn malformed(&self, message: &str) -> LfError {
        LfError::MalformedStyle { position: self.here(), message: format!("{message}, found {}", self.found()) }
    }

    fn sr_expr(&mut self) -> Result<LfNode, LfError> {
        let mut head = self.sr_call()?;
        while self.peek_kind() == Some(TokenKind::Dot) {
            self.pos += 1;
            head.predicates.push(self.sr_call()?);
        }
        Ok(head)
    }

    fn sr_call(&mut self) -> Result<LfNode, LfError> {
        if self.peek_kind() != Some(TokenKind::OpenBracket) {
            return Err(self.malformed("expected `[`"));
        }
        self.pos += 1;
        let name = match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier && is_function_name(&t.text) => t.text.clone(),
            _ => return Err(self.malformed("expected function name")),
        };
        self.pos += 1;
        let mut node = LfNode::new(name);
        loop {
            let tok = self.peek().cloned().ok_or_else(|| self.malformed("expected argument or `]`"))?;
            match tok.kind {
                TokenKind::Identifier if self.peek_at(1).map(|t| t.kind) == Some(TokenKind::CloseBracket) => {
                    if tok.text != node.function {
                        return Err(LfError::MalformedStyle {
                            position: tok.position,
                            message: format!("closing name `{}` does not match `{}`", tok.text, node.function),
                        });
                    }
                    self.pos += 2;
                    break;
                }
                TokenKind::Identifier if is_symbol(&tok.text) => {
                    self.pos += 1;
                    node.args.push(LfArg::Symbol(tok.text));
                }
                TokenKind::QuotedString => {
                    self.pos += 1;
                    node.args.push(LfArg::Quoted(tok.value().into_owned()));
                }
                TokenKind::SpanRef => {
                    let v = self.span_value(&tok)?;
                    self.pos += 1;
                    node.args.push(LfArg::Quoted(v));
                }
                TokenKind::OpenBracket => node.args.push(LfArg::Node(self.sr_expr()?)),
                _ => return Err(self.malformed("expected argument or closing name")),
            }
        }
        Ok(node)
    }
}

/// Bare symbols are upper-case: `[A-Z][A-Z0-9_]*`.
pub fn is_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIABETES: &str =
        r#"intersect(cond("Diabetic"), union(female(), male()), age().num_filter(eq(op(GT), val("65"))))"#;

    fn cat() -> FunctionCatalog {
        FunctionCatalog::builtin()
    }

    #[test]
    fn diabetes_example_tree() {
        let root = parse(DIABETES, &cat()).unwrap();
        assert_eq!(root.function, "intersect");
        assert_eq!(root.args.len(), 3);
        let cond = root.args[0].as_node().unwrap();
        assert_eq!(cond.function, "cond");
        assert_eq!(cond.quoted(), Some("Diabetic"));
        let union = root.args[1].as_node().unwrap();
        assert_eq!(union.function, "union");
        let kids: Vec<_> = union.node_args().map(|n| n.function.as_str()).collect();
        assert_eq!(kids, ["female", "male"]);
        let age = root.args[2].as_node().unwrap();
        assert_eq!(age.function, "age");
        assert!(age.args.is_empty());
        assert_eq!(age.predicates.len(), 1);
        let nf = &age.predicates[0];
        assert_eq!(nf.function, "num_filter");
        let eq = nf.args[0].as_node().unwrap();
        assert_eq!(eq.function, "eq");
        let op = eq.args[0].as_node().unwrap();
        assert_eq!((op.function.as_str(), op.args[0].as_symbol()), ("op", Some("GT")));
        let val = eq.args[1].as_node().unwrap();
        assert_eq!((val.function.as_str(), val.quoted()), ("val", Some("65")));
    }

    #[test]
    fn zero_arity() {
        assert_eq!(parse("female()", &cat()).unwrap(), LfNode::new("female"));
    }

    #[test]
    fn whitespace_is_insignificant() {
        let spaced = "intersect(\n    cond( \"Diabetic\" ) ,\n\tunion(female(),male()),\n    age() . num_filter(eq(op(GT), val(\"65\")))\n)";
        assert_eq!(parse(spaced, &cat()).unwrap(), parse(DIABETES, &cat()).unwrap());
    }

    #[test]
    fn unknown_function() {
        assert_eq!(
            parse("intersect(cond(\"a\"), frob())", &cat()),
            Err(LfError::UnknownFunction { name: "frob".into(), position: 21 })
        );
    }

    #[test]
    fn arity_error() {
        assert_eq!(
            parse(r#"eq(val("1"))"#, &cat()),
            Err(LfError::Arity { name: "eq".into(), got: 1, allowed: "2".into() })
        );
        assert_eq!(
            parse(r#"female("x")"#, &cat()),
            Err(LfError::Arity { name: "female".into(), got: 1, allowed: "0".into() })
        );
    }

    #[test]
    fn syntax_error_positions() {
        let cases = [
            ("cond(\"a\"", 8, "`,` or `)`"),
            ("cond(\"a\"))", 9, "end of input"),
            ("cond(\"a\" \"b\")", 9, "`,` or `)`"),
            ("cond(,)", 5, "argument"),
            ("(cond)", 0, "function name"),
            ("age().", 6, "function name"),
            ("cond(foo)", 8, "`(`"),
        ];
        for (text, pos, expected) in cases {
            match parse(text, &cat()) {
                Err(LfError::Syntax { position, expected: e, .. }) => {
                    assert_eq!((position, e.as_str()), (pos, expected), "{text}")
                }
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn span_refs_rejected_in_standard() {
        assert!(matches!(parse("cond(@0)", &cat()), Err(LfError::Syntax { position: 5, .. })));
    }

    #[test]
    fn chained_predicates_attach_to_head() {
        let n = parse(r#"lab("platelet count").num_filter(eq(op(GTEQ), val("2"))).before(cond("x"))"#, &cat()).unwrap();
        let preds: Vec<_> = n.predicates.iter().map(|p| p.function.as_str()).collect();
        assert_eq!(preds, ["num_filter", "before"]);
    }
}
