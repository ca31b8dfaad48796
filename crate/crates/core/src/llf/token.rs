use std::borrow::Cow;

use super::LfError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Identifier,
    OpenParen,
    CloseParen,
    Comma,
    Dot,
    QuotedString,
    OpenBracket,
    CloseBracket,
    Whitespace,
    /// `@k`, a reference to the k-th quoted span of a criterion.
    SpanRef,
}

/// A lexeme. `text` is the exact source slice, so concatenating the texts of
/// a token stream reproduces the input; [`Token::value`] gives the unquoted,
/// unescaped content of a quoted string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 0-based character offset of the first character.
    pub position: usize,
}

impl Token {
    pub fn value(&self) -> Cow<'_, str> {
        match self.kind {
            TokenKind::QuotedString => {
                let inner = &self.text[1..self.text.len() - 1];
                if inner.contains('\\') {
                    Cow::Owned(unescape(inner))
                } else {
                    Cow::Borrowed(inner)
                }
            }
            TokenKind::SpanRef => Cow::Borrowed(&self.text[1..]),
            _ => Cow::Borrowed(&self.text),
        }
    }

    pub fn is_trivia(&self) -> bool {
        self.kind == TokenKind::Whitespace
    }

    /// Character offset one past the end of this token.
    pub fn end(&self) -> usize {
        self.position + self.text.chars().count()
    }
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.peek() {
                Some('"') => {
                    out.push('"');
                    chars.next();
                }
                Some('\\') => {
                    out.push('\\');
                    chars.next();
                }
                _ => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// Escapes a value for use between double quotes.
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LfError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let byte_at = |ci: usize| chars.get(ci).map(|&(b, _)| b).unwrap_or(text.len());
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        let start = i;
        let kind = match c {
            '(' => {
                i += 1;
                TokenKind::OpenParen
            }
            ')' => {
                i += 1;
                TokenKind::CloseParen
            }
            '[' => {
                i += 1;
                TokenKind::OpenBracket
            }
            ']' => {
                i += 1;
                TokenKind::CloseBracket
            }
            ',' => {
                i += 1;
                TokenKind::Comma
            }
            '.' => {
                i += 1;
                TokenKind::Dot
            }
            '"' => {
                i += 1;
                loop {
                    match chars.get(i).map(|&(_, c)| c) {
                        None => return Err(LfError::UnterminatedString { position: start }),
                        Some('\\') => i += 2,
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some(_) => i += 1,
                    }
                }
                TokenKind::QuotedString
            }
            '@' => {
                i += 1;
                let digits_start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                if i == digits_start {
                    return Err(LfError::IllegalCharacter { position: start, ch: c });
                }
                TokenKind::SpanRef
            }
            c if c.is_whitespace() => {
                while i < chars.len() && chars[i].1.is_whitespace() {
                    i += 1;
                }
                TokenKind::Whitespace
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                TokenKind::Identifier
            }
            other => return Err(LfError::IllegalCharacter { position: start, ch: other }),
        };
        tokens.push(Token { kind, text: text[byte_at(start)..byte_at(i)].to_string(), position: start });
    }
    Ok(tokens)
}
