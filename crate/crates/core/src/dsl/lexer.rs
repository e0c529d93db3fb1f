use alloc::format;
use alloc::vec::Vec;

use super::{ErrorKind, ParseError, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Keyword {
    If,
    Then,
    And,
    Or,
    Is,
}

impl Keyword {
    pub(crate) fn as_str(self) -> &'static str {
        match self {
            Keyword::If => "IF",
            Keyword::Then => "THEN",
            Keyword::And => "AND",
            Keyword::Or => "OR",
            Keyword::Is => "IS",
        }
    }

    pub(crate) fn lookup(word: &str) -> Option<Keyword> {
        const TABLE: [(&str, Keyword); 5] = [
            ("if", Keyword::If),
            ("then", Keyword::Then),
            ("and", Keyword::And),
            ("or", Keyword::Or),
            ("is", Keyword::Is),
        ];
        TABLE.iter().find(|(k, _)| k.eq_ignore_ascii_case(word)).map(|&(_, kw)| kw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TokenKind<'a> {
    Keyword(Keyword),
    Ident(&'a str),
    LParen,
    RParen,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Token<'a> {
    pub kind: TokenKind<'a>,
    pub span: SourceSpan,
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_continue(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let bytes = s.as_bytes();
    matches!(bytes.first(), Some(&b) if is_ident_start(b)) && bytes.iter().all(|&b| is_ident_continue(b))
}

/// Tokenizes `src`. `line` and `base` are the 1-based line number and byte
/// offset of `src[0]` in the enclosing document.
pub(crate) fn tokenize(src: &str, line: usize, base: usize) -> Result<Vec<Token<'_>>, ParseError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut line = line;
    let mut line_start = 0usize;
    let mut i = 0usize;
    let span = |start: usize, len: usize, line: usize, line_start: usize| SourceSpan {
        line,
        column: start - line_start + 1,
        length: len,
        offset: base + start,
    };
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b'\n' => {
                i += 1;
                line += 1;
                line_start = i;
            }
            b' ' | b'\t' | b'\r' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' | b')' => {
                let kind = if b == b'(' { TokenKind::LParen } else { TokenKind::RParen };
                tokens.push(Token { kind, span: span(i, 1, line, line_start) });
                i += 1;
            }
            _ if is_ident_start(b) => {
                let start = i;
                while i < bytes.len() && is_ident_continue(bytes[i]) {
                    i += 1;
                }
                let word = &src[start..i];
                let kind = match Keyword::lookup(word) {
                    Some(kw) => TokenKind::Keyword(kw),
                    None => TokenKind::Ident(word),
                };
                tokens.push(Token { kind, span: span(start, i - start, line, line_start) });
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('\u{fffd}');
                return Err(ParseError::new(
                    ErrorKind::Syntax,
                    span(i, ch.len_utf8(), line, line_start),
                    format!("unexpected character `{}`", ch.escape_debug()),
                ));
            }
        }
    }
    Ok(tokens)
}
