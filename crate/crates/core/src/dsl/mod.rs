//! The textual rule language.
//!
//! ```text
//! rule   := "IF" clause (conn clause)* "THEN" clause
//! conn   := "AND" | "OR"
//! clause := IDENT "IS" IDENT | "(" IDENT "IS" IDENT ")"
//! ```
//!
//! Keywords are case-insensitive, identifiers are case-sensitive
//! `[A-Za-z_][A-Za-z0-9_]*`, and all connectives within one rule must be the
//! same. A rule file holds one rule per non-empty line; `#` starts a comment
//! that runs to the end of the line.
//!
//! Columns and lengths in [`SourceSpan`] count bytes.

mod lexer;
mod parser;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::inference::{Rule, Schema};

pub use parser::parse_rule;

/// Location of an error in the source, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
    /// Byte offset from the start of the whole source.
    pub offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ErrorKind {
    Syntax,
    UnknownVariable,
    UnknownTerm,
    /// An input variable in the consequent or the output variable in the antecedent.
    WrongSide,
    MixedConnective,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ParseError {
    pub kind: ErrorKind,
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(kind: ErrorKind, span: SourceSpan, message: String) -> Self {
        ParseError { kind, span, message }
    }

    /// The offending line with a caret marker under the span.
    pub fn excerpt(&self, src: &str) -> String {
        let Some(line) = src.split('\n').nth(self.span.line - 1) else {
            return String::new();
        };
        let line = line.strip_suffix('\r').unwrap_or(line);
        let mut out = String::new();
        out.push_str(line);
        out.push('\n');
        for _ in 1..self.span.column {
            out.push(' ');
        }
        for _ in 0..self.span.length.max(1) {
            out.push('^');
        }
        out
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.column, self.message)
    }
}

impl core::error::Error for ParseError {}

/// True for identifiers usable as variable or term names: valid identifier
/// syntax and not a keyword.
pub fn is_valid_name(s: &str) -> bool {
    lexer::is_identifier(s) && lexer::Keyword::lookup(s).is_none()
}

/// Parses a rule file. Either every rule parses, or every error is returned.
pub fn parse_ruleset(src: &str, schema: &Schema) -> Result<Vec<Rule>, Vec<ParseError>> {
    let mut rules = Vec::new();
    let mut errors = Vec::new();
    let mut offset = 0usize;
    for (i, raw) in src.split('\n').enumerate() {
        let start = offset;
        offset += raw.len() + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let content = line.find('#').map_or(line, |p| &line[..p]);
        if content.trim().is_empty() {
            continue;
        }
        match parser::parse_at(line, schema, i + 1, start) {
            Ok(rule) => rules.push(rule),
            Err(e) => errors.push(e),
        }
    }
    if rules.is_empty() && errors.is_empty() {
        errors.push(ParseError::new(
            ErrorKind::Syntax,
            SourceSpan { line: 1, column: 1, length: 1, offset: 0 },
            "rule set contains no rules".into(),
        ));
    }
    if errors.is_empty() {
        Ok(rules)
    } else {
        Err(errors)
    }
}

/// Canonical single-line form of a rule.
pub fn format_rule(rule: &Rule) -> String {
    let mut out = String::from("IF ");
    for (i, c) in rule.antecedent.iter().enumerate() {
        if i > 0 {
            out.push(' ');
            out.push_str(rule.connective.keyword());
            out.push(' ');
        }
        out.push_str(&c.variable);
        out.push_str(" IS ");
        out.push_str(&c.term);
    }
    out.push_str(" THEN ");
    out.push_str(&rule.consequent.variable);
    out.push_str(" IS ");
    out.push_str(&rule.consequent.term);
    out
}
