use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::lexer::{tokenize, Keyword, Token, TokenKind};
use super::{ErrorKind, ParseError, SourceSpan};
use crate::inference::{Clause, Connective, Rule, Schema};

/// Parses a single rule. Newlines inside `src` are treated as whitespace.
pub fn parse_rule(src: &str, schema: &Schema) -> Result<Rule, ParseError> {
    parse_at(src, schema, 1, 0)
}

pub(crate) fn parse_at(src: &str, schema: &Schema, line: usize, base: usize) -> Result<Rule, ParseError> {
    let tokens = tokenize(src, line, base)?;
    let end = end_span(src, line, base, &tokens);
    Parser { tokens, pos: 0, end, schema }.rule()
}

// Span used for "unexpected end of rule": the last byte of the last token,
// or the start of the source when it has no tokens.
fn end_span(src: &str, line: usize, base: usize, tokens: &[Token<'_>]) -> SourceSpan {
    match tokens.last() {
        Some(t) => SourceSpan {
            column: t.span.column + t.span.length - 1,
            offset: t.span.offset + t.span.length - 1,
            length: 1,
            ..t.span
        },
        None => {
            let lead = src.len() - src.trim_start_matches([' ', '\t']).len();
            SourceSpan { line, column: lead + 1, length: 1, offset: base + lead }
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Antecedent,
    Consequent,
}

struct Parser<'a, 's> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    end: SourceSpan,
    schema: &'s Schema,
}

fn describe(kind: &TokenKind<'_>) -> String {
    match kind {
        TokenKind::Keyword(kw) => format!("keyword `{}`", kw.as_str()),
        TokenKind::Ident(name) => format!("identifier `{name}`"),
        TokenKind::LParen => "`(`".to_string(),
        TokenKind::RParen => "`)`".to_string(),
    }
}

impl<'a> Parser<'a, '_> {
    fn next(&mut self) -> Option<Token<'a>> {
        let t = self.tokens.get(self.pos).copied();
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos)
    }

    fn syntax(&self, span: SourceSpan, message: String) -> ParseError {
        ParseError::new(ErrorKind::Syntax, span, message)
    }

    fn expected(&self, what: &str, got: Option<Token<'a>>) -> ParseError {
        match got {
            Some(t) => self.syntax(t.span, format!("expected {what}, found {}", describe(&t.kind))),
            None => self.syntax(self.end, format!("expected {what}, found end of rule")),
        }
    }

    fn keyword(&mut self, kw: Keyword, what: &str) -> Result<(), ParseError> {
        match self.next() {
            Some(Token { kind: TokenKind::Keyword(k), .. }) if k == kw => Ok(()),
            other => Err(self.expected(what, other)),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(&'a str, SourceSpan), ParseError> {
        match self.next() {
            Some(Token { kind: TokenKind::Ident(name), span }) => Ok((name, span)),
            other => Err(self.expected(what, other)),
        }
    }

    fn rule(mut self) -> Result<Rule, ParseError> {
        self.keyword(Keyword::If, "`IF`")?;
        let mut antecedent = Vec::new();
        let mut connective: Option<Connective> = None;
        loop {
            antecedent.push(self.clause(Side::Antecedent)?);
            let tok = self.next();
            let conn = match tok.map(|t| t.kind) {
                Some(TokenKind::Keyword(Keyword::Then)) => break,
                Some(TokenKind::Keyword(Keyword::And)) => Connective::And,
                Some(TokenKind::Keyword(Keyword::Or)) => Connective::Or,
                _ => return Err(self.expected("`AND`, `OR` or `THEN`", tok)),
            };
            match connective {
                Some(c) if c != conn => {
                    return Err(ParseError::new(
                        ErrorKind::MixedConnective,
                        tok.map_or(self.end, |t| t.span),
                        format!(
                            "`{}` after `{}`: a rule may use only one kind of connective",
                            conn.keyword(),
                            c.keyword()
                        ),
                    ));
                }
                _ => connective = Some(conn),
            }
        }
        let consequent = self.clause(Side::Consequent)?;
        if let Some(t) = self.next() {
            return Err(self.syntax(t.span, format!("unexpected {} after the consequent", describe(&t.kind))));
        }
        Ok(Rule { connective: connective.unwrap_or(Connective::And), antecedent, consequent })
    }

    fn clause(&mut self, side: Side) -> Result<Clause, ParseError> {
        let parenthesized = matches!(self.peek(), Some(t) if t.kind == TokenKind::LParen);
        if parenthesized {
            self.pos += 1;
        }
        let (variable, var_span) = self.ident("a variable name")?;
        self.resolve_variable(variable, var_span, side)?;
        self.keyword(Keyword::Is, "`IS`")?;
        let (term, term_span) = self.ident("a term name")?;
        let v = self.schema.variable(variable).expect("variable resolved above");
        if v.term(term).is_none() {
            return Err(ParseError::new(
                ErrorKind::UnknownTerm,
                term_span,
                format!("variable `{variable}` has no term `{term}`"),
            ));
        }
        if parenthesized {
            match self.next() {
                Some(Token { kind: TokenKind::RParen, .. }) => {}
                other => return Err(self.expected("`)`", other)),
            }
        }
        Ok(Clause::new(variable, term))
    }

    fn resolve_variable(&self, name: &str, span: SourceSpan, side: Side) -> Result<(), ParseError> {
        let is_output = self.schema.output().name() == name;
        let is_input = self.schema.input(name).is_some();
        match (side, is_input, is_output) {
            (_, false, false) => Err(ParseError::new(
                ErrorKind::UnknownVariable,
                span,
                format!("unknown variable `{name}`"),
            )),
            (Side::Antecedent, _, true) => Err(ParseError::new(
                ErrorKind::WrongSide,
                span,
                format!("output variable `{name}` cannot appear in the condition"),
            )),
            (Side::Consequent, true, _) => Err(ParseError::new(
                ErrorKind::WrongSide,
                span,
                format!("input variable `{name}` cannot appear after THEN"),
            )),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{format_rule, parse_ruleset};
    use crate::inference::{LinguisticVariable, Term};
    use crate::membership::MembershipFunction;
    use alloc::vec;

    fn var(name: &str, terms: &[&str]) -> LinguisticVariable {
        let f = MembershipFunction::rising(0.0, 1.0).unwrap();
        LinguisticVariable::new(name, 0.0, 1.0, terms.iter().map(|t| Term::new(*t, f)).collect()).unwrap()
    }

    fn loan_schema() -> Schema {
        Schema::new(
            vec![
                var("penghasilan", &["rendah", "tinggi"]),
                var("pinjaman", &["rendah", "tinggi"]),
                var("jaminan", &["rendah", "tinggi"]),
            ],
            var("kelayakan", &["rendah", "tinggi"]),
        )
        .unwrap()
    }

    fn xyz_schema() -> Schema {
        Schema::new(vec![var("x", &["a"]), var("y", &["b"]), var("z", &["c"])], var("o", &["t"])).unwrap()
    }

    #[test]
    fn parses_loan_rule() {
        let r = parse_rule(
            "IF pinjaman IS tinggi AND jaminan IS rendah THEN kelayakan IS rendah",
            &loan_schema(),
        )
        .unwrap();
        assert_eq!(r.connective, Connective::And);
        assert_eq!(
            r.antecedent,
            vec![Clause::new("pinjaman", "tinggi"), Clause::new("jaminan", "rendah")]
        );
        assert_eq!(r.consequent, Clause::new("kelayakan", "rendah"));
    }

    #[test]
    fn parses_minimal_rule() {
        let schema = Schema::new(vec![var("x", &["a"])], var("y", &["b"])).unwrap();
        let r = parse_rule("IF x IS a THEN y IS b", &schema).unwrap();
        assert_eq!(r.antecedent, vec![Clause::new("x", "a")]);
        assert_eq!(r.consequent, Clause::new("y", "b"));
    }

    #[test]
    fn mixed_connective_points_at_or() {
        let src = "IF x IS a AND y IS b OR z IS c THEN o IS t";
        let err = parse_rule(src, &xyz_schema()).unwrap_err();
        assert_eq!(err.kind, ErrorKind::MixedConnective);
        let byte = src.find(" OR ").unwrap() + 1;
        assert_eq!(byte, 21);
        assert_eq!(err.span, SourceSpan { line: 1, column: 22, length: 2, offset: 21 });
        assert_eq!(&src[err.span.offset..err.span.offset + err.span.length], "OR");
    }

    #[test]
    fn parenthesized_clauses_and_mixed_case_keywords() {
        let schema = Schema::new(
            vec![var("x", &["A1", "A2"]), var("y", &["B1", "B2"])],
            var("z", &["C1", "C2"]),
        )
        .unwrap();
        let r = parse_rule("IF (x is A1) And (y is B2) THEN (z is C1)", &schema).unwrap();
        assert_eq!(r.antecedent, vec![Clause::new("x", "A1"), Clause::new("y", "B2")]);
        assert_eq!(r.consequent, Clause::new("z", "C1"));
        assert_eq!(format_rule(&r), "IF x IS A1 AND y IS B2 THEN z IS C1");

        let err = parse_rule("IF (x is A1 THEN z is C1", &schema).unwrap_err();
        assert_eq!(err.kind, ErrorKind::Syntax);
        assert_eq!(err.span.column, 13);
    }

    #[test]
    fn lowercase_keywords_normalize() {
        let schema = Schema::new(vec![var("X", &["A"])], var("Y", &["B"])).unwrap();
        let r = parse_rule("if X is A then Y is B", &schema).unwrap();
        assert_eq!(format_rule(&r), "IF X IS A THEN Y IS B");
    }

    #[test]
    fn error_kinds() {
        let s = xyz_schema();
        let kind = |src: &str| parse_rule(src, &s).unwrap_err().kind;
        assert_eq!(kind("IF q IS a THEN o IS t"), ErrorKind::UnknownVariable);
        assert_eq!(kind("IF x IS nope THEN o IS t"), ErrorKind::UnknownTerm);
        assert_eq!(kind("IF o IS t THEN o IS t"), ErrorKind::WrongSide);
        assert_eq!(kind("IF x IS a THEN x IS a"), ErrorKind::WrongSide);
        assert_eq!(kind("IF x IS a THEN o IS t extra"), ErrorKind::Syntax);
        assert_eq!(kind("IF x IS a"), ErrorKind::Syntax);
        assert_eq!(kind("x IS a THEN o IS t"), ErrorKind::Syntax);
        assert_eq!(kind("IF x IS a AND THEN o IS t"), ErrorKind::Syntax);
        assert_eq!(kind("IF x IS a THEN o IS t;"), ErrorKind::Syntax);
        assert_eq!(kind(""), ErrorKind::Syntax);
    }

    #[test]
    fn identifiers_are_case_sensitive() {
        let err = parse_rule("IF X IS a THEN o IS t", &xyz_schema()).unwrap_err();
        assert_eq!(err.kind, ErrorKind::UnknownVariable);
        assert_eq!((err.span.column, err.span.length), (4, 1));
    }

    #[test]
    fn first_error_in_source_order_wins() {
        let err = parse_rule("IF x IS nope AND y IS b OR z IS c THEN o IS t", &xyz_schema()).unwrap_err();
        assert_eq!(err.kind, ErrorKind::UnknownTerm);
    }

    #[test]
    fn ruleset_aggregates_errors_with_line_numbers() {
        let src = "IF x IS a THEN o IS t\nIF x IS zz THEN o IS t\n# comment\n\nIF y IS b THEN o IS t\r\nIF q IS a THEN o IS t\n";
        let errs = parse_ruleset(src, &xyz_schema()).unwrap_err();
        assert_eq!(errs.iter().map(|e| e.span.line).collect::<Vec<_>>(), vec![2, 6]);
        for e in &errs {
            let line = src.split('\n').nth(e.span.line - 1).unwrap();
            let from_line = &line[e.span.column - 1..e.span.column - 1 + e.span.length];
            let from_offset = &src[e.span.offset..e.span.offset + e.span.length];
            assert_eq!(from_line, from_offset);
        }
    }

    #[test]
    fn ruleset_with_comments_and_crlf() {
        let src = "# header\r\nIF x IS a THEN o IS t # trailing\r\n\r\nif y is b or z is c then o is t\r\n";
        let rules = parse_ruleset(src, &xyz_schema()).unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(rules[1].connective, Connective::Or);
    }

    #[test]
    fn empty_ruleset_is_an_error() {
        assert_eq!(parse_ruleset("", &xyz_schema()).unwrap_err().len(), 1);
        assert_eq!(parse_ruleset("# only a comment\n\n", &xyz_schema()).unwrap_err().len(), 1);
    }

    #[test]
    fn excerpt_marks_span() {
        let src = "IF x IS a AND y IS b OR z IS c THEN o IS t";
        let err = parse_rule(src, &xyz_schema()).unwrap_err();
        let ex = err.excerpt(src);
        assert_eq!(ex.lines().nth(1).unwrap(), format!("{}^^", " ".repeat(21)));
    }
}
