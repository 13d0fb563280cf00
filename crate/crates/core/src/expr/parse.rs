use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

use super::{ExprNode, MAX_INT_EXPONENT};
use crate::scalar::parse_decimal_ratio;

/// Byte range `[start, end)` into the parsed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> Self {
        SourceSpan { start, end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Found something other than what the grammar allows here.
    Unexpected {
        expected: String,
        found: String,
    },
    UnknownIdentifier(String),
    InvalidNumber(String),
    /// Exponents must fold to a literal.
    NonConstantExponent,
    ExponentTooLarge,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at {span}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    fn new(kind: ParseErrorKind, span: SourceSpan) -> Self {
        let message = match &kind {
            ParseErrorKind::Unexpected { expected, found } => format!("expected {expected}, found {found}"),
            ParseErrorKind::UnknownIdentifier(name) => {
                format!("unknown identifier `{name}` (known: x, exp, ln, plus)")
            }
            ParseErrorKind::InvalidNumber(text) => format!("invalid number `{text}`"),
            ParseErrorKind::NonConstantExponent => "exponent must be a constant".to_string(),
            ParseErrorKind::ExponentTooLarge => format!("exponent magnitude exceeds {MAX_INT_EXPONENT}"),
        };
        ParseError { kind, span, message }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(_) => "number".to_string(),
            Tok::Ident(name) => format!("`{name}`"),
            Tok::Plus => "`+`".to_string(),
            Tok::Minus => "`-`".to_string(),
            Tok::Star => "`*`".to_string(),
            Tok::Slash => "`/`".to_string(),
            Tok::Caret => "`^`".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::End => "end of input".to_string(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, SourceSpan::new(start, start + 1)));
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let literal = &text[start..i];
            let value = parse_decimal_ratio(literal).ok_or_else(|| {
                ParseError::new(ParseErrorKind::InvalidNumber(literal.to_string()), SourceSpan::new(start, i))
            })?;
            out.push((Tok::Number(value), SourceSpan::new(start, i)));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), SourceSpan::new(start, i)));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            let end = start + ch.len_utf8();
            return Err(ParseError::new(
                ParseErrorKind::Unexpected { expected: "expression".to_string(), found: format!("`{ch}`") },
                SourceSpan::new(start, end),
            ));
        }
    }
    out.push((Tok::End, SourceSpan::new(text.len(), text.len())));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::new(
            ParseErrorKind::Unexpected { expected: expected.to_string(), found: self.peek().describe() },
            self.span(),
        )
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<SourceSpan, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expr(&mut self) -> Result<ExprNode, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = ExprNode::add(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = ExprNode::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprNode, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = ExprNode::mul(lhs, self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = ExprNode::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<ExprNode, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(ExprNode::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprNode, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let start = self.span().start;
        let exponent = self.unary()?;
        let end = self.tokens[self.pos.saturating_sub(1)].1.end;
        let span = SourceSpan::new(start, end.max(start));
        let value = match exponent {
            ExprNode::Const(c) => c,
            _ => return Err(ParseError::new(ParseErrorKind::NonConstantExponent, span)),
        };
        if value.abs() > BigRational::from_integer(MAX_INT_EXPONENT.into()) {
            return Err(ParseError::new(ParseErrorKind::ExponentTooLarge, span));
        }
        Ok(ExprNode::pow_ratio(base, value))
    }

    fn atom(&mut self) -> Result<ExprNode, ParseError> {
        match self.peek().clone() {
            Tok::Number(value) => {
                self.bump();
                Ok(ExprNode::Const(value))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let span = self.span();
                self.bump();
                let build: fn(ExprNode) -> ExprNode = match name.as_str() {
                    "x" => return Ok(ExprNode::X),
                    "exp" => ExprNode::exp,
                    "ln" => ExprNode::ln,
                    "plus" => ExprNode::plus,
                    _ => return Err(ParseError::new(ParseErrorKind::UnknownIdentifier(name), span)),
                };
                self.expect(Tok::LParen, "`(` after function name")?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(build(arg))
            }
            _ => Err(self.unexpected("number, `x`, `(` or function")),
        }
    }
}

/// Parses integrand text into an expression tree.
pub fn parse(text: &str) -> Result<ExprNode, ParseError> {
    let mut p = Parser { tokens: tokenize(text)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Exponent;

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn reciprocal_structure() {
        assert_eq!(parse("1/x").unwrap(), ExprNode::Div(Box::new(ExprNode::int(1)), Box::new(ExprNode::X)));
    }

    #[test]
    fn plus_power_structure() {
        let want = ExprNode::Pow(
            Box::new(ExprNode::Plus(Box::new(ExprNode::Sub(
                Box::new(ExprNode::X),
                Box::new(ExprNode::Const(ratio(3, 5))),
            )))),
            Exponent::Int(7),
        );
        assert_eq!(parse("plus(x-0.6)^7").unwrap(), want);
        assert_eq!(parse("  plus ( x - 0.6 ) ^ 7 ").unwrap(), want);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("2^3^2").unwrap(), ExprNode::int(512));
        assert_eq!(parse("1+2*3^2").unwrap(), ExprNode::int(19));
        assert_eq!(parse("-2^2").unwrap(), ExprNode::int(-4));
        assert_eq!(parse("2^-1").unwrap(), ExprNode::Const(ratio(1, 2)));
        assert_eq!(parse("8-3-2").unwrap(), ExprNode::int(3));
        assert_eq!(parse("8/4/2").unwrap(), ExprNode::int(1));
        assert_eq!(
            parse("-x^2").unwrap(),
            ExprNode::Neg(Box::new(ExprNode::Pow(Box::new(ExprNode::X), Exponent::Int(2))))
        );
    }

    #[test]
    fn number_forms() {
        assert_eq!(parse("1e-3").unwrap(), ExprNode::Const(ratio(1, 1000)));
        assert_eq!(parse("2.5E+1").unwrap(), ExprNode::int(25));
        assert_eq!(parse(".5").unwrap(), ExprNode::Const(ratio(1, 2)));
    }

    #[test]
    fn real_exponent_kept() {
        let e = parse("x^0.5").unwrap();
        assert_eq!(e, ExprNode::Pow(Box::new(ExprNode::X), Exponent::Real(ratio(1, 2))));
    }

    #[test]
    fn syntax_errors_carry_spans() {
        let err = parse("1 + ").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Unexpected { .. }));
        assert_eq!(err.span, SourceSpan::new(4, 4));

        let err = parse("sin(x)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("sin".to_string()));
        assert_eq!(err.span, SourceSpan::new(0, 3));

        let err = parse("(x + 1").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(6, 6));
        assert!(err.message.contains("`)`"));

        let err = parse("x ^ x").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NonConstantExponent);
        assert_eq!(err.span, SourceSpan::new(4, 5));

        let err = parse("x $ 2").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(2, 3));

        let err = parse("1.2.3").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::InvalidNumber(_)));

        let err = parse("x y").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(2, 3));

        assert!(matches!(parse("x^100000").unwrap_err().kind, ParseErrorKind::ExponentTooLarge));
        assert!(parse("").is_err());
    }
}
