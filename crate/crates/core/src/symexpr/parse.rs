//! Text grammar for expressions in configs and on the command line.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := number | ident | '(' expr ')'
//! ```
//!
//! Identifiers `x1, y2, pi_1_2, piA_1_2, piA_1_x2, p_1_A2, p` name chart
//! coordinates; any other identifier is a free parameter.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::{CoordName, Expr, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |p| before[p + 1..].chars().count()) + 1;
    (line, column)
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, toks: Vec::new() };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit())) {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let int_part = &src[start..i];
                let mut value = if int_part.is_empty() {
                    Rational::zero()
                } else {
                    Rational::from_integer(int_part.parse::<BigInt>().unwrap())
                };
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let fs = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let frac = &src[fs..i];
                    if !frac.is_empty() {
                        let scale = num_traits::pow(BigInt::from(10), frac.len());
                        value += Rational::new(frac.parse::<BigInt>().unwrap(), scale);
                    }
                }
                lx.toks.push((Tok::Num(value), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                lx.toks.push((Tok::Ident(src[start..i].to_string()), start));
            } else if "+-*/^()".contains(c) {
                lx.toks.push((Tok::Op(c), i));
                i += 1;
            } else {
                return Err(lx.error(i, format!("unexpected character '{c}'")));
            }
        }
        Ok(lx.toks)
    }

    fn error(&self, offset: usize, message: String) -> ParseError {
        let (line, column) = position(self.src, offset);
        ParseError { line, column, message }
    }
}

fn parse_index(s: &str) -> Option<u8> {
    s.parse::<u8>().ok().filter(|v| *v >= 1)
}

/// Maps an identifier onto a chart coordinate, or a free parameter.
pub(crate) fn coord_from_ident(id: &str) -> Result<CoordName, String> {
    let bad = || format!("malformed coordinate name '{id}'");
    if id == "p" {
        return Ok(CoordName::MomScalar);
    }
    if let Some(rest) = id.strip_prefix("piA_") {
        let (a, b) = rest.split_once('_').ok_or_else(bad)?;
        let a = parse_index(a).ok_or_else(bad)?;
        return match b.strip_prefix('x') {
            Some(i) => Ok(CoordName::FrameKN(a, parse_index(i).ok_or_else(bad)?)),
            None => Ok(CoordName::FrameKK(a, parse_index(b).ok_or_else(bad)?)),
        };
    }
    if let Some(rest) = id.strip_prefix("pi_") {
        let (i, j) = rest.split_once('_').ok_or_else(bad)?;
        return Ok(CoordName::FrameNN(parse_index(i).ok_or_else(bad)?, parse_index(j).ok_or_else(bad)?));
    }
    if let Some(rest) = id.strip_prefix("p_") {
        let (i, a) = rest.split_once('_').ok_or_else(bad)?;
        let a = a.strip_prefix('A').ok_or_else(bad)?;
        return Ok(CoordName::MomP(parse_index(i).ok_or_else(bad)?, parse_index(a).ok_or_else(bad)?));
    }
    for (prefix, ctor) in [("x", CoordName::BaseX as fn(u8) -> CoordName), ("y", CoordName::FiberY)] {
        if let Some(rest) = id.strip_prefix(prefix) {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                return Ok(ctor(parse_index(rest).ok_or_else(bad)?));
            }
        }
    }
    Ok(CoordName::param(id))
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    chart: Option<(usize, usize)>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src.len(), |(_, o)| *o)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = position(self.src, self.offset());
        ParseError { line, column, message: message.into() }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let at = self.offset();
            let rhs = self.unary()?;
            acc = if c == '*' {
                &acc * &rhs
            } else {
                acc.checked_div(&rhs).map_err(|e| {
                    let (line, column) = position(self.src, at);
                    ParseError { line, column, message: e.to_string() }
                })?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        if let Some(Tok::Op('+')) = self.peek() {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(r)) if r.is_integer() && r >= Rational::zero() => {
                    self.pos += 1;
                    let e: u32 = r.to_integer().try_into().map_err(|_| self.err("exponent too large"))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(self.err("expected a nonnegative integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(Expr::from_rational(r))
            }
            Some(Tok::Ident(id)) => {
                let c = coord_from_ident(&id).map_err(|m| self.err(m))?;
                if let Some((n, k)) = self.chart {
                    if !c.fits_chart(n, k) {
                        return Err(self.err(format!("coordinate '{id}' is outside the chart n={n}, k={k}")));
                    }
                }
                self.pos += 1;
                Ok(Expr::var(c))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err(self.err("expected ')'")),
                }
            }
            Some(t) => Err(self.err(format!("unexpected token {t:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses an expression; with `chart = Some((n, k))` coordinate indices are range-checked.
pub fn parse_expr(src: &str, chart: Option<(usize, usize)>) -> Result<Expr, ParseError> {
    let toks = Lexer::run(src)?;
    let mut p = Parser { src, toks, pos: 0, chart };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::rat;

    #[test]
    fn coordinate_names() {
        assert_eq!(coord_from_ident("x1").unwrap(), CoordName::BaseX(1));
        assert_eq!(coord_from_ident("y2").unwrap(), CoordName::FiberY(2));
        assert_eq!(coord_from_ident("pi_1_2").unwrap(), CoordName::FrameNN(1, 2));
        assert_eq!(coord_from_ident("piA_1_2").unwrap(), CoordName::FrameKK(1, 2));
        assert_eq!(coord_from_ident("piA_1_x2").unwrap(), CoordName::FrameKN(1, 2));
        assert_eq!(coord_from_ident("p_1_A2").unwrap(), CoordName::MomP(1, 2));
        assert_eq!(coord_from_ident("p").unwrap(), CoordName::MomScalar);
        assert_eq!(coord_from_ident("lambda").unwrap(), CoordName::param("lambda"));
        assert!(coord_from_ident("pi_1").is_err());
    }

    #[test]
    fn literals_are_exact() {
        assert_eq!(parse_expr("0.25", None).unwrap().as_constant(), Some(rat(1, 4)));
        assert_eq!(parse_expr("3/4 - 1", None).unwrap().as_constant(), Some(rat(-1, 4)));
        assert_eq!(parse_expr("-2^2", None).unwrap().as_constant(), Some(rat(-4, 1)));
    }

    #[test]
    fn precedence_and_powers() {
        let e = parse_expr("x1 + 2*y1^2 - (x1 - y1)*x1", None).unwrap();
        let x = Expr::x(1);
        let y = Expr::y(1);
        let expected = &(&x + &(&Expr::from_int(2) * &y.pow(2))) - &(&(&x - &y) * &x);
        assert_eq!(e, expected);
    }

    #[test]
    fn errors_carry_line_and_column() {
        let err = parse_expr("x1 +\n  * y1", None).unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        let err = parse_expr("x1 ^ y1", None).unwrap_err();
        assert!(err.message.contains("exponent"));
        let err = parse_expr("x3", Some((2, 2))).unwrap_err();
        assert!(err.message.contains("outside the chart"));
        let err = parse_expr("1/(x1 - x1)", None).unwrap_err();
        assert!(err.message.contains("zero denominator"));
    }
}
