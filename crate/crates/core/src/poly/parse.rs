//! Text grammar for polynomials.
//!
//! Accepts the rendering produced by `Polynomial::display_with` plus a few
//! conveniences: implicit multiplication (`2x1`), parentheses, decimal and
//! `p/q` literals, and division by constants.

use num_traits::{One, Zero};
use thiserror::Error;

use super::{MultiIndex, Polynomial};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, message: String| ParseError { line: 1, column: col + 1, message };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                i += 1;
                continue;
            }
            '+' => out.push((Tok::Plus, start)),
            '-' => out.push((Tok::Minus, start)),
            '*' => {
                // `**` is accepted as a power operator.
                if chars.get(i + 1) == Some(&'*') {
                    i += 1;
                    out.push((Tok::Caret, start));
                } else {
                    out.push((Tok::Star, start));
                }
            }
            '/' => out.push((Tok::Slash, start)),
            '^' => out.push((Tok::Caret, start)),
            '(' => out.push((Tok::LParen, start)),
            ')' => out.push((Tok::RParen, start)),
            c if c.is_ascii_digit() || c == '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit: String = chars[start..i].iter().collect();
                let value = parse_rational(&lit).ok_or_else(|| err(start, format!("bad number `{lit}`")))?;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            other => return Err(err(start, format!("unexpected character `{other}`"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [String],
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { line: 1, column: self.col() + 1, message: message.into() })
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let divisor = self.unary()?;
                    let c = divisor.constant_term();
                    if divisor.num_terms() != 1 || c.is_zero() {
                        return self.fail("division is only allowed by a nonzero constant");
                    }
                    acc = acc.scale(&(Rational::one() / c));
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let col = self.col();
            match self.peek().cloned() {
                Some(Tok::Num(n)) if n.is_integer() && n >= Rational::zero() => {
                    self.pos += 1;
                    let e: u32 = n.to_integer().try_into().map_err(|_| ParseError {
                        line: 1,
                        column: col + 1,
                        message: "exponent too large".into(),
                    })?;
                    Ok(base.pow(e))
                }
                _ => self.fail("expected a non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let n = self.vars.len();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Polynomial::constant(n, v))
            }
            Some(Tok::Ident(name)) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(Polynomial::monomial(MultiIndex::unit(n, i), Rational::one()))
                }
                None => self.fail(format!("unknown variable `{name}`")),
            },
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.fail("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => self.fail("unexpected token"),
            None => self.fail("unexpected end of input"),
        }
    }
}

/// Parses `text` as a polynomial in the named variables (variable `i` of the
/// result is `vars[i]`).
pub fn parse_polynomial(text: &str, vars: &[String]) -> Result<Polynomial, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError { line: 1, column: 1, message: "empty polynomial".into() });
    }
    let mut parser = Parser { toks, pos: 0, vars, end: text.chars().count() };
    let p = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return parser.fail("trailing input");
    }
    Ok(p)
}
