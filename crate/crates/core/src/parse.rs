//! Recursive-descent parser for rational expressions.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | ident | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```
//!
//! `sqrt` only accepts constant arguments and yields an exact element of a
//! quadratic field.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::{ArithError, RatFn, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let value = parse_number(&text).ok_or_else(|| ParseError {
                line: l0,
                column: c0,
                message: format!("malformed number '{text}'"),
            })?;
            out.push(Token {
                tok: Tok::Num(value),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                column: c0,
            });
            continue;
        }
        if "+-*/^()".contains(c) {
            out.push(Token {
                tok: Tok::Op(c),
                line: l0,
                column: c0,
            });
            col += 1;
            i += 1;
            continue;
        }
        return Err(ParseError {
            line: l0,
            column: c0,
            message: format!("unexpected character '{c}'"),
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

fn parse_number(text: &str) -> Option<BigRational> {
    match text.split_once('.') {
        None => text.parse::<BigInt>().ok().map(BigRational::from_integer),
        Some((int, frac)) => {
            if (int.is_empty() && frac.is_empty()) || frac.contains('.') {
                return None;
            }
            let digits = format!("{int}{frac}");
            let n: BigInt = digits.parse().ok()?;
            let d = num_traits::pow(BigInt::from(10), frac.len());
            Some(BigRational::new(n, d))
        }
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    allowed: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, tok: &Token, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: tok.line,
            column: tok.column,
            message: message.into(),
        })
    }

    fn expect_op(&mut self, op: char) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == Tok::Op(op) {
            Ok(())
        } else {
            self.err(&t, format!("expected '{op}'"))
        }
    }

    fn combine(
        &self,
        at: &Token,
        lhs: RatFn,
        rhs: RatFn,
        op: char,
    ) -> Result<RatFn, ParseError> {
        let (d1, d2) = (lhs.radicand(), rhs.radicand());
        if d1 != 1 && d2 != 1 && d1 != d2 {
            return self.err(at, ArithError::MixedExtensions(d1, d2).to_string());
        }
        match op {
            '+' => Ok(lhs.add(&rhs)),
            '-' => Ok(lhs.sub(&rhs)),
            '*' => Ok(lhs.mul(&rhs)),
            '/' => match lhs.try_div(&rhs) {
                Ok(r) => Ok(r),
                Err(_) => self.err(at, "division by zero"),
            },
            _ => unreachable!(),
        }
    }

    fn expr(&mut self) -> Result<RatFn, ParseError> {
        let mut acc = self.term()?;
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Op(op @ ('+' | '-')) => {
                    self.next();
                    let rhs = self.term()?;
                    acc = self.combine(&t, acc, rhs, op)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFn, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Op(op @ ('*' | '/')) => {
                    self.next();
                    let rhs = self.unary()?;
                    acc = self.combine(&t, acc, rhs, op)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFn, ParseError> {
        match self.peek().tok {
            Tok::Op('-') => {
                self.next();
                Ok(self.unary()?.neg())
            }
            Tok::Op('+') => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFn, ParseError> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Op('^') {
            return Ok(base);
        }
        self.next();
        let t = self.next();
        let e = match &t.tok {
            Tok::Num(n) if n.is_integer() => u32::try_from(n.to_integer()).ok(),
            _ => None,
        };
        match e {
            Some(e) => Ok(base.pow(e as i32)),
            None => self.err(&t, "exponent must be a nonnegative integer literal"),
        }
    }

    fn atom(&mut self) -> Result<RatFn, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Num(n) => Ok(RatFn::constant(Scalar::from_rational(n.clone()))),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Ident(name) if name == "sqrt" => {
                self.expect_op('(')?;
                let arg = self.expr()?;
                self.expect_op(')')?;
                let Some(c) = arg.constant_value() else {
                    return self.err(&t, "sqrt needs a constant argument");
                };
                match c.sqrt() {
                    Ok(Some(s)) => Ok(RatFn::constant(s)),
                    Ok(None) => self.err(&t, format!("sqrt({c}) is not in a quadratic field")),
                    Err(e) => self.err(&t, e.to_string()),
                }
            }
            Tok::Ident(name) => {
                if self.allowed.contains(&name.as_str()) || ["x", "y", "t", "h"].contains(&name.as_str()) {
                    Ok(RatFn::named(name))
                } else {
                    self.err(&t, format!("unknown identifier '{name}'"))
                }
            }
            Tok::End => self.err(&t, "unexpected end of input"),
            Tok::Op(c) => self.err(&t, format!("unexpected '{c}'")),
        }
    }
}

/// Parses `src` into a reduced rational function. Besides `x, y, t, h`
/// only the identifiers in `params` are accepted.
pub fn parse_expression(src: &str, params: &[&str]) -> Result<RatFn, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        allowed: params,
    };
    let e = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.err(&t, "unexpected trailing input");
    }
    Ok(e)
}

/// Parses a constant, e.g. `"3/2"` or `"1/2 + 3/2*sqrt(-3)"`.
pub fn parse_scalar(src: &str) -> Result<Scalar, ParseError> {
    let r = parse_expression(src, &[])?;
    match r.constant_value() {
        Some(c) if r.vars().is_empty() => Ok(c),
        _ => Err(ParseError {
            line: 1,
            column: 1,
            message: "expected a constant".into(),
        }),
    }
}
