//! Round-trippable text format for expressions.
//!
//! Infix grammar with precedence `^` > unary minus > `*` > `+`/`-`, plus
//! call syntax for the named functions.  The single variable is `x0`.
//! `format_expr` emits exactly enough parentheses that `parse ∘ format`
//! reproduces the tree node-for-node; constants print with Rust's shortest
//! round-trip rendering (scientific notation for extreme magnitudes), so a
//! reparse recovers every constant bit-exactly.
//!
//! There is no negation node: a parsed unary minus folds into the constant
//! when applied to a literal and desugars to `0 - t` otherwise.

use std::fmt::Write as _;

use thiserror::Error;

use crate::expr::{BinaryOp, Expr, UnaryOp};

/// Parse failure with byte position and an expectation message.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number `{v}`"),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Comma => "`,`".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Token)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos >= self.bytes.len() {
                return Ok(out);
            }
            let start = self.pos;
            let b = self.bytes[self.pos];
            let token = match b {
                b'+' => {
                    self.pos += 1;
                    Token::Plus
                }
                b'-' => {
                    self.pos += 1;
                    Token::Minus
                }
                b'*' => {
                    self.pos += 1;
                    Token::Star
                }
                b'^' => {
                    self.pos += 1;
                    Token::Caret
                }
                b'(' => {
                    self.pos += 1;
                    Token::LParen
                }
                b')' => {
                    self.pos += 1;
                    Token::RParen
                }
                b',' => {
                    self.pos += 1;
                    Token::Comma
                }
                b'0'..=b'9' | b'.' => self.number(start)?,
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    while self.pos < self.bytes.len()
                        && (self.bytes[self.pos].is_ascii_alphanumeric()
                            || self.bytes[self.pos] == b'_')
                    {
                        self.pos += 1;
                    }
                    Token::Ident(self.src[start..self.pos].to_string())
                }
                other => {
                    return Err(ParseError {
                        position: start,
                        expected: "a token".into(),
                        found: format!("`{}`", other as char),
                    })
                }
            };
            out.push((start, token));
        }
    }

    fn number(&mut self, start: usize) -> Result<Token, ParseError> {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.bytes.len() && matches!(self.bytes[self.pos], b'e' | b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.bytes.len() && matches!(self.bytes[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // `3e` with no digits: the e belongs to something else.
                self.pos = mark;
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .map(Token::Number)
            .map_err(|_| ParseError {
                position: start,
                expected: "a numeric literal".into(),
                found: format!("`{text}`"),
            })
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    index: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.index).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<(usize, Token)> {
        let item = self.tokens.get(self.index).cloned();
        if item.is_some() {
            self.index += 1;
        }
        item
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.index)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn err(&self, expected: &str) -> ParseError {
        ParseError {
            position: self.here(),
            expected: expected.into(),
            found: self
                .peek()
                .map(Token::describe)
                .unwrap_or_else(|| "end of input".into()),
        }
    }

    fn expect(&mut self, want: &Token, expected: &str) -> Result<(), ParseError> {
        if self.peek() == Some(want) {
            self.index += 1;
            Ok(())
        } else {
            Err(self.err(expected))
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinaryOp::Add,
                Some(Token::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.index += 1;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    // term := unary ('*' unary)*
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Token::Star) {
            self.index += 1;
            let rhs = self.unary()?;
            lhs = Expr::binary(BinaryOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.index += 1;
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Const(v) => Expr::constant(-v),
                other => Expr::binary(BinaryOp::Sub, Expr::constant(0.0), other),
            });
        }
        self.power()
    }

    // power := atom ('^' unary)?   (right-associative)
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.index += 1;
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.next() {
            Some((_, Token::Number(v))) => Ok(Expr::constant(v)),
            Some((pos, Token::Ident(name))) => self.ident(pos, name),
            Some((_, Token::LParen)) => {
                let inner = self.expr()?;
                self.expect(&Token::RParen, "`)`")?;
                Ok(inner)
            }
            Some((pos, other)) => Err(ParseError {
                position: pos,
                expected: "a number, `x0`, a function call, or `(`".into(),
                found: other.describe(),
            }),
            None => Err(self.err("a number, `x0`, a function call, or `(`")),
        }
    }

    fn ident(&mut self, pos: usize, name: String) -> Result<Expr, ParseError> {
        if name == "x0" {
            return Ok(Expr::var());
        }
        let unary = UnaryOp::ALL.iter().find(|op| op.name() == name).copied();
        let binary = [BinaryOp::LogC, BinaryOp::LogB, BinaryOp::LogAddExp]
            .iter()
            .find(|op| op.name() == name)
            .copied();
        if unary.is_none() && binary.is_none() {
            return Err(ParseError {
                position: pos,
                expected: "`x0` or a known function name".into(),
                found: format!("identifier `{name}`"),
            });
        }
        self.expect(&Token::LParen, "`(` after function name")?;
        let first = self.expr()?;
        if let Some(op) = unary {
            self.expect(&Token::RParen, "`)` (this function takes one argument)")?;
            return Ok(Expr::unary(op, first));
        }
        let op = binary.expect("checked above");
        self.expect(&Token::Comma, "`,` (this function takes two arguments)")?;
        let second = self.expr()?;
        self.expect(&Token::RParen, "`)`")?;
        Ok(Expr::binary(op, first, second))
    }
}

/// Parse expression text.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = Lexer::new(text).tokens()?;
    let mut parser = Parser {
        tokens,
        index: 0,
        end: text.len(),
    };
    let expr = parser.expr()?;
    if parser.index != parser.tokens.len() {
        return Err(parser.err("end of input"));
    }
    Ok(expr)
}

/// Effective precedence of a rendered node: atoms/calls 5, `^` 4,
/// negative literals 3 (they read as unary minus), `*` 2, `+`/`-` 1.
fn effective_precedence(e: &Expr) -> u8 {
    match e {
        Expr::Var => 5,
        Expr::Const(v) => {
            if *v < 0.0 {
                3
            } else {
                5
            }
        }
        Expr::Unary(_, _) => 5,
        Expr::Binary(op, _, _) => match op {
            BinaryOp::Pow => 4,
            BinaryOp::Mul => 2,
            BinaryOp::Add | BinaryOp::Sub => 1,
            _ => 5, // call syntax is self-delimiting
        },
    }
}

fn format_const(v: f64, out: &mut String) {
    let magnitude = v.abs();
    if magnitude != 0.0 && !(1e-5..1e16).contains(&magnitude) {
        write!(out, "{v:e}").expect("write to string");
    } else {
        write!(out, "{v}").expect("write to string");
    }
}

fn format_into(e: &Expr, min_prec: u8, out: &mut String) {
    let own = effective_precedence(e);
    let needs_parens = own < min_prec;
    if needs_parens {
        out.push('(');
    }
    match e {
        Expr::Var => out.push_str("x0"),
        Expr::Const(v) => format_const(*v, out),
        Expr::Unary(op, c) => {
            out.push_str(op.name());
            out.push('(');
            format_into(c, 0, out);
            out.push(')');
        }
        Expr::Binary(op, l, r) => {
            if op.is_infix() {
                // Left-associative at 1 (+,-) and 2 (*); right-assoc ^ at 4.
                let (own_prec, left_min, right_min) = match op {
                    BinaryOp::Add | BinaryOp::Sub => (1, 1, 2),
                    BinaryOp::Mul => (2, 2, 3),
                    BinaryOp::Pow => (4, 5, 3),
                    _ => unreachable!(),
                };
                debug_assert_eq!(own_prec, effective_precedence(e));
                format_into(l, left_min, out);
                write!(out, " {} ", op.name()).expect("write to string");
                format_into(r, right_min, out);
            } else {
                out.push_str(op.name());
                out.push('(');
                format_into(l, 0, out);
                out.push_str(", ");
                format_into(r, 0, out);
                out.push(')');
            }
        }
    }
    if needs_parens {
        out.push(')');
    }
}

/// Render an expression; `parse(format_expr(e)) == e` structurally.
pub fn format_expr(e: &Expr) -> String {
    let mut out = String::new();
    format_into(e, 0, &mut out);
    out
}
