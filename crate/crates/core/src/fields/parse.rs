//! Recursive-descent parser for field expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := ('-' | '+') factor | base ('^' '-'? integer)?
//! base   := number | 'i' | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers: `qJ`, `pJ`, `zJ` (1-based `J`), `i`, `pi`, `t` (time-dependent
//! fields only) and the functions `sin cos exp log conj`.

use crate::error::{ParseError, ParseErrorKind, SourcePos};

use super::expr::{Expr, Func, ScalarField};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(text: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { text, toks: Vec::new() };
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == b'.' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut k = i + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        i = k;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let v: f64 =
                    lit.parse().map_err(|_| lx.err(start, ParseErrorKind::Syntax(format!("bad number `{lit}`"))))?;
                lx.toks.push((Tok::Num(v), start));
            } else if c.is_ascii_alphabetic() || c == b'_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                lx.toks.push((Tok::Ident(text[start..i].to_string()), start));
            } else if b"+-*/^()".contains(&c) {
                lx.toks.push((Tok::Op(c as char), i));
                i += 1;
            } else {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(lx.err(i, ParseErrorKind::Syntax(format!("unexpected character `{ch}`"))));
            }
        }
        lx.toks.push((Tok::End, text.len()));
        Ok(lx.toks)
    }

    fn err(&self, offset: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { kind, pos: SourcePos::locate(self.text, offset) }
    }
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    at: usize,
    n: usize,
    time: bool,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err(&self, offset: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { kind, pos: SourcePos::locate(self.text, offset) }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.err(self.offset(), ParseErrorKind::Syntax(msg.into()))
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(op) {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{op}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                return Ok(Expr::Neg(Box::new(self.factor()?)));
            }
            Tok::Op('+') => {
                self.bump();
                return self.factor();
            }
            _ => {}
        }
        let base = self.base()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let negative = if *self.peek() == Tok::Op('-') {
            self.bump();
            true
        } else {
            false
        };
        let (tok, off) = self.bump();
        let k = match tok {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
            _ => return Err(self.err(off, ParseErrorKind::Syntax("exponent must be an integer".into()))),
        };
        Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }))
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let (tok, off) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::Op('(') {
                    let func = Func::from_name(&name)
                        .ok_or_else(|| self.err(off, ParseErrorKind::UnknownIdentifier(name.clone())))?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                self.ident(&name, off)
            }
            Tok::End => Err(self.err(off, ParseErrorKind::Syntax("unexpected end of input".into()))),
            Tok::Op(c) => Err(self.err(off, ParseErrorKind::Syntax(format!("unexpected `{c}`")))),
        }
    }

    fn ident(&self, name: &str, off: usize) -> Result<Expr, ParseError> {
        match name {
            "i" => return Ok(Expr::I),
            "pi" => return Ok(Expr::Const(std::f64::consts::PI)),
            "t" if self.time => return Ok(Expr::Time),
            _ => {}
        }
        let unknown = || self.err(off, ParseErrorKind::UnknownIdentifier(name.to_string()));
        let (head, digits) = name.split_at(1);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(unknown());
        }
        let make: fn(usize) -> Expr = match head {
            "q" => Expr::Q,
            "p" => Expr::P,
            "z" => Expr::Z,
            _ => return Err(unknown()),
        };
        let out_of_range = || self.err(off, ParseErrorKind::IndexOutOfRange { name: name.to_string(), n: self.n });
        let j: usize = digits.parse().map_err(|_| out_of_range())?;
        if j == 0 || j > self.n {
            return Err(out_of_range());
        }
        Ok(make(j - 1))
    }
}

fn parse_impl(text: &str, n: usize, time: bool) -> Result<ScalarField, ParseError> {
    let toks = Lexer::run(text)?;
    let mut parser = Parser { text, toks, at: 0, n, time };
    let expr = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.syntax("unexpected trailing input"));
    }
    ScalarField::from_expr(expr, n, time)
        .map_err(|e| ParseError { kind: ParseErrorKind::Syntax(e.to_string()), pos: SourcePos::locate(text, 0) })
}

/// Parses a field over n complex coordinates.
pub fn parse_field(text: &str, n: usize) -> Result<ScalarField, ParseError> {
    parse_impl(text, n, false)
}

/// Parses a field of `(t, q, p)`; `t` is available as an identifier.
pub fn parse_time_field(text: &str, n: usize) -> Result<ScalarField, ParseError> {
    parse_impl(text, n, true)
}
