//! Plain-text polynomial literals: `3/2*u^2*w - v`, `(x + y)^2`.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := int ['/' int] | ident ['^' int] | '(' expr ')' ['^' int]
//! ```

use num_bigint::BigInt;
use num_traits::Zero;

use super::poly::{index_of, Poly, Vars};
use super::{CoeffError, Scalar};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, CoeffError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = src[start..i].parse().expect("digits");
                out.push((start, Tok::Int(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            other => {
                return Err(CoeffError::Parse { pos: start, msg: format!("unexpected character {other:?}") })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    vars: &'a Vars,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, CoeffError> {
        Err(CoeffError::Parse { pos: self.offset(), msg: msg.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Poly, CoeffError> {
        let mut acc = Poly::zero(self.vars);
        let mut sign = match self.peek() {
            Some(Tok::Plus) => {
                self.bump();
                false
            }
            Some(Tok::Minus) => {
                self.bump();
                true
            }
            _ => false,
        };
        loop {
            let t = self.term()?;
            acc = if sign { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some(Tok::Plus) => sign = false,
                Some(Tok::Minus) => sign = true,
                _ => return Ok(acc),
            }
            self.bump();
        }
    }

    fn term(&mut self) -> Result<Poly, CoeffError> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<u32, CoeffError> {
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            match self.bump() {
                Some(Tok::Int(n)) => u32::try_from(n).or_else(|_| self.err("exponent too large")),
                _ => {
                    self.pos -= 1;
                    self.err("expected integer exponent")
                }
            }
        } else {
            Ok(1)
        }
    }

    fn factor(&mut self) -> Result<Poly, CoeffError> {
        match self.bump() {
            Some(Tok::Int(n)) => {
                let mut d = BigInt::from(1);
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    match self.bump() {
                        Some(Tok::Int(q)) if !q.is_zero() => d = q,
                        _ => {
                            self.pos -= 1;
                            return self.err("expected nonzero integer denominator");
                        }
                    }
                }
                let c = Poly::constant(self.vars, Scalar::new(n, d));
                let e = self.exponent()?;
                Ok(c.pow(e))
            }
            Some(Tok::Ident(name)) => {
                let idx = index_of(self.vars, &name)?;
                let e = self.exponent()?;
                Ok(Poly::var(self.vars, idx).pow(e))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => {}
                    _ => {
                        self.pos -= 1;
                        return self.err("expected ')'");
                    }
                }
                let e = self.exponent()?;
                Ok(inner.pow(e))
            }
            _ => {
                self.pos -= 1;
                self.err("expected number, variable or '('")
            }
        }
    }
}

impl Poly {
    /// Parses a polynomial literal over the given variable list.
    pub fn parse(src: &str, vars: &Vars) -> Result<Poly, CoeffError> {
        let toks = lex(src)?;
        if toks.is_empty() {
            return Err(CoeffError::Parse { pos: 0, msg: "empty polynomial".into() });
        }
        let mut p = Parser { toks, pos: 0, vars, len: src.len() };
        let out = p.expr()?;
        if p.pos != p.toks.len() {
            return p.err("trailing input");
        }
        Ok(out)
    }
}

/// Parses a rational literal such as `-3/2` or `7`.
pub fn parse_scalar(src: &str) -> Result<Scalar, CoeffError> {
    let empty: Vars = Vec::<String>::new().into();
    let p = Poly::parse(src, &empty)?;
    Ok(p.constant_term())
}
