//! Text grammar for exact expressions in `z` and `eps`.
//!
//! A small recursive-descent parser over the usual operators `+ - * / ^` with
//! parentheses. Atoms are non-negative integers and the variables `z` and
//! `eps`. `/` and `*` are left-associative with equal precedence, so `1/2*z`
//! means `(1/2)*z`, matching how values are printed. Adjacency with a variable
//! or an opening parenthesis is implicit multiplication (`2eps`, `3(z+1)`).
//! `^` takes a non-negative integer exponent.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfun::RatFun;
use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::One;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Z,
    Eps,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = BigInt::parse_bytes(&bytes[start..i], 10)
                    .ok_or_else(|| Error::Parse(format!("bad integer in {s:?}")))?;
                out.push(Tok::Int(n));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                match &s[start..i] {
                    "z" => out.push(Tok::Z),
                    "eps" => out.push(Tok::Eps),
                    other => {
                        return Err(Error::Parse(format!(
                            "unknown symbol {other:?}; expected z or eps"
                        )))
                    }
                }
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character {other:?} in expression"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RatFun> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFun> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.next();
                    let d = self.factor()?;
                    acc = acc.div(&d)?;
                }
                // Implicit multiplication: `2eps`, `3(z+1)`, `z eps`.
                Some(Tok::Z) | Some(Tok::Eps) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RatFun> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.next();
                Ok(self.factor()?.neg())
            }
            Some(Tok::Plus) => {
                self.next();
                self.factor()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFun> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.next();
            match self.next() {
                Some(Tok::Int(n)) => {
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| Error::Parse("exponent out of range".into()))?;
                    base.pow(e as i32)
                }
                _ => Err(Error::Parse("expected integer exponent after ^".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<RatFun> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(RatFun::from_rational(Rational::from_big(
                n,
                BigInt::one(),
            ))),
            Some(Tok::Z) => Ok(RatFun::var_z()),
            Some(Tok::Eps) => Ok(RatFun::var_eps()),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Parse("missing closing parenthesis".into())),
                }
            }
            other => Err(Error::Parse(format!(
                "unexpected token {other:?} in expression"
            ))),
        }
    }
}

pub fn parse_ratfun(s: &str) -> Result<RatFun> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let r = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!(
            "trailing input after expression in {s:?}"
        )));
    }
    Ok(r)
}

pub fn parse_poly(s: &str) -> Result<Poly> {
    let r = parse_ratfun(s)?;
    if !r.is_polynomial() {
        return Err(Error::Parse(format!("{s:?} is not a polynomial")));
    }
    let scale = r.den().constant_term().recip()?;
    Ok(r.num().scale(&scale))
}

impl FromStr for RatFun {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_ratfun(s)
    }
}

impl FromStr for Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s)
    }
}
