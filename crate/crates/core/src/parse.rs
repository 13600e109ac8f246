//! Text grammar for polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' uint)?
//! atom   := literal | var | '(' expr ')'
//! literal:= uint ('/' uint)?
//! var    := 'x' uint            (1-based, at most the dimension)
//! ```
//!
//! Whitespace is insignificant. Implicit multiplication is rejected.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::MPoly;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((start, t));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((start, Tok::Num(n)));
        } else if c == b'x' {
            i += 1;
            let ds = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if ds == i {
                return Err(Error::Syntax {
                    pos: start,
                    msg: "expected a variable index after 'x'".into(),
                });
            }
            let idx: usize = text[ds..i].parse().map_err(|_| Error::Syntax {
                pos: ds,
                msg: "variable index too large".into(),
            })?;
            out.push((start, Tok::Var(idx)));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(Error::Syntax {
                pos: start,
                msg: format!("unexpected character {ch:?}"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<MPoly> {
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

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MPoly> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<MPoly> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Num(n)) => {
                    let e: u32 = match u32::try_from(n.clone()) {
                        Ok(e) => e,
                        Err(_) => return self.err("exponent too large"),
                    };
                    self.pos += 1;
                    return Ok(base.pow(e));
                }
                _ => return self.err("'^' must be followed by a non-negative integer literal"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MPoly> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let mut q = Rational::from_integer(n);
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Num(d)) if !d.is_zero() => {
                            self.pos += 1;
                            q /= Rational::from_integer(d);
                        }
                        Some(Tok::Num(_)) => return self.err("zero denominator"),
                        _ => return self.err("expected an integer denominator"),
                    }
                }
                Ok(MPoly::constant(self.dim, q))
            }
            Some(Tok::Var(i)) => {
                if i == 0 || i > self.dim {
                    return Err(Error::VariableOutOfRange {
                        index: i,
                        dim: self.dim,
                        pos: at,
                    });
                }
                self.pos += 1;
                Ok(MPoly::var(self.dim, i - 1))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => self.err("expected a number, a variable or '('"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text` as a polynomial in `x1..x<dim>` and returns its canonical form.
pub fn parse_poly(text: &str, dim: usize) -> Result<MPoly> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        dim,
    };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected token (implicit multiplication is not allowed)");
    }
    Ok(out)
}
