//! Recursive-descent parser for polynomial text.
//!
//! Grammar:
//! ```text
//! expr     := ('+'|'-')? term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' uint)?
//! base     := rational | identifier | '(' expr ')'
//! rational := int ('/' uint)?
//! ```
//! Identifiers are `[A-Za-z][A-Za-z0-9_]*`. The optional sign before the
//! first term lets canonical renderings such as `-w1 + w2` round-trip.

use std::sync::Arc;

use num::{BigInt, BigRational, One};

use crate::error::{Error, Result};
use crate::polyring::{Polynomial, Rat, VarContext};

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    ctx: &'a Arc<VarContext>,
}

/// Parses `text` into a polynomial over `ctx`.
pub fn parse_polynomial(text: &str, ctx: &Arc<VarContext>) -> Result<Polynomial> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0, ctx };
    p.skip_ws();
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(poly)
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> Error {
        Error::Parse { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        self.skip_ws();
        let mut negate = false;
        if self.eat(b'-') {
            negate = true;
        } else {
            self.eat(b'+');
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t).expect("same context");
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t).expect("same context");
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.eat(b'*') {
                let f = self.factor()?;
                acc = acc.multiply(&f).expect("same context");
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.base()?;
        self.skip_ws();
        if self.eat(b'^') {
            self.skip_ws();
            let e = self.uint()?;
            if e > 1 << 20 {
                return Err(self.error("exponent too large"));
            }
            Ok(base.pow(e as u32))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Polynomial> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.identifier();
                self.ctx
                    .index_of(&name)
                    .ok_or(Error::UnknownVariable(name.clone()))?;
                Polynomial::variable(self.ctx, &name)
            }
            Some(c) if c.is_ascii_digit() || c == b'-' || c == b'+' => {
                let r = self.rational()?;
                Ok(Polynomial::constant(self.ctx, r))
            }
            _ => Err(self.error("expected rational, identifier or `(`")),
        }
    }

    fn identifier(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()
    }

    fn uint(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected unsigned integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("integer out of range"))
    }

    fn rational(&mut self) -> Result<Rat> {
        let mut neg = false;
        if self.eat(b'-') {
            neg = true;
        } else {
            self.eat(b'+');
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let numer: BigInt = std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("bad integer"))?;
        let numer = if neg { -numer } else { numer };
        let denom = if self.eat(b'/') {
            let d = self.uint()?;
            if d == 0 {
                return Err(self.error("zero denominator"));
            }
            BigInt::from(d)
        } else {
            BigInt::one()
        };
        Ok(BigRational::new(numer, denom))
    }
}

/// Parses a standalone rational such as `-4/3` or `7`.
pub fn parse_rational(text: &str) -> Result<Rat> {
    let ctx = VarContext::new(Vec::<String>::new());
    let p = parse_polynomial(text, &ctx)?;
    p.as_constant()
        .ok_or_else(|| Error::Parse { offset: 0, message: "expected a rational".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::rat;

    #[test]
    fn parses_basic_forms() {
        let ctx = VarContext::new(vec!["w0", "w1", "w2"]);
        let p = parse_polynomial("w1*w2 - w0^2", &ctx).unwrap();
        let w0 = Polynomial::variable(&ctx, "w0").unwrap();
        let w1 = Polynomial::variable(&ctx, "w1").unwrap();
        let w2 = Polynomial::variable(&ctx, "w2").unwrap();
        assert_eq!(p, w1.multiply(&w2).unwrap().sub(&w0.pow(2)).unwrap());
    }

    #[test]
    fn parses_rational_coefficients() {
        let ctx = VarContext::new(vec!["x"]);
        let p = parse_polynomial("(1/3)*x^2 + x", &ctx).unwrap();
        let x = Polynomial::variable(&ctx, "x").unwrap();
        assert_eq!(p, x.pow(2).scale(&rat(1, 3)).add(&x).unwrap());
    }

    #[test]
    fn reports_error_offset() {
        let ctx = VarContext::new(vec!["w1", "w2"]);
        let err = parse_polynomial("w1*(w2", &ctx).unwrap_err();
        match err {
            Error::Parse { offset, .. } => assert_eq!(offset, 6),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_is_rejected() {
        let ctx = VarContext::new(vec!["w1"]);
        assert!(matches!(
            parse_polynomial("w1 + z", &ctx),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn render_parse_roundtrip() {
        let ctx = VarContext::new(vec!["w1", "w2"]);
        let w1 = Polynomial::variable(&ctx, "w1").unwrap();
        let w2 = Polynomial::variable(&ctx, "w2").unwrap();
        let p = w1
            .multiply(&w2)
            .unwrap()
            .neg()
            .add(&w1.pow(3).scale(&rat(5, 2)))
            .unwrap();
        let text = p.to_string();
        assert_eq!(parse_polynomial(&text, &ctx).unwrap(), p);
    }
}
