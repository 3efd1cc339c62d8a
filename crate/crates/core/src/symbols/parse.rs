//! Recursive-descent parser for polynomial symbols.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ['^' uint]
//! base   := 'x' | 'xi' | number | '(' expr ')'
//! number := decimal ['i'] | 'i'
//! ```
//!
//! Whitespace between tokens is ignored. Every subexpression is expanded
//! immediately, so the result is the canonical coefficient map.

use num_complex::Complex64;

use super::poly::{PolySymbol, DEFAULT_MAX_DEGREE};
use crate::error::{Error, Result};

pub fn parse_symbol(text: &str) -> Result<PolySymbol> {
    parse_symbol_with_cap(text, DEFAULT_MAX_DEGREE)
}

pub fn parse_symbol_with_cap(text: &str, max_degree: u32) -> Result<PolySymbol> {
    let mut parser = Parser { src: text.as_bytes(), pos: 0, cap: max_degree };
    parser.skip_ws();
    if parser.at_end() {
        return Err(parser.syntax("empty expression"));
    }
    let p = parser.expr()?;
    parser.skip_ws();
    if !parser.at_end() {
        return Err(parser.syntax("unexpected trailing input"));
    }
    Ok(p.with_source(text))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    cap: u32,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn syntax(&self, message: &str) -> Error {
        Error::Syntax { offset: self.pos, message: message.to_string() }
    }

    /// Consumes `b` (after whitespace) if present.
    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<PolySymbol> {
        let negate = self.eat(b'-');
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<PolySymbol> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let rhs = self.factor()?;
            acc = acc.mul(&rhs, self.cap)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<PolySymbol> {
        let base = self.base()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        // reject 2.5, 1e3, -1 and friends as exponents
        let malformed = matches!(self.peek(), Some(b'.' | b'e' | b'E' | b'i'));
        if start == self.pos || malformed {
            return Err(Error::Exponent { offset: start });
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let exp: u32 = digits.parse().map_err(|_| Error::Exponent { offset: start })?;
        base.pow(exp, self.cap)
    }

    fn base(&mut self) -> Result<PolySymbol> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                if self.peek() == Some(b'i') {
                    self.pos += 1;
                    self.reject_identifier_tail()?;
                    Ok(PolySymbol::monomial(0, 1, Complex64::new(1.0, 0.0)))
                } else {
                    self.reject_identifier_tail()?;
                    Ok(PolySymbol::monomial(1, 0, Complex64::new(1.0, 0.0)))
                }
            }
            Some(b'i') => {
                self.pos += 1;
                self.reject_identifier_tail()?;
                Ok(PolySymbol::constant(Complex64::new(0.0, 1.0)))
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(_) => Err(self.syntax("expected 'x', 'xi', a number or '('")),
        }
    }

    fn reject_identifier_tail(&self) -> Result<()> {
        match self.peek() {
            Some(b) if b.is_ascii_alphanumeric() || b == b'_' => Err(self.syntax("unknown identifier")),
            _ => Ok(()),
        }
    }

    fn number(&mut self) -> Result<PolySymbol> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while matches!(p.peek(), Some(b) if b.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(Error::Syntax { offset: start, message: "malformed number".into() });
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
                return Err(self.syntax("malformed exponent in number"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        let value: f64 = text
            .parse()
            .map_err(|_| Error::Syntax { offset: start, message: format!("bad number '{text}'") })?;
        let coeff = if self.peek() == Some(b'i') {
            self.pos += 1;
            Complex64::new(0.0, value)
        } else {
            Complex64::new(value, 0.0)
        };
        self.reject_identifier_tail()?;
        Ok(PolySymbol::constant(coeff))
    }
}
