//! Parser for group words such as `x1^2 x2^-1 [x2,x1,x1]^3 (x1 x2)^-2`.
//!
//! ```text
//! word   := factor*            (whitespace or '*' between factors)
//! factor := atom ('^' int)?
//! atom   := 'x' N | '1' | '(' word ')' | '[' word (',' word)+ ']'
//! ```
//! Brackets are left-normed commutators.

use std::sync::Arc;

use num_bigint::BigInt;

use super::{left_normed, NilElement, NilGroupCtx};
use crate::error::{Error, Result};

pub fn parse_word(ctx: &Arc<NilGroupCtx>, src: &str) -> Result<NilElement> {
    let mut p = Parser {
        ctx,
        src: src.as_bytes(),
        pos: 0,
    };
    let w = p.word()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(w)
}

struct Parser<'a> {
    ctx: &'a Arc<NilGroupCtx>,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            line: 1,
            msg: format!("{msg} at column {}", self.pos + 1),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_whitespace() || self.src[self.pos] == b'*') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn word(&mut self) -> Result<NilElement> {
        let mut acc = self.ctx.identity();
        while let Some(c) = self.peek() {
            if !(c == b'x' || c == b'(' || c == b'[' || c == b'1') {
                break;
            }
            let f = self.factor()?;
            acc = acc.multiply(&f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<NilElement> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.integer()?;
            return base.pow(&n);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<NilElement> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let i: u32 = digits.parse().map_err(|_| self.error("expected letter index"))?;
                self.ctx.letter(i)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(self.ctx.identity())
            }
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(b')')?;
                Ok(w)
            }
            Some(b'[') => {
                self.pos += 1;
                let mut parts = vec![self.word()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    parts.push(self.word()?);
                }
                self.expect(b']')?;
                if parts.len() < 2 {
                    return Err(self.error("commutator needs at least two entries"));
                }
                left_normed(&parts)
            }
            _ => Err(self.error("expected a letter, '1', '(' or '['")),
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && (self.src[self.pos] == b'-' || self.src[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("expected an integer exponent"))
    }
}
