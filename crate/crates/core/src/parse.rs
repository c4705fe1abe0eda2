//! Parser for the scalar literal grammar:
//!
//! ```text
//! scalar   := sign? term (("+"|"-") term)*
//! term     := rational ("*" radical)? | radical
//! radical  := "sqrt" "(" posint ")"
//! rational := int ("/" posint)?
//! ```
//!
//! Whitespace is insignificant. Radicands are normalized to squarefree form
//! on the way in.

use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::Zero;

use crate::scalar::{reduce_radicand, Rational, Scalar};

/// Largest accepted radicand; squarefree reduction uses trial division, so
/// arbitrarily large radicands are not supported.
pub const MAX_RADICAND: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input at which the error was detected.
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Input ended where a term, digit or delimiter was required.
    UnexpectedEnd,
    /// The byte at `position` cannot start or continue the expected token.
    Unexpected(char),
    ZeroDenominator,
    ZeroRadicand,
    RadicandTooLarge,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedEnd => {
                write!(f, "unexpected end of input at position {}", self.position)
            }
            ParseErrorKind::Unexpected(c) => {
                write!(f, "unexpected character {c:?} at position {}", self.position)
            }
            ParseErrorKind::ZeroDenominator => {
                write!(f, "zero denominator at position {}", self.position)
            }
            ParseErrorKind::ZeroRadicand => {
                write!(f, "radicand must be positive (position {})", self.position)
            }
            ParseErrorKind::RadicandTooLarge => write!(
                f,
                "radicand exceeds {} (position {})",
                MAX_RADICAND, self.position
            ),
        }
    }
}

impl core::error::Error for ParseError {}

pub fn parse_scalar(input: &str) -> Result<Scalar, ParseError> {
    let mut p = Parser {
        bytes: input.as_bytes(),
        pos: 0,
    };
    let mut out = Scalar::zero();
    p.skip_ws();
    let mut negative = p.eat_sign();
    loop {
        let (radicand, coeff) = p.term()?;
        out.add_term(radicand, if negative { -coeff } else { coeff });
        p.skip_ws();
        match p.peek() {
            None => return Ok(out),
            Some(b'+') => {
                p.pos += 1;
                negative = false;
            }
            Some(b'-') => {
                p.pos += 1;
                negative = true;
            }
            Some(c) => return Err(p.fail(ParseErrorKind::Unexpected(c as char))),
        }
        p.skip_ws();
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn fail(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            position: self.pos,
            kind,
        }
    }

    fn eat_sign(&mut self) -> bool {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        }
    }

    /// One term, returned as `(radicand, coefficient)` with the radicand
    /// already squarefree.
    fn term(&mut self) -> Result<(u64, Rational), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let coeff = self.rational()?;
                self.skip_ws();
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    self.skip_ws();
                    let (outer, squarefree) = self.radical()?;
                    Ok((squarefree, coeff * Ratio::from_integer(BigInt::from(outer))))
                } else {
                    Ok((1, coeff))
                }
            }
            Some(b's') => {
                let (outer, squarefree) = self.radical()?;
                Ok((squarefree, Ratio::from_integer(BigInt::from(outer))))
            }
            Some(c) => Err(self.fail(ParseErrorKind::Unexpected(c as char))),
            None => Err(self.fail(ParseErrorKind::UnexpectedEnd)),
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let numer = self.digits()?;
        self.skip_ws();
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let denom_pos = self.pos;
            let denom = self.digits()?;
            if denom.is_zero() {
                return Err(ParseError {
                    position: denom_pos,
                    kind: ParseErrorKind::ZeroDenominator,
                });
            }
            Ok(Ratio::new(BigInt::from(numer), BigInt::from(denom)))
        } else {
            Ok(Ratio::from_integer(BigInt::from(numer)))
        }
    }

    fn digits(&mut self) -> Result<BigUint, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(match self.peek() {
                Some(c) => self.fail(ParseErrorKind::Unexpected(c as char)),
                None => self.fail(ParseErrorKind::UnexpectedEnd),
            });
        }
        let mut n = BigUint::zero();
        for &b in &self.bytes[start..self.pos] {
            n = n * 10u32 + (b - b'0');
        }
        Ok(n)
    }

    /// `sqrt(posint)`; returns `(outer, squarefree)` of the reduction.
    fn radical(&mut self) -> Result<(u64, u64), ParseError> {
        self.expect_keyword(b"sqrt")?;
        self.skip_ws();
        self.expect_byte(b'(')?;
        self.skip_ws();
        let num_pos = self.pos;
        let n = self.digits()?;
        self.skip_ws();
        self.expect_byte(b')')?;
        if n.is_zero() {
            return Err(ParseError {
                position: num_pos,
                kind: ParseErrorKind::ZeroRadicand,
            });
        }
        use num_traits::ToPrimitive;
        let n: u64 = match n.to_u64() {
            Some(v) if v <= MAX_RADICAND => v,
            _ => {
                return Err(ParseError {
                    position: num_pos,
                    kind: ParseErrorKind::RadicandTooLarge,
                })
            }
        };
        Ok(reduce_radicand(n))
    }

    fn expect_keyword(&mut self, kw: &[u8]) -> Result<(), ParseError> {
        if self.bytes[self.pos..].starts_with(kw) {
            self.pos += kw.len();
            Ok(())
        } else {
            Err(match self.peek() {
                Some(c) => self.fail(ParseErrorKind::Unexpected(c as char)),
                None => self.fail(ParseErrorKind::UnexpectedEnd),
            })
        }
    }

    fn expect_byte(&mut self, b: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == b => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.fail(ParseErrorKind::Unexpected(c as char))),
            None => Err(self.fail(ParseErrorKind::UnexpectedEnd)),
        }
    }
}
