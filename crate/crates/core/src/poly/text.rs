//! Text forms of integer polynomials.
//!
//! Two spellings are accepted everywhere a polynomial is read:
//! a comma-separated coefficient list with the constant term first
//! (`1,-3,1`), and an expression in one variable (`x^2 - 3x + 1`).
//! `Display` prints the expression form, [`IntPoly::to_coeff_list`] the list.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::IntPoly;
use crate::error::{Error, Result};

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs().iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let mag = c.abs();
            if k == 0 || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

impl IntPoly {
    /// Constant term first, comma separated: `1,-3,1`.
    pub fn to_coeff_list(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses either text form.
    pub fn parse(text: &str) -> Result<IntPoly> {
        if text.trim().is_empty() {
            return Err(Error::parse(0, "empty polynomial"));
        }
        if text.chars().any(|c| c.is_ascii_alphabetic()) {
            ExprParser::new(text).parse()
        } else {
            parse_coeff_list(text)
        }
    }
}

impl FromStr for IntPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IntPoly::parse(s)
    }
}

fn parse_coeff_list(text: &str) -> Result<IntPoly> {
    let mut coeffs = Vec::new();
    let mut offset = 0;
    for field in text.split(',') {
        let trimmed = field.trim();
        let lead = field.len() - field.trim_start().len();
        if trimmed.is_empty() {
            return Err(Error::parse(offset + lead, "empty coefficient"));
        }
        let value = trimmed
            .strip_prefix('+')
            .unwrap_or(trimmed)
            .parse::<BigInt>()
            .map_err(|_| Error::parse(offset + lead, format!("not an integer: {trimmed:?}")))?;
        coeffs.push(value);
        offset += field.len() + 1;
    }
    Ok(IntPoly::new(coeffs))
}

struct ExprParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    var: Option<u8>,
}

impl<'a> ExprParser<'a> {
    fn new(text: &'a str) -> Self {
        ExprParser {
            bytes: text.as_bytes(),
            pos: 0,
            var: None,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn number(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
    }

    fn parse(mut self) -> Result<IntPoly> {
        let mut coeffs: Vec<BigInt> = Vec::new();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if first => return Err(Error::parse(self.pos, "empty polynomial")),
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    BigInt::one()
                }
                Some(b'-') => {
                    self.pos += 1;
                    -BigInt::one()
                }
                Some(_) if first => BigInt::one(),
                Some(c) => {
                    return Err(Error::parse(
                        self.pos,
                        format!("expected '+' or '-', found {:?}", c as char),
                    ))
                }
            };
            first = false;
            let (coef, exp) = self.term()?;
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, BigInt::zero());
            }
            coeffs[exp] += sign * coef;
        }
        Ok(IntPoly::new(coeffs))
    }

    fn term(&mut self) -> Result<(BigInt, usize)> {
        let term_start = {
            self.skip_ws();
            self.pos
        };
        let coef = self.number();
        let mut has_star = false;
        if coef.is_some()
            && self.peek() == Some(b'*')
            && self.bytes.get(self.pos + 1) != Some(&b'*')
        {
            self.pos += 1;
            has_star = true;
        }
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {
                let at = self.pos;
                match self.var {
                    None => self.var = Some(c),
                    Some(v) if v != c => {
                        return Err(Error::parse(
                            at,
                            format!("mixed variables {:?} and {:?}", v as char, c as char),
                        ))
                    }
                    _ => {}
                }
                self.pos += 1;
                if self
                    .bytes
                    .get(self.pos)
                    .is_some_and(u8::is_ascii_alphanumeric)
                {
                    return Err(Error::parse(self.pos, "variable names are a single letter"));
                }
                let exp = match self.peek() {
                    Some(b'^') => {
                        self.pos += 1;
                        self.exponent()?
                    }
                    Some(b'*') if self.bytes.get(self.pos + 1) == Some(&b'*') => {
                        self.pos += 2;
                        self.exponent()?
                    }
                    _ => 1,
                };
                Ok((coef.unwrap_or_else(BigInt::one), exp))
            }
            _ if has_star => Err(Error::parse(self.pos, "expected a variable after '*'")),
            _ => match coef {
                Some(c) => Ok((c, 0)),
                None => Err(Error::parse(
                    term_start,
                    "expected a coefficient or variable",
                )),
            },
        }
    }

    fn exponent(&mut self) -> Result<usize> {
        let at = {
            self.skip_ws();
            self.pos
        };
        let n = self
            .number()
            .ok_or_else(|| Error::parse(at, "expected an exponent"))?;
        usize::try_from(n)
            .ok()
            .filter(|&e| e <= 4096)
            .ok_or_else(|| Error::parse(at, "exponent out of range"))
    }
}
