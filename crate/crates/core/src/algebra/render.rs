//! Text and JSON forms of [`LaurentPoly`].
//!
//! Text grammar (terms in descending lexicographic order of exponents):
//!
//! ```text
//! poly   := "0" | ["-"] term ((" + " | " - ") term)*
//! term   := magnitude | [magnitude "*"] factor ("*" factor)*
//! factor := "t" index ["^" ["-"] digits]
//! ```
//!
//! A magnitude of 1 is omitted unless the term is constant, zero exponents
//! are omitted, and exponent 1 is written without `^`. The output of
//! `Display` is canonical, so two polynomials are equal iff their renderings
//! are byte-identical.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::poly::{ExponentVec, LaurentPoly};
use crate::error::{Error, Result};

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            if e.is_zero() {
                write!(f, "{mag}")?;
                continue;
            }
            let mut first = true;
            if !mag.is_one() {
                write!(f, "{mag}")?;
                first = false;
            }
            for (h, &x) in e.as_slice().iter().enumerate() {
                if x == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                if x == 1 {
                    write!(f, "t{}", h + 1)?;
                } else {
                    write!(f, "t{}^{}", h + 1, x)?;
                }
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<&'a str> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn factor(&mut self, exps: &mut ExponentVec) -> Result<()> {
        if !self.eat(b't') {
            return self.err("expected variable");
        }
        let idx: usize = self.digits()?.parse().map_err(|_| Error::Parse {
            pos: self.pos,
            msg: "variable index too large".into(),
        })?;
        if idx == 0 || idx > self.nvars {
            return self.err(format!("variable t{idx} outside t1..t{}", self.nvars));
        }
        let mut x: i32 = 1;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let v: i32 = self.digits()?.parse().map_err(|_| Error::Parse {
                pos: self.pos,
                msg: "exponent out of range".into(),
            })?;
            x = if neg { -v } else { v };
        }
        exps.as_mut_slice()[idx - 1] += x;
        Ok(())
    }

    fn term(&mut self) -> Result<(ExponentVec, BigInt)> {
        let mut exps = ExponentVec::zero(self.nvars);
        let mut coeff = BigInt::one();
        if self.peek().is_some_and(|b| b.is_ascii_digit()) {
            coeff = self.digits()?.parse().unwrap();
            if !self.eat(b'*') {
                return Ok((exps, coeff));
            }
        }
        loop {
            self.factor(&mut exps)?;
            if !self.eat(b'*') {
                break;
            }
        }
        Ok((exps, coeff))
    }

    fn poly(&mut self) -> Result<LaurentPoly> {
        let mut p = LaurentPoly::zero(self.nvars);
        self.skip_ws();
        let mut neg = self.eat(b'-');
        loop {
            self.skip_ws();
            let (e, c) = self.term()?;
            p.add_term(e, if neg { -c } else { c });
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'+') => neg = false,
                Some(b'-') => neg = true,
                Some(_) => return self.err("expected '+' or '-'"),
            }
            self.pos += 1;
        }
        Ok(p)
    }
}

impl LaurentPoly {
    /// Parses the text form in a ring with `nvars` variables. Accepts any
    /// term order and repeated monomials; the result is canonical.
    pub fn parse(s: &str, nvars: usize) -> Result<LaurentPoly> {
        Parser {
            src: s.as_bytes(),
            pos: 0,
            nvars,
        }
        .poly()
    }
}

/// One term of the JSON form: `{"exp": [...], "c": ...}`.
///
/// `c` is a JSON integer when it fits in 64 bits and a decimal string
/// otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub exp: Vec<i32>,
    pub c: Value,
}

pub fn coeff_to_json(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(c.to_string()),
    }
}

pub fn coeff_from_json(v: &Value) -> Result<BigInt> {
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("bad coefficient {v}"),
    };
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(bad),
        Value::String(s) => s.parse().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

impl LaurentPoly {
    /// JSON terms in the same order as the text form.
    pub fn to_json_terms(&self) -> Vec<JsonTerm> {
        self.terms()
            .rev()
            .map(|(e, c)| JsonTerm {
                exp: e.as_slice().to_vec(),
                c: coeff_to_json(c),
            })
            .collect()
    }

    pub fn from_json_terms(nvars: usize, terms: &[JsonTerm]) -> Result<LaurentPoly> {
        let mut p = LaurentPoly::zero(nvars);
        for t in terms {
            if t.exp.len() != nvars {
                return Err(Error::LengthMismatch {
                    expected: nvars,
                    got: t.exp.len(),
                });
            }
            let c = coeff_from_json(&t.c)?;
            p.add_term(ExponentVec::from(t.exp.clone()), c);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> LaurentPoly {
        LaurentPoly::from_terms(
            4,
            [
                ([0, 0, 0, 0], 1),
                ([-1, 1, 0, 0], -1),
                ([-2, 2, 0, 0], 1),
                ([-2, 1, 1, 0], 1),
                ([-2, 1, 0, 1], 1),
            ]
            .map(|(e, c)| (ExponentVec::from(e), BigInt::from(c))),
        )
        .unwrap()
    }

    #[test]
    fn canonical_text() {
        assert_eq!(
            fixture().to_string(),
            "1 - t1^-1*t2 + t1^-2*t2^2 + t1^-2*t2*t3 + t1^-2*t2*t4"
        );
        assert_eq!(LaurentPoly::zero(2).to_string(), "0");
        assert_eq!(LaurentPoly::constant(2, -3).to_string(), "-3");
        let p = LaurentPoly::monomial([2, 0, -1].into(), -5);
        assert_eq!(p.to_string(), "-5*t1^2*t3^-1");
    }

    #[test]
    fn parse_round_trip() {
        let p = fixture();
        let s = p.to_string();
        assert_eq!(LaurentPoly::parse(&s, 4).unwrap(), p);
        // non-canonical input is normalised
        let q = LaurentPoly::parse("t2 + -0*t1", 2);
        assert!(q.is_err());
        let r = LaurentPoly::parse("t1 - t2 + t2 + 2*t1*t1", 2).unwrap();
        assert_eq!(r.to_string(), "2*t1^2 + t1");
        assert_eq!(LaurentPoly::parse("0", 3).unwrap(), LaurentPoly::zero(3));
    }

    #[test]
    fn parse_errors() {
        assert!(LaurentPoly::parse("t5", 4).is_err());
        assert!(LaurentPoly::parse("t1 +", 4).is_err());
        assert!(LaurentPoly::parse("x1", 4).is_err());
        assert!(LaurentPoly::parse("t1^", 4).is_err());
    }

    #[test]
    fn json_terms() {
        let p = fixture();
        let js = p.to_json_terms();
        assert_eq!(js[0].exp, vec![0, 0, 0, 0]);
        assert_eq!(js[1].c, Value::from(-1));
        assert_eq!(LaurentPoly::from_json_terms(4, &js).unwrap(), p);

        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let q = LaurentPoly::monomial([1].into(), big.clone());
        let js = q.to_json_terms();
        assert_eq!(js[0].c, Value::String(big.to_string()));
        assert_eq!(LaurentPoly::from_json_terms(1, &js).unwrap(), q);
    }
}
