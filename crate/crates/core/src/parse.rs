//! Text syntax for field elements and rational functions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/')? unary)*       juxtaposition multiplies
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! primary := integer | 't' | 'u' | 'x' | '(' expr ')'
//! exponent:= '-'? integer | '(' value ')' | '{' value '}'
//! ```
//!
//! `u` is an alias for `t`. Powers of `t` accept any value of `Γ`
//! (`t^(3/2)`, `t^{1+sqrt2}`); other bases take integer exponents.

use thiserror::Error;

use crate::algebra::field::FieldElement;
use crate::algebra::xpoly::{RationalFunction, XPoly};
use crate::group::GroupElement;
use crate::scalar::CoeffField;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected {found} at byte {at} in {input:?}")]
    Unexpected { found: String, at: usize, input: String },
    #[error("bad exponent {0:?}")]
    Exponent(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0:?} depends on x")]
    NotConstant(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok<'a> {
    Num(&'a str),
    /// `sqrtD`, only meaningful inside an exponent.
    Sqrt(&'a str),
    Ident(char),
    Op(char),
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok<'a>)>,
    pos: usize,
    field: CoeffField,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok<'_>)>, ParseError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Num(&src[start..i])));
        } else if src[i..].starts_with("sqrt") {
            let start = i;
            i += 4;
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Sqrt(&src[start..i])));
        } else if matches!(c, 't' | 'u' | 'x') {
            out.push((i, Tok::Ident(c)));
            i += 1;
        } else if "+-*/^(){}[]".contains(c) {
            // brackets group like parentheses, matching the display form
            let c = match c {
                '[' => '(',
                ']' => ')',
                other => other,
            };
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ParseError::Unexpected {
                found: format!("'{c}'"),
                at: i,
                input: src.into(),
            });
        }
    }
    Ok(out)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.pos).map(|t| t.1)
    }

    fn err(&self) -> ParseError {
        let (at, found) = match self.toks.get(self.pos) {
            Some((at, t)) => (*at, format!("{t:?}")),
            None => (self.src.len(), "end of input".into()),
        };
        ParseError::Unexpected {
            found,
            at,
            input: self.src.into(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_primary(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Op('(')))
    }

    fn term(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                acc = acc.div(&d).map_err(|_| ParseError::DivisionByZero)?;
            } else if self.starts_primary() {
                acc = acc.mul(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction, ParseError> {
        if self.eat('-') {
            Ok(self.unary()?.neg())
        } else {
            self.power()
        }
    }

    fn exponent(&mut self) -> Result<GroupElement, ParseError> {
        let close = if self.eat('(') {
            ')'
        } else if self.eat('{') {
            '}'
        } else {
            let neg = self.eat('-');
            let Some(Tok::Num(n)) = self.peek() else {
                return Err(self.err());
            };
            self.pos += 1;
            let v: i64 = n.parse().map_err(|_| ParseError::Exponent(n.into()))?;
            return Ok(GroupElement::integer(if neg { -v } else { v }));
        };
        let start = self.toks.get(self.pos).map(|t| t.0).ok_or_else(|| self.err())?;
        let mut depth = 0;
        while let Some(t) = self.peek() {
            match t {
                Tok::Op('(') | Tok::Op('{') => depth += 1,
                Tok::Op(c) if c == close && depth == 0 => break,
                Tok::Op(')') | Tok::Op('}') => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
        let end = self.toks.get(self.pos).map(|t| t.0).ok_or_else(|| self.err())?;
        self.pos += 1;
        let text = self.src[start..end].trim();
        text.parse().map_err(|_| ParseError::Exponent(text.into()))
    }

    fn power(&mut self) -> Result<RationalFunction, ParseError> {
        let base = self.peek().ok_or_else(|| self.err())?;
        let field = self.field;
        let is_t = matches!(base, Tok::Ident('t' | 'u'));
        let value = match base {
            Tok::Num(n) => {
                self.pos += 1;
                let big: num_bigint::BigInt = n.parse().map_err(|_| self.err())?;
                let q = crate::group::Rational::from_integer(big);
                let c = field.from_rational(&q).ok_or(ParseError::DivisionByZero)?;
                RationalFunction::constant(FieldElement::constant(c))
            }
            Tok::Ident('t' | 'u') => {
                self.pos += 1;
                RationalFunction::constant(FieldElement::t_pow(field, GroupElement::one()))
            }
            Tok::Ident(_) => {
                self.pos += 1;
                RationalFunction::polynomial(XPoly::x(field))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err());
                }
                e
            }
            _ => return Err(self.err()),
        };
        if !self.eat('^') {
            return Ok(value);
        }
        let e = self.exponent()?;
        if is_t {
            return Ok(RationalFunction::constant(FieldElement::t_pow(field, e)));
        }
        if !e.is_integer() {
            return Err(ParseError::Exponent(e.to_string()));
        }
        let n = e.floor_i64();
        let p = value.pow(n.unsigned_abs() as u32);
        if n < 0 {
            p.inv().map_err(|_| ParseError::DivisionByZero)
        } else {
            Ok(p)
        }
    }
}

pub fn parse_rational_function(field: CoeffField, s: &str) -> Result<RationalFunction, ParseError> {
    let mut p = Parser {
        src: s,
        toks: lex(s)?,
        pos: 0,
        field,
    };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err());
    }
    Ok(f)
}

pub fn parse_field_element(field: CoeffField, s: &str) -> Result<FieldElement, ParseError> {
    parse_rational_function(field, s)?
        .as_constant()
        .ok_or_else(|| ParseError::NotConstant(s.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elements() {
        let q = CoeffField::Rationals;
        let a = parse_field_element(q, "t^(3/2) + 2t^2").unwrap();
        assert_eq!(a.valuation().unwrap(), GroupElement::frac(3, 2));
        let b = parse_field_element(q, "u/(1+u)").unwrap();
        assert_eq!(b.valuation().unwrap(), GroupElement::one());
        let c = parse_field_element(CoeffField::Prime(2), "t^{1+sqrt2}").unwrap();
        assert_eq!(c.valuation().unwrap(), GroupElement::quadratic(1, 1, 2));
        assert!(parse_field_element(q, "x + 1").is_err());
        assert!(parse_field_element(q, "t^^2").is_err());
    }

    #[test]
    fn functions() {
        let q = CoeffField::Rationals;
        let f = parse_rational_function(q, "(x^3 + t^2)/(x^3 + t)").unwrap();
        let a = FieldElement::one(q);
        assert_eq!(f.value_at(&a).unwrap(), Some(GroupElement::zero()));
        let g = parse_rational_function(q, "x^-1").unwrap();
        assert_eq!(
            g.value_at(&FieldElement::t_pow(q, GroupElement::one())).unwrap(),
            Some(GroupElement::integer(-1))
        );
        assert_eq!(
            parse_rational_function(q, "-x - -x").unwrap(),
            RationalFunction::constant(FieldElement::zero(q))
        );
        let h = parse_rational_function(q, "(3/2 t^(1/2) - t^2)/(x^2 + t^(-1)) + x").unwrap();
        assert_eq!(parse_rational_function(q, &h.to_string()).unwrap(), h);
    }
}
