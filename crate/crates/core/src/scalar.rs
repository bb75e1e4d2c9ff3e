//! Coefficient fields `ℚ` and `𝔽_p`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::group::{format_rational, parse_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoeffField {
    Rationals,
    Prime(u64),
}

impl CoeffField {
    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            CoeffField::Rationals => Scalar::Q(Rational::from_integer(n.into())),
            CoeffField::Prime(p) => Scalar::Fp(n.rem_euclid(p as i64) as u64, p),
        }
    }

    pub fn from_rational(&self, q: &Rational) -> Option<Scalar> {
        match *self {
            CoeffField::Rationals => Some(Scalar::Q(q.clone())),
            CoeffField::Prime(p) => {
                let pb = BigInt::from(p);
                let n = q.numer().mod_floor(&pb).to_u64()?;
                let d = q.denom().mod_floor(&pb).to_u64()?;
                if d == 0 {
                    return None;
                }
                Some(Scalar::Fp(n, p).mul(&Scalar::Fp(d, p).inv()))
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        match *self {
            CoeffField::Rationals => 0,
            CoeffField::Prime(p) => p,
        }
    }

    /// Every element, when the field is finite.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match *self {
            CoeffField::Rationals => None,
            CoeffField::Prime(p) => Some((0..p).map(|i| Scalar::Fp(i, p)).collect()),
        }
    }
}

impl fmt::Display for CoeffField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffField::Rationals => write!(f, "Q"),
            CoeffField::Prime(p) => write!(f, "F{p}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|i| i * i <= n).all(|i| !n.is_multiple_of(i))
}

impl FromStr for CoeffField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "Q" || t == "QQ" {
            return Ok(CoeffField::Rationals);
        }
        let digits = t
            .strip_prefix("F_")
            .or_else(|| t.strip_prefix("GF"))
            .or_else(|| t.strip_prefix('F'))
            .ok_or_else(|| format!("unknown field '{s}' (use Q or F<p>)"))?;
        let p: u64 = digits
            .trim_start_matches('(')
            .trim_end_matches(')')
            .parse()
            .map_err(|_| format!("bad characteristic in '{s}'"))?;
        if !is_prime(p) || p > 1 << 31 {
            return Err(format!("{p} is not a supported prime"));
        }
        Ok(CoeffField::Prime(p))
    }
}

impl Serialize for CoeffField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CoeffField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A coefficient. `𝔽_p` values carry their modulus and are kept in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(Rational),
    Fp(u64, u64),
}

impl Scalar {
    pub fn field(&self) -> CoeffField {
        match self {
            Scalar::Q(_) => CoeffField::Rationals,
            Scalar::Fp(_, p) => CoeffField::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp(v, _) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp(v, _) => *v == 1,
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp(a, p), Scalar::Fp(b, q)) if p == q => Scalar::Fp((a + b) % p, *p),
            _ => panic!("mixed coefficient fields"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp(a, p) => Scalar::Fp((p - a) % p, *p),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp(a, p), Scalar::Fp(b, q)) if p == q => {
                Scalar::Fp(((*a as u128 * *b as u128) % *p as u128) as u64, *p)
            }
            _ => panic!("mixed coefficient fields"),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Scalar::Q(a) => Scalar::Q(a.recip()),
            Scalar::Fp(a, p) => Scalar::Fp(pow_mod(*a, p - 2, *p), *p),
        }
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = self.field().one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r: u128 = 1;
    let mut base = b as u128 % m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % m as u128;
        }
        base = base * base % m as u128;
        e >>= 1;
    }
    b = r as u64;
    b
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => write!(f, "{}", format_rational(q)),
            Scalar::Fp(v, _) => write!(f, "{v}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => write!(f, "{}", format_rational(q)),
            Scalar::Fp(v, p) => write!(f, "{v} mod {p}"),
        }
    }
}

/// Parse a coefficient literal into `field`.
pub fn parse_scalar(field: CoeffField, s: &str) -> Option<Scalar> {
    let q = parse_rational(s).ok()?;
    field.from_rational(&q)
}

/// Sign of a rational scalar; `𝔽_p` scalars report positive when nonzero.
pub fn scalar_is_negative(s: &Scalar) -> bool {
    matches!(s, Scalar::Q(q) if q.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse() {
        let f = CoeffField::Prime(7);
        for i in 1..7 {
            let x = f.from_i64(i);
            assert!(x.mul(&x.inv()).is_one());
        }
        assert_eq!(f.from_rational(&crate::group::rat(1, 2)), Some(f.from_i64(4)));
        assert_eq!(f.from_rational(&crate::group::rat(1, 7)), None);
    }

    #[test]
    fn parses_fields() {
        assert_eq!("Q".parse::<CoeffField>(), Ok(CoeffField::Rationals));
        assert_eq!("F2".parse::<CoeffField>(), Ok(CoeffField::Prime(2)));
        assert_eq!("GF(5)".parse::<CoeffField>(), Ok(CoeffField::Prime(5)));
        assert!("F4".parse::<CoeffField>().is_err());
    }
}
