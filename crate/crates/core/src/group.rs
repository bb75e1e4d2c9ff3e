//! Exact arithmetic in rank-one value groups.
//!
//! A value group is one of `ℤ`, `ℚ`, `ℤ + ℤ√d` or `ℚ(√d)`, always viewed
//! inside its divisible closure through the real embedding with `√d > 0`.
//! Every element is stored as `a + b√d` with `a, b` rational, so elements of
//! `Γ` and of `ℚΓ` share one representation and membership in the lattice
//! is a separate predicate ([`Group::contains`]).
//!
//! Comparisons are decided by sign analysis of `a`, `b` and `a² − d·b²`.
//! Nothing here touches floating point except [`GroupElement::to_f64`], which
//! exists for display and for seeding the exact floor search.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

/// Builds the rational `n/d`. Panics on a zero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group descriptor mismatch: sqrt{0} vs sqrt{1}")]
    Mismatch(u32, u32),
    #[error("{0} is not a squarefree integer >= 2")]
    BadRadicand(u64),
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

fn parse_err(what: &'static str, input: &str) -> GroupError {
    GroupError::Parse {
        what,
        input: input.to_string(),
    }
}

pub fn is_squarefree(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational, GroupError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| parse_err("rational", s))?;
    let d: BigInt = den.parse().map_err(|_| parse_err("rational", s))?;
    if d.is_zero() {
        return Err(parse_err("rational", s));
    }
    Ok(BigRational::new(n, d))
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Exact element `a + b√d` of `ℚ(√d)` (or of `ℚ` when `b = 0`).
///
/// Canonical form keeps `d = 1` whenever `b = 0`, so the derived equality and
/// hash agree with equality of real numbers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    a: Rational,
    b: Rational,
    d: u32,
}

impl GroupElement {
    pub fn new(a: Rational, b: Rational, d: u32) -> Result<Self, GroupError> {
        if !b.is_zero() && !is_squarefree(d as u64) {
            return Err(GroupError::BadRadicand(d as u64));
        }
        Ok(Self::canonical(a, b, d))
    }

    fn canonical(a: Rational, b: Rational, d: u32) -> Self {
        if b.is_zero() {
            GroupElement { a, b, d: 1 }
        } else {
            GroupElement { a, b, d }
        }
    }

    pub fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn rational(q: Rational) -> Self {
        GroupElement {
            a: q,
            b: Rational::zero(),
            d: 1,
        }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(rat_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(rat(n, d))
    }

    /// `√d`.
    pub fn sqrt(d: u32) -> Self {
        assert!(is_squarefree(d as u64), "sqrt of non-squarefree {d}");
        GroupElement {
            a: Rational::zero(),
            b: Rational::one(),
            d,
        }
    }

    /// `a + b√d` from integers.
    pub fn quadratic(a: i64, b: i64, d: u32) -> Self {
        Self::new(rat_int(a), rat_int(b), d).expect("squarefree radicand")
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn irrational_part(&self) -> &Rational {
        &self.b
    }

    /// The radicand when the element is irrational.
    pub fn radicand(&self) -> Option<u32> {
        if self.b.is_zero() {
            None
        } else {
            Some(self.d)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.a.is_integer()
    }

    fn joint_radicand(&self, other: &Self) -> Result<u32, GroupError> {
        match (self.d, other.d) {
            (1, e) | (e, 1) => Ok(e),
            (d, e) if d == e => Ok(d),
            (d, e) => Err(GroupError::Mismatch(d, e)),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GroupError> {
        let d = self.joint_radicand(other)?;
        Ok(Self::canonical(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, GroupError> {
        let d = self.joint_radicand(other)?;
        Ok(Self::canonical(&self.a - &other.a, &self.b - &other.b, d))
    }

    /// Exact sign of `a + b√d`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
            (Ordering::Less, Ordering::Less) => Ordering::Less,
            _ => {
                // Opposite signs: compare a² with d·b².
                let a2 = &self.a * &self.a;
                let db2 = &self.b * &self.b * rat_int(self.d as i64);
                match a2.cmp(&db2) {
                    Ordering::Equal => Ordering::Equal,
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn checked_cmp(&self, other: &Self) -> Result<Ordering, GroupError> {
        if self.b == other.b || self.a == other.a {
            self.joint_radicand(other)?;
            return Ok(self.a.cmp(&other.a).then_with(|| self.b.cmp(&other.b)));
        }
        Ok(self.checked_sub(other)?.signum())
    }

    /// `q·x`, an element of the divisible closure.
    pub fn scale(&self, q: &Rational) -> Self {
        Self::canonical(&self.a * q, &self.b * q, self.d)
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&rat_int(n))
    }

    pub fn halve(&self) -> Self {
        self.scale(&rat(1, 2))
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Approximate value, for display and as a starting guess only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }

    /// Exact `⌊x⌋`.
    pub fn floor(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.floor().to_integer();
        }
        let guess = self.to_f64().floor();
        let mut n = BigInt::from(guess as i64);
        let as_elem = |n: &BigInt| GroupElement::rational(BigRational::from_integer(n.clone()));
        while &as_elem(&n) > self {
            n -= 1;
        }
        while &as_elem(&(&n + 1)) <= self {
            n += 1;
        }
        n
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    pub fn floor_i64(&self) -> i64 {
        self.floor().to_i64().expect("floor fits in i64")
    }

    pub fn ceil_i64(&self) -> i64 {
        self.ceil().to_i64().expect("ceil fits in i64")
    }

    /// Height used for lattice searches: the largest absolute value among
    /// numerators and denominators of `a` and `b`.
    pub fn height(&self) -> BigInt {
        [
            self.a.numer().abs(),
            self.a.denom().clone(),
            self.b.numer().abs(),
            self.b.denom().clone(),
        ]
        .into_iter()
        .max()
        .unwrap()
    }
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order of the real embedding. Panics when the two elements live in
/// different quadratic fields; use [`GroupElement::checked_cmp`] to get an
/// error instead.
impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.checked_cmp(other).expect("compare across groups")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&GroupElement> for &GroupElement {
            type Output = GroupElement;
            fn $method(self, rhs: &GroupElement) -> GroupElement {
                self.$checked(rhs).expect("group operation across groups")
            }
        }
        impl $tr<GroupElement> for GroupElement {
            type Output = GroupElement;
            fn $method(self, rhs: GroupElement) -> GroupElement {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&GroupElement> for GroupElement {
            type Output = GroupElement;
            fn $method(self, rhs: &GroupElement) -> GroupElement {
                (&self).$method(rhs)
            }
        }
        impl $tr<GroupElement> for &GroupElement {
            type Output = GroupElement;
            fn $method(self, rhs: GroupElement) -> GroupElement {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);

impl AddAssign<&GroupElement> for GroupElement {
    fn add_assign(&mut self, rhs: &GroupElement) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&GroupElement> for GroupElement {
    fn sub_assign(&mut self, rhs: &GroupElement) {
        *self = &*self - rhs;
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement::canonical(-&self.a, -&self.b, self.d)
    }
}

impl Neg for GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        -&self
    }
}

impl Mul<&Rational> for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: &Rational) -> GroupElement {
        self.scale(rhs)
    }
}

impl Mul<i64> for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: i64) -> GroupElement {
        self.scale_int(rhs)
    }
}

impl Mul<i64> for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: i64) -> GroupElement {
        self.scale_int(rhs)
    }
}

impl From<i64> for GroupElement {
    fn from(n: i64) -> Self {
        GroupElement::integer(n)
    }
}

impl From<Rational> for GroupElement {
    fn from(q: Rational) -> Self {
        GroupElement::rational(q)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", format_rational(&self.a));
        }
        let sign = if self.b.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{}{}{}*sqrt{}",
            format_rational(&self.a),
            sign,
            format_rational(&self.b.abs()),
            self.d
        )
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for GroupElement {
    type Err = GroupError;

    /// Accepts `p/q`, `a+b*sqrtD`, `a-b*sqrtD`, `b*sqrtD`, `sqrtD`, `a+sqrtD`.
    fn from_str(s: &str) -> Result<Self, GroupError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(idx) = compact.find("sqrt") else {
            return parse_rational(&compact).map(GroupElement::rational);
        };
        let d: u32 = compact[idx + 4..].parse().map_err(|_| parse_err("group element", s))?;
        let prefix = compact[..idx].trim_end_matches('*');
        let split = prefix
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .next_back();
        let (a_str, b_str) = match split {
            Some(i) => (&prefix[..i], &prefix[i..]),
            None => ("0", prefix),
        };
        let a = parse_rational(a_str)?;
        let b = match b_str {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => parse_rational(other.trim_start_matches('+'))?,
        };
        GroupElement::new(a, b, d)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The value group `Γ` together with the lattice that defines it inside `ℚΓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    /// `ℤ`; discrete, used for the discrete valuation ring.
    Integers,
    /// `ℚ`.
    Rationals,
    /// `ℤ + ℤ√d`.
    QuadraticIntegers(u32),
    /// `ℚ(√d)`.
    QuadraticField(u32),
}

impl Group {
    pub fn radicand(&self) -> Option<u32> {
        match *self {
            Group::QuadraticIntegers(d) | Group::QuadraticField(d) => Some(d),
            _ => None,
        }
    }

    /// Membership of `x` in the lattice `Γ`.
    pub fn contains(&self, x: &GroupElement) -> bool {
        let rad_ok = |d: u32| x.radicand().is_none_or(|e| e == d);
        match *self {
            Group::Integers => x.is_integer(),
            Group::Rationals => x.is_rational(),
            Group::QuadraticIntegers(d) => rad_ok(d) && x.a.is_integer() && x.b.is_integer(),
            Group::QuadraticField(d) => rad_ok(d),
        }
    }

    /// Membership in the divisible closure `ℚΓ`.
    pub fn closure_contains(&self, x: &GroupElement) -> bool {
        match self.radicand() {
            None => x.is_rational(),
            Some(d) => x.radicand().is_none_or(|e| e == d),
        }
    }

    pub fn is_divisible(&self) -> bool {
        matches!(self, Group::Rationals | Group::QuadraticField(_))
    }

    /// Every supported group except `ℤ` is dense in `ℝ`.
    pub fn has_no_minimal_positive(&self) -> bool {
        !matches!(self, Group::Integers)
    }

    /// An element of `Γ` with `0 < x < bound`, when one exists.
    ///
    /// For `ℤ + ℤ√d` this is a power of `√d − ⌊√d⌋`, the standard witness of
    /// density.
    pub fn small_positive_below(&self, bound: &GroupElement) -> Option<GroupElement> {
        if !bound.is_positive() {
            return None;
        }
        match *self {
            Group::Integers => None,
            Group::Rationals | Group::QuadraticField(_) => {
                let mut x = GroupElement::one();
                while &x >= bound {
                    x = x.halve();
                }
                if self.contains(&x) {
                    Some(x)
                } else {
                    None
                }
            }
            Group::QuadraticIntegers(d) => {
                let root = GroupElement::sqrt(d);
                let unit = &root - GroupElement::rational(BigRational::from_integer(root.floor()));
                let mut x = unit.clone();
                while &x >= bound {
                    x = quad_mul(&x, &unit);
                }
                Some(x)
            }
        }
    }

    /// A prime `p` and a positive `μ ∈ Γ` with `μ/p ∉ Γ`; `None` for
    /// divisible groups.
    pub fn non_divisibility_witness(&self) -> Option<(u32, GroupElement)> {
        if self.is_divisible() {
            None
        } else {
            Some((2, GroupElement::one()))
        }
    }
}

/// Product of two elements of the same quadratic field.
pub fn quad_mul(x: &GroupElement, y: &GroupElement) -> GroupElement {
    let d = x.joint_radicand(y).expect("same field");
    let dr = rat_int(d as i64);
    let a = &x.a * &y.a + &x.b * &y.b * dr;
    let b = &x.a * &y.b + &x.b * &y.a;
    GroupElement::canonical(a, b, d)
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Integers => write!(f, "Z"),
            Group::Rationals => write!(f, "Q"),
            Group::QuadraticIntegers(d) => write!(f, "Z[sqrt{d}]"),
            Group::QuadraticField(d) => write!(f, "Q(sqrt {d})"),
        }
    }
}

impl FromStr for Group {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, GroupError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let radicand = |inner: &str| -> Result<u32, GroupError> {
            let d: u64 = inner
                .strip_prefix("sqrt")
                .ok_or_else(|| parse_err("group", s))?
                .parse()
                .map_err(|_| parse_err("group", s))?;
            if !is_squarefree(d) {
                return Err(GroupError::BadRadicand(d));
            }
            Ok(d as u32)
        };
        match compact.as_str() {
            "Z" => Ok(Group::Integers),
            "Q" => Ok(Group::Rationals),
            _ => {
                if let Some(inner) = compact.strip_prefix("Z[").and_then(|r| r.strip_suffix(']')) {
                    Ok(Group::QuadraticIntegers(radicand(inner)?))
                } else if let Some(inner) = compact.strip_prefix("Q(").and_then(|r| r.strip_suffix(')')) {
                    Ok(Group::QuadraticField(radicand(inner)?))
                } else {
                    Err(parse_err("group", s))
                }
            }
        }
    }
}

impl Serialize for Group {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Group {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Least common multiple of the denominators of both parts.
pub fn common_denominator(x: &GroupElement) -> BigInt {
    x.a.denom().lcm(x.b.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ge(s: &str) -> GroupElement {
        s.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(ge("1/2") + ge("1/3"), ge("5/6"));
        assert_eq!(ge("1+1*sqrt2") + ge("2-1*sqrt2"), ge("3"));
        assert_eq!(ge("3+sqrt2") + GroupElement::zero(), ge("3+sqrt2"));
        assert!(matches!(
            ge("sqrt2").checked_add(&ge("sqrt3")),
            Err(GroupError::Mismatch(2, 3))
        ));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(ge("1").cmp(&ge("sqrt2")), Ordering::Less);
        assert_eq!(ge("3/2").cmp(&ge("3/2")), Ordering::Equal);
        assert_eq!(ge("7-4*sqrt2").cmp(&ge("1")), Ordering::Greater);
        assert!(ge("sqrt2").checked_cmp(&ge("sqrt5")).is_err());
    }

    #[test]
    fn scale_examples() {
        assert_eq!(ge("1").scale(&rat(1, 3)), ge("1/3"));
        assert_eq!(ge("sqrt2").scale(&rat(1, 2)), ge("0+1/2*sqrt2"));
        assert_eq!(ge("5/2").scale(&rat(2, 5)), ge("1"));
    }

    #[test]
    fn membership_examples() {
        let z2 = Group::QuadraticIntegers(2);
        assert!(!z2.contains(&ge("1/2")));
        assert!(z2.contains(&ge("3+2*sqrt2")));
        assert!(Group::Rationals.contains(&ge("7/3")));
        assert!(!Group::Rationals.contains(&ge("sqrt2")));
        assert!(!Group::Integers.contains(&ge("1/2")));
        assert!(Group::QuadraticField(2).contains(&ge("1/3+1/5*sqrt2")));
    }

    #[test]
    fn parse_and_display() {
        for s in ["0", "-7/3", "1+1*sqrt2", "-1/2-3*sqrt5", "0+1*sqrt2"] {
            assert_eq!(ge(s).to_string(), s);
        }
        assert_eq!(ge("sqrt2"), ge("0+1*sqrt2"));
        assert_eq!(ge("-sqrt2"), ge("0-1*sqrt2"));
        assert_eq!(ge("2*sqrt3"), ge("0+2*sqrt3"));
        assert_eq!(ge("1 + sqrt2"), ge("1+1*sqrt2"));
        assert!("1/0".parse::<GroupElement>().is_err());
        assert!("sqrt4".parse::<GroupElement>().is_err());
    }

    #[test]
    fn group_descriptors() {
        for (s, g) in [
            ("Q", Group::Rationals),
            ("Z", Group::Integers),
            ("Z[sqrt2]", Group::QuadraticIntegers(2)),
            ("Q(sqrt 2)", Group::QuadraticField(2)),
        ] {
            assert_eq!(s.parse::<Group>().unwrap(), g);
            assert_eq!(g.to_string().parse::<Group>().unwrap(), g);
        }
        assert!("Z[sqrt8]".parse::<Group>().is_err());
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(ge("sqrt2").floor(), BigInt::from(1));
        assert_eq!(ge("-sqrt2").floor(), BigInt::from(-2));
        assert_eq!(ge("7/2").ceil(), BigInt::from(4));
        assert_eq!(ge("3").floor(), BigInt::from(3));
        assert_eq!(ge("2+2*sqrt2").floor(), BigInt::from(4));
    }

    #[test]
    fn density_witness() {
        assert!(Group::Rationals.has_no_minimal_positive());
        assert!(!Group::Integers.has_no_minimal_positive());
        let z2 = Group::QuadraticIntegers(2);
        assert!(z2.has_no_minimal_positive());
        let bound = ge("1/1000");
        let x = z2.small_positive_below(&bound).unwrap();
        assert!(x.is_positive() && x < bound && z2.contains(&x));
        assert!(Group::Integers.small_positive_below(&bound).is_none());
    }
}
