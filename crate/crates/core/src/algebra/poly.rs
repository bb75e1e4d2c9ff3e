//! Sparse elements of the group algebra `k[Γ]`: finite sums `Σ c_γ t^γ`.
//!
//! Exponents may be any element of `ℚΓ`, negative ones included, so these
//! are the Laurent-type polynomials that contain `k[t;M]` and sit inside `K`.

use std::collections::BTreeMap;
use std::fmt;

use crate::group::GroupElement;
use crate::scalar::{CoeffField, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: CoeffField,
    terms: BTreeMap<GroupElement, Scalar>,
}

impl Poly {
    pub fn zero(field: CoeffField) -> Self {
        Poly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: CoeffField) -> Self {
        Self::constant(field.one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(c, GroupElement::zero())
    }

    pub fn monomial(c: Scalar, e: GroupElement) -> Self {
        let mut p = Poly::zero(c.field());
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    /// `t^e`.
    pub fn t_pow(field: CoeffField, e: GroupElement) -> Self {
        Self::monomial(field.one(), e)
    }

    pub fn from_terms<I: IntoIterator<Item = (GroupElement, Scalar)>>(field: CoeffField, items: I) -> Self {
        let mut p = Poly::zero(field);
        for (e, c) in items {
            p.add_term(e, &c);
        }
        p
    }

    pub fn field(&self) -> CoeffField {
        self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &Scalar)> {
        self.terms.iter()
    }

    pub fn exponents(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().is_some_and(|(e, c)| e.is_zero() && c.is_one())
    }

    pub fn coeff(&self, e: &GroupElement) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&GroupElement::zero())
    }

    /// Least exponent with its coefficient.
    pub fn lowest(&self) -> Option<(&GroupElement, &Scalar)> {
        self.terms.iter().next()
    }

    /// The `t`-adic valuation: least exponent.
    pub fn min_exp(&self) -> Option<&GroupElement> {
        self.terms.keys().next()
    }

    pub fn max_exp(&self) -> Option<&GroupElement> {
        self.terms.keys().next_back()
    }

    /// A single term `c·t^e`.
    pub fn as_monomial(&self) -> Option<(&GroupElement, &Scalar)> {
        (self.terms.len() == 1).then(|| self.terms.iter().next().unwrap())
    }

    fn add_term(&mut self, e: GroupElement, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(cur) => {
                let s = cur.add(c);
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *cur = s;
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c);
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly {
            field: self.field,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), &c.neg());
        }
        r
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero(self.field);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                r.add_term(e1 + e2, &c1.mul(c2));
            }
        }
        r
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.field);
        }
        Poly {
            field: self.field,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x.mul(c))).collect(),
        }
    }

    /// Multiply by `t^e`.
    pub fn shift(&self, e: &GroupElement) -> Poly {
        Poly {
            field: self.field,
            terms: self.terms.iter().map(|(x, c)| (x + e, c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one(self.field);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact division by a monomial; `None` for other divisors.
    pub fn div_monomial(&self, o: &Poly) -> Option<Poly> {
        let (e, c) = o.as_monomial()?;
        Some(self.shift(&-e).scale(&c.inv()))
    }

    /// Substitute `t ↦ c·t^{r}` for a positive rational `r`; used by tests to
    /// build related elements.
    pub fn map_exponents<F: Fn(&GroupElement) -> GroupElement>(&self, f: F) -> Poly {
        Poly::from_terms(self.field, self.terms.iter().map(|(e, c)| (f(e), c.clone())))
    }
}

fn fmt_exp(e: &GroupElement) -> String {
    if e.is_integer() {
        if e == &GroupElement::one() {
            "t".into()
        } else {
            format!("t^{e}")
        }
    } else {
        format!("t^({e})")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = crate::scalar::scalar_is_negative(c);
            let mag = if neg { c.neg() } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if e.is_zero() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", fmt_exp(e))?;
            } else {
                write!(f, "{mag}*{}", fmt_exp(e))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} over {}", self.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> CoeffField {
        CoeffField::Rationals
    }

    fn t(n: i64, d: i64) -> Poly {
        Poly::t_pow(q(), GroupElement::frac(n, d))
    }

    #[test]
    fn difference_of_squares() {
        let one = Poly::one(q());
        let a = t(1, 1).add(&one);
        let b = t(1, 1).sub(&one);
        assert_eq!(a.mul(&b), t(2, 1).sub(&one));
    }

    #[test]
    fn min_exponent_and_display() {
        let p = t(3, 2).add(&t(2, 1).scale(&q().from_i64(2)));
        assert_eq!(p.min_exp(), Some(&GroupElement::frac(3, 2)));
        assert_eq!(p.to_string(), "t^(3/2) + 2*t^2");
        assert_eq!(Poly::one(q()).sub(&t(1, 1)).to_string(), "1 - t");
    }

    #[test]
    fn char_two_cancels() {
        let f2 = CoeffField::Prime(2);
        let x = Poly::one(f2).add(&Poly::t_pow(f2, GroupElement::one()));
        let sq = x.pow(2);
        assert_eq!(sq.len(), 2);
    }
}
