//! The fraction field `K`, as quotients of elements of `k[Γ]`.

use std::fmt;

use thiserror::Error;

use super::poly::Poly;
use crate::group::GroupElement;
use crate::scalar::{CoeffField, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("valuation of zero")]
    ZeroValuation,
}

/// `num / den` with `den ≠ 0`.
///
/// Kept with `den` shifted to least exponent `0` and lowest coefficient `1`.
/// No common factors are cancelled, so equality goes through
/// cross-multiplication.
#[derive(Clone)]
pub struct FieldElement {
    num: Poly,
    den: Poly,
}

impl FieldElement {
    pub fn new(num: Poly, den: Poly) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: Poly, den: Poly) -> Self {
        let field = den.field();
        if num.is_zero() {
            return FieldElement {
                num,
                den: Poly::one(field),
            };
        }
        let (e, c) = den.lowest().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        if e.is_zero() && c.is_one() {
            return FieldElement { num, den };
        }
        let ci = c.inv();
        let neg = -&e;
        let num = num.shift(&neg).scale(&ci);
        let den = den.shift(&neg).scale(&ci);
        FieldElement { num, den }
    }

    pub fn from_poly(p: Poly) -> Self {
        let field = p.field();
        FieldElement {
            num: p,
            den: Poly::one(field),
        }
    }

    pub fn zero(field: CoeffField) -> Self {
        Self::from_poly(Poly::zero(field))
    }

    pub fn one(field: CoeffField) -> Self {
        Self::from_poly(Poly::one(field))
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn t_pow(field: CoeffField, e: GroupElement) -> Self {
        Self::from_poly(Poly::t_pow(field, e))
    }

    pub fn field(&self) -> CoeffField {
        self.den.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// Denominator is `1`: the element lies in `k[Γ]`.
    pub fn as_poly(&self) -> Option<&Poly> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn valuation(&self) -> Result<GroupElement, FieldError> {
        let a = self.num.min_exp().ok_or(FieldError::ZeroValuation)?;
        Ok(a - self.den.min_exp().unwrap())
    }

    /// Lowest coefficient of `num` over lowest coefficient of `den`: the
    /// residue of `x / t^{v(x)}`.
    pub fn leading_coeff(&self) -> Option<Scalar> {
        let (_, a) = self.num.lowest()?;
        let (_, b) = self.den.lowest()?;
        Some(a.mul(&b.inv()))
    }

    pub fn add(&self, o: &FieldElement) -> FieldElement {
        if self.den == o.den {
            return Self::canonical(self.num.add(&o.num), self.den.clone());
        }
        if o.den.is_one() {
            return Self::canonical(self.num.add(&o.num.mul(&self.den)), self.den.clone());
        }
        if self.den.is_one() {
            return Self::canonical(self.num.mul(&o.den).add(&o.num), o.den.clone());
        }
        Self::canonical(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &FieldElement) -> FieldElement {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &FieldElement) -> FieldElement {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.field());
        }
        let den = if self.den.is_one() {
            o.den.clone()
        } else if o.den.is_one() {
            self.den.clone()
        } else {
            self.den.mul(&o.den)
        };
        Self::canonical(self.num.mul(&o.num), den)
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Self::canonical(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn scale(&self, c: &Scalar) -> FieldElement {
        Self::canonical(self.num.scale(c), self.den.clone())
    }

    /// Multiply by `t^e`.
    pub fn shift(&self, e: &GroupElement) -> FieldElement {
        Self::canonical(self.num.shift(e), self.den.clone())
    }

    pub fn pow(&self, n: i32) -> FieldElement {
        let base = if n < 0 {
            self.inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let k = n.unsigned_abs();
        Self::canonical(base.num.pow(k), base.den.pow(k))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, o: &Self) -> bool {
        if self.den == o.den {
            return self.num == o.num;
        }
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }
}

impl Eq for FieldElement {}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<Poly> for FieldElement {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
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
    fn valuation_examples() {
        let x = FieldElement::from_poly(t(3, 2).add(&t(2, 1)));
        assert_eq!(x.valuation().unwrap(), GroupElement::frac(3, 2));
        let num = t(13, 1).add(&t(7, 1)).add(&t(3, 1));
        let den = t(1, 2).add(&Poly::one(q()));
        let c = FieldElement::new(num, den).unwrap();
        assert_eq!(c.valuation().unwrap(), GroupElement::integer(3));
        let tt = FieldElement::from_poly(t(1, 1));
        assert_eq!(tt.mul(&tt).valuation().unwrap(), GroupElement::integer(2));
    }

    #[test]
    fn self_quotient_is_one() {
        let x = FieldElement::new(t(1, 1).add(&Poly::one(q())), t(1, 3).add(&t(2, 1))).unwrap();
        assert!(x.div(&x).unwrap().is_one());
        assert_eq!(x.div(&x).unwrap(), FieldElement::one(q()));
        assert!(FieldElement::zero(q()).inv().is_err());
    }

    #[test]
    fn canonical_denominator() {
        let x = FieldElement::new(t(1, 1), t(1, 2).scale(&q().from_i64(3))).unwrap();
        assert!(x.den().is_one());
        assert_eq!(
            x.num(),
            &t(1, 2).scale(&q().from_rational(&crate::group::rat(1, 3)).unwrap())
        );
    }
}
