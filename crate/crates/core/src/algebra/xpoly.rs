//! Polynomials and rational functions in `x` with coefficients in `K`.

use std::fmt;

use thiserror::Error;

use super::field::{FieldElement, FieldError};
use crate::group::GroupElement;
use crate::scalar::CoeffField;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("denominator vanishes at the evaluation point")]
    Pole,
    #[error("zero rational function")]
    ZeroFunction,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `a_0 + a_1 x + … + a_n x^n`, trimmed so that `a_n ≠ 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct XPoly {
    field: CoeffField,
    coeffs: Vec<FieldElement>,
}

impl XPoly {
    pub fn new(field: CoeffField, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(FieldElement::is_zero) {
            coeffs.pop();
        }
        XPoly { field, coeffs }
    }

    pub fn zero(field: CoeffField) -> Self {
        XPoly::new(field, Vec::new())
    }

    pub fn constant(c: FieldElement) -> Self {
        XPoly::new(c.field(), vec![c])
    }

    pub fn one(field: CoeffField) -> Self {
        Self::constant(FieldElement::one(field))
    }

    pub fn x(field: CoeffField) -> Self {
        XPoly::new(field, vec![FieldElement::zero(field), FieldElement::one(field)])
    }

    /// `c·x^n`.
    pub fn monomial(c: FieldElement, n: usize) -> Self {
        let field = c.field();
        let mut coeffs = vec![FieldElement::zero(field); n];
        coeffs.push(c);
        XPoly::new(field, coeffs)
    }

    pub fn field(&self) -> CoeffField {
        self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `(i, v(a_i))` for the nonzero coefficients.
    pub fn coefficient_values(&self) -> Vec<(usize, GroupElement)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.valuation().unwrap()))
            .collect()
    }

    pub fn add(&self, o: &XPoly) -> XPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = FieldElement::zero(self.field);
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = o.coeffs.get(i).unwrap_or(&zero);
                a.add(b)
            })
            .collect();
        XPoly::new(self.field, coeffs)
    }

    pub fn neg(&self) -> XPoly {
        XPoly::new(self.field, self.coeffs.iter().map(FieldElement::neg).collect())
    }

    pub fn sub(&self, o: &XPoly) -> XPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &XPoly) -> XPoly {
        if self.is_zero() || o.is_zero() {
            return XPoly::zero(self.field);
        }
        let mut coeffs = vec![FieldElement::zero(self.field); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        XPoly::new(self.field, coeffs)
    }

    pub fn scale(&self, c: &FieldElement) -> XPoly {
        XPoly::new(self.field, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn pow(&self, n: u32) -> XPoly {
        let mut acc = XPoly::one(self.field);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self / d` when `d` divides exactly.
    pub fn div_exact(&self, d: &XPoly) -> Option<XPoly> {
        let dd = d.degree()?;
        let lead = &d.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let n = match self.degree() {
            None => return Some(XPoly::zero(self.field)),
            Some(n) if n < dd => return None,
            Some(n) => n,
        };
        let mut q = vec![FieldElement::zero(self.field); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let c = &rem[i + dd];
            if c.is_zero() {
                continue;
            }
            let k = if lead.is_one() { c.clone() } else { c.div(lead).ok()? };
            for (j, b) in d.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    rem[i + j] = rem[i + j].sub(&k.mul(b));
                }
            }
            q[i] = k;
        }
        rem.iter().all(FieldElement::is_zero).then(|| XPoly::new(self.field, q))
    }

    /// Horner evaluation at `a ∈ K`.
    pub fn eval(&self, a: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero(self.field);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(a).add(c);
        }
        acc
    }

    /// `f(m·x + b)`.
    pub fn compose_linear(&self, m: &FieldElement, b: &FieldElement) -> XPoly {
        let lin = XPoly::new(self.field, vec![b.clone(), m.clone()]);
        let mut acc = XPoly::zero(self.field);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&XPoly::constant(c.clone()));
        }
        acc
    }
}

impl fmt::Display for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let xs = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            if i == 0 {
                write!(f, "({c})")?;
            } else if c.is_one() {
                write!(f, "{xs}")?;
            } else {
                write!(f, "({c})*{xs}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `num(x) / den(x)` over `K`.
#[derive(Clone)]
pub struct RationalFunction {
    num: XPoly,
    den: XPoly,
}

impl RationalFunction {
    pub fn new(num: XPoly, den: XPoly) -> Result<Self, EvalError> {
        if den.is_zero() {
            return Err(EvalError::Field(FieldError::DivisionByZero));
        }
        Ok(RationalFunction { num, den })
    }

    pub fn polynomial(p: XPoly) -> Self {
        let field = p.field();
        RationalFunction {
            num: p,
            den: XPoly::one(field),
        }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::polynomial(XPoly::constant(c))
    }

    pub fn num(&self) -> &XPoly {
        &self.num
    }

    pub fn den(&self) -> &XPoly {
        &self.den
    }

    pub fn field(&self) -> CoeffField {
        self.num.field()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Constant function, when both parts have degree zero.
    pub fn as_constant(&self) -> Option<FieldElement> {
        if self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0) {
            let n = self
                .num
                .coeffs()
                .first()
                .cloned()
                .unwrap_or_else(|| FieldElement::zero(self.field()));
            Some(n.div(&self.den.coeffs()[0]).unwrap())
        } else {
            None
        }
    }

    pub fn mul(&self, o: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        }
    }

    pub fn add(&self, o: &RationalFunction) -> RationalFunction {
        if self.den == o.den {
            return RationalFunction {
                num: self.num.add(&o.num),
                den: self.den.clone(),
            };
        }
        RationalFunction {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RationalFunction) -> RationalFunction {
        self.add(&o.neg())
    }

    pub fn inv(&self) -> Result<RationalFunction, EvalError> {
        if self.is_zero() {
            return Err(EvalError::ZeroFunction);
        }
        Ok(RationalFunction {
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    pub fn div(&self, o: &RationalFunction) -> Result<RationalFunction, EvalError> {
        Ok(self.mul(&o.inv()?))
    }

    /// `self / o`, cancelling `o.num` and `o.den` against `self` when they
    /// divide exactly; otherwise the plain quotient.
    pub fn div_reduced(&self, o: &RationalFunction) -> Result<RationalFunction, EvalError> {
        if o.is_zero() {
            return Err(EvalError::ZeroFunction);
        }
        match (self.num.div_exact(&o.num), self.den.div_exact(&o.den)) {
            (Some(num), Some(den)) => RationalFunction::new(num, den),
            _ => self.div(o),
        }
    }

    pub fn scale(&self, c: &FieldElement) -> RationalFunction {
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, n: u32) -> RationalFunction {
        RationalFunction {
            num: self.num.pow(n),
            den: self.den.pow(n),
        }
    }

    pub fn compose_linear(&self, m: &FieldElement, b: &FieldElement) -> RationalFunction {
        RationalFunction {
            num: self.num.compose_linear(m, b),
            den: self.den.compose_linear(m, b),
        }
    }

    pub fn eval(&self, a: &FieldElement) -> Result<FieldElement, EvalError> {
        let d = self.den.eval(a);
        if d.is_zero() {
            return Err(EvalError::Pole);
        }
        Ok(self.num.eval(a).div(&d)?)
    }

    /// `v(φ(a))`, computed as `v(num(a)) − v(den(a))`. `None` when
    /// `φ(a) = 0`.
    pub fn value_at(&self, a: &FieldElement) -> Result<Option<GroupElement>, EvalError> {
        let d = self.den.eval(a);
        if d.is_zero() {
            return Err(EvalError::Pole);
        }
        let n = self.num.eval(a);
        if n.is_zero() {
            return Ok(None);
        }
        Ok(Some(&n.valuation()? - &d.valuation()?))
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, o: &Self) -> bool {
        if self.num == o.num && self.den == o.den {
            return true;
        }
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == XPoly::one(self.field()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "[{}] / [{}]", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> CoeffField {
        CoeffField::Rationals
    }

    fn tc(n: i64, d: i64) -> FieldElement {
        FieldElement::t_pow(q(), GroupElement::frac(n, d))
    }

    #[test]
    fn evaluation_and_composition() {
        let x = XPoly::x(q());
        let f = x.pow(2).add(&XPoly::constant(tc(1, 1)));
        let at = f.eval(&tc(1, 3));
        assert_eq!(at.valuation().unwrap(), GroupElement::frac(2, 3));
        let shifted = f.compose_linear(&FieldElement::one(q()), &tc(1, 2).neg());
        let back = shifted.eval(&tc(1, 2));
        assert_eq!(back, tc(1, 1));
    }

    #[test]
    fn rational_identity() {
        let x = XPoly::x(q());
        let f = RationalFunction::new(x.add(&XPoly::one(q())), x.clone()).unwrap();
        assert!(f.div(&f).unwrap() == RationalFunction::constant(FieldElement::one(q())));
        assert_eq!(f.value_at(&tc(1, 1)).unwrap(), Some(GroupElement::integer(-1)));
        assert!(matches!(f.eval(&FieldElement::zero(q())), Err(EvalError::Pole)));
    }

    #[test]
    fn exact_division() {
        let x = XPoly::x(q());
        let a = x.add(&XPoly::constant(tc(1, 1)));
        let b = x.pow(2).add(&XPoly::constant(tc(-1, 2)));
        let ab = a.mul(&b);
        assert_eq!(ab.div_exact(&a), Some(b.clone()));
        assert_eq!(ab.scale(&tc(1, 3)).div_exact(&b.scale(&tc(1, 3))), Some(a.clone()));
        assert_eq!(b.div_exact(&a), None);
        let f = RationalFunction::new(ab.clone(), x.clone()).unwrap();
        let g = RationalFunction::new(a.clone(), x.clone()).unwrap();
        let r = f.div_reduced(&g).unwrap();
        assert_eq!(r.num(), &b);
        assert_eq!(r.den(), &XPoly::one(q()));
    }
}
