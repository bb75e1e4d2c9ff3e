//! `IntR(E, V)` for a finite set `E` over the discrete valuation ring
//! `V = k[u]_(u)`: value vectors, the atoms `ψ_s`, and unique factorization.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::field::FieldElement;
use crate::algebra::xpoly::{EvalError, RationalFunction, XPoly};
use crate::gadgets::construct::{default_separation, gadget_psi_s};
use crate::gadgets::{GadgetError, IntRElement};
use crate::group::{Group, GroupElement};
use crate::parse::{parse_field_element, parse_rational_function, ParseError};
use crate::scalar::CoeffField;

/// Rational functions in `x` with coefficients in `k(u)`.
pub type BivariateRational = RationalFunction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DvrError {
    #[error("point {0} appears twice")]
    Duplicate(String),
    #[error("point {0} has a non-integral exponent")]
    NotIntegral(String),
    #[error("E is empty")]
    Empty,
    #[error("φ has a pole at point {0}")]
    Pole(usize),
    #[error("φ vanishes at point {0}")]
    Vanishes(usize),
    #[error("φ is not in IntR(E, V): value vector {0:?}")]
    NotMember(Vec<i64>),
    #[error("cofactor has value vector {0:?}, not a unit")]
    NotUnit(Vec<i64>),
    #[error("context lists N = {0} but has {1} points")]
    Count(usize, usize),
    #[error("bad field: {0}")]
    Field(String),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Clone, Debug)]
pub struct DvrContext {
    field: CoeffField,
    points: Vec<FieldElement>,
    separations: Vec<FieldElement>,
    atoms: Vec<IntRElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextJson {
    pub field: String,
    pub points: Vec<String>,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DvrFactorization {
    pub exponents: Vec<u64>,
    pub unit: BivariateRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationJson {
    pub exponents: Vec<u64>,
    pub unit: String,
}

impl DvrFactorization {
    pub fn to_json(&self) -> FactorizationJson {
        FactorizationJson {
            exponents: self.exponents.clone(),
            unit: self.unit.to_string(),
        }
    }
}

fn integral(p: &FieldElement) -> bool {
    p.num()
        .exponents()
        .chain(p.den().exponents())
        .all(GroupElement::is_integer)
}

impl DvrContext {
    /// Separations default to `u^m` with `m` one more than every `v(b − s)`.
    pub fn new(field: CoeffField, points: Vec<FieldElement>) -> Result<Self, DvrError> {
        if points.is_empty() {
            return Err(DvrError::Empty);
        }
        for (i, p) in points.iter().enumerate() {
            if !integral(p) {
                return Err(DvrError::NotIntegral(p.to_string()));
            }
            if points[..i].contains(p) {
                return Err(DvrError::Duplicate(p.to_string()));
            }
        }
        let separations = points
            .iter()
            .map(|s| default_separation(s, &points))
            .collect::<Result<Vec<_>, _>>()?;
        let one = GroupElement::one();
        let atoms = points
            .iter()
            .zip(&separations)
            .map(|(s, c)| gadget_psi_s(s, c, &one, &Group::Integers, &points))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DvrContext {
            field,
            points,
            separations,
            atoms,
        })
    }

    pub fn from_json(j: &ContextJson) -> Result<Self, DvrError> {
        let field: CoeffField = j.field.parse().map_err(DvrError::Field)?;
        if j.n != j.points.len() {
            return Err(DvrError::Count(j.n, j.points.len()));
        }
        let points = j
            .points
            .iter()
            .map(|s| parse_field_element(field, s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, points)
    }

    pub fn to_json(&self) -> ContextJson {
        ContextJson {
            field: self.field.to_string(),
            points: self.points.iter().map(|p| p.to_string()).collect(),
            n: self.points.len(),
        }
    }

    pub fn field(&self) -> CoeffField {
        self.field
    }

    pub fn points(&self) -> &[FieldElement] {
        &self.points
    }

    pub fn separations(&self) -> &[FieldElement] {
        &self.separations
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `ψ_{s_i}`, with value `1` at `s_i` and `0` at the other points.
    pub fn atom(&self, i: usize) -> &IntRElement {
        &self.atoms[i]
    }

    pub fn parse(&self, s: &str) -> Result<BivariateRational, DvrError> {
        Ok(parse_rational_function(self.field, s)?)
    }

    /// `(v(φ(s₁)), …, v(φ(s_n)))`.
    pub fn value_vector(&self, phi: &BivariateRational) -> Result<Vec<i64>, DvrError> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, s)| match phi.value_at(s) {
                Ok(Some(v)) => Ok(v.floor_i64()),
                Ok(None) => Err(DvrError::Vanishes(i)),
                Err(EvalError::Pole) => Err(DvrError::Pole(i)),
                Err(e) => Err(DvrError::Gadget(e.into())),
            })
            .collect()
    }

    pub fn is_member(&self, phi: &BivariateRational) -> Result<bool, DvrError> {
        Ok(self.value_vector(phi)?.iter().all(|&v| v >= 0))
    }

    /// `∏ ψ_{s_i}^{e_i}`.
    pub fn atom_product(&self, exponents: &[u64]) -> BivariateRational {
        let mut acc = RationalFunction::constant(FieldElement::one(self.field));
        for (a, &e) in self.atoms.iter().zip(exponents) {
            acc = acc.mul(&a.func.pow(e as u32));
        }
        acc
    }

    /// `φ = u₀ · ∏ ψ_{s_i}^{e_i}` with `e` the value vector and `u₀` a unit,
    /// checked by `u₀` and `1/u₀` both having zero value vectors.
    pub fn factor_into_atoms(&self, phi: &BivariateRational) -> Result<DvrFactorization, DvrError> {
        let vv = self.value_vector(phi)?;
        if vv.iter().any(|&v| v < 0) {
            return Err(DvrError::NotMember(vv));
        }
        let exponents: Vec<u64> = vv.iter().map(|&v| v as u64).collect();
        let unit = phi
            .div_reduced(&self.atom_product(&exponents))
            .map_err(|e| DvrError::Gadget(e.into()))?;
        let forward = self.value_vector(&unit)?;
        let back = self.value_vector(&unit.inv().map_err(|e| DvrError::Gadget(e.into()))?)?;
        if forward.iter().chain(&back).any(|&v| v != 0) {
            return Err(DvrError::NotUnit(forward));
        }
        Ok(DvrFactorization { exponents, unit })
    }

    /// A random polynomial in `x` with unit values on `E`.
    pub fn sample_unit<R: Rng>(&self, rng: &mut R) -> BivariateRational {
        loop {
            let deg = rng.gen_range(0..=2);
            let coeffs: Vec<FieldElement> = (0..=deg)
                .map(|_| {
                    let c = self.field.from_i64(rng.gen_range(-3..=3));
                    let e = GroupElement::integer(rng.gen_range(0..=1));
                    FieldElement::constant(c).shift(&e)
                })
                .collect();
            let p = RationalFunction::polynomial(XPoly::new(self.field, coeffs));
            if matches!(self.value_vector(&p), Ok(v) if v.iter().all(|&x| x == 0)) {
                return p;
            }
        }
    }
}

/// A set of points in `k(u)`, finite or accumulating at a limit.
#[derive(Clone, Debug)]
pub enum PointFamily {
    Finite(Vec<FieldElement>),
    /// `{limit + u^n : n ≥ from}`.
    Accumulating {
        limit: FieldElement,
        from: i64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomicityFlag {
    pub atomic: bool,
    pub reason: String,
    pub accumulation_point: Option<String>,
}

/// Atomicity of `IntR(E, V)` over `Γ = ℤ`: atomic exactly when `E` is
/// finite. An accumulation point `s` gives nonunits with no factorization
/// into atoms, since the cubic gadget centered at `s` with `v(b)` large
/// strictly divides every nonunit positive near `s`.
pub fn antimatter_flag(family: &PointFamily) -> AtomicityFlag {
    match family {
        PointFamily::Finite(points) => AtomicityFlag {
            atomic: true,
            reason: format!(
                "E is finite ({} points) and Γ = Z: IntR(E, V) is a UFD, its nonzero elements \
                 modulo units form N^{}",
                points.len(),
                points.len()
            ),
            accumulation_point: None,
        },
        PointFamily::Accumulating { limit, from } => AtomicityFlag {
            atomic: false,
            reason: format!(
                "E = {{{limit} + u^n : n ≥ {from}}} accumulates at {limit}; the cubic gadget \
                 centered there strictly divides nonunits, so IntR(E, V) is not atomic"
            ),
            accumulation_point: Some(limit.to_string()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(points: &[&str]) -> DvrContext {
        let f = CoeffField::Rationals;
        DvrContext::new(f, points.iter().map(|p| parse_field_element(f, p).unwrap()).collect()).unwrap()
    }

    #[test]
    fn value_vectors() {
        let c = ctx(&["0", "1"]);
        assert_eq!(c.value_vector(&c.parse("u").unwrap()).unwrap(), vec![1, 1]);
        assert_eq!(c.value_vector(&c.atom(0).func).unwrap(), vec![1, 0]);
        let d = ctx(&["u", "1+u"]);
        assert_eq!(d.value_vector(&d.parse("x").unwrap()).unwrap(), vec![1, 0]);
        assert!(matches!(
            c.value_vector(&c.parse("x").unwrap()),
            Err(DvrError::Vanishes(0))
        ));
    }

    #[test]
    fn factor_round_trip() {
        let c = ctx(&["0", "1"]);
        let u = c.parse("u").unwrap();
        let z = c.factor_into_atoms(&u).unwrap();
        assert_eq!(z.exponents, vec![1, 1]);
        let one = c.factor_into_atoms(&c.parse("1").unwrap()).unwrap();
        assert_eq!(one.exponents, vec![0, 0]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let unit = c.sample_unit(&mut rng);
        let phi = c.atom_product(&[2, 1]).mul(&unit);
        let z = c.factor_into_atoms(&phi).unwrap();
        assert_eq!(z.exponents, vec![2, 1]);
        assert_eq!(z.unit, unit);
        assert!(c.factor_into_atoms(&c.parse("1/u").unwrap()).is_err());
    }

    #[test]
    fn json_and_flags() {
        let c = ctx(&["u", "1+u", "u^2"]);
        let j = c.to_json();
        assert_eq!(j.n, 3);
        let back = DvrContext::from_json(&j).unwrap();
        assert_eq!(back.points(), c.points());
        assert!(DvrContext::new(
            CoeffField::Rationals,
            vec![FieldElement::zero(CoeffField::Rationals); 2]
        )
        .is_err());
        assert!(antimatter_flag(&PointFamily::Finite(c.points().to_vec())).atomic);
        let acc = PointFamily::Accumulating {
            limit: FieldElement::zero(CoeffField::Rationals),
            from: 1,
        };
        assert!(!antimatter_flag(&acc).atomic);
    }
}
