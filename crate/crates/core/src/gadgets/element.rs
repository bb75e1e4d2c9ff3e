//! Rational functions carrying a value profile and a membership verdict.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::profile::{Alpha, ProfileValue, ValueProfile};
use crate::algebra::field::{FieldElement, FieldError};
use crate::algebra::local::{normalize_to_D, LocalError};
use crate::algebra::xpoly::{EvalError, RationalFunction};
use crate::group::{Group, GroupElement};
use crate::interval::{Interval, IntervalSet, Prefer};
use crate::monoid::{find_integrally_terminal, MonoidError, MonoidSpec};
use crate::scalar::{CoeffField, Scalar};
use crate::tropical::TropicalError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("element is not certified in IntR: {0}")]
    Uncertified(String),
    #[error("length {0} is not in the length set {1}")]
    BadLength(u64, String),
    #[error("profiles are centered at different points")]
    CenterMismatch,
    #[error("non-constant profile takes a value {0} below a gap of M (flat rule)")]
    Flat(GroupElement),
    #[error("profile check failed at v(a) = {at}: expected {expected}, found {found}")]
    ProfileMismatch {
        at: GroupElement,
        expected: String,
        found: String,
    },
    #[error("product of the factors differs from the input")]
    ProductMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Tropical(#[from] TropicalError),
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// The ring of values: `IntR(K, D)` for a gap monoid, or `IntR(K, V)` for
/// the valuation ring of `Γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Base {
    Monoid(MonoidSpec),
    Valuation(Group),
}

impl Base {
    pub fn group(&self) -> Group {
        match self {
            Base::Monoid(s) => s.group(),
            Base::Valuation(g) => *g,
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Monoid(s) => write!(f, "IntR(K, D) over {s}"),
            Base::Valuation(g) => write!(f, "IntR(K, V) over {g}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum IntRMembership {
    CertifiedInIntR { ring: String, checked_points: usize },
    NotCertified { reason: String },
}

impl IntRMembership {
    pub fn is_certified(&self) -> bool {
        matches!(self, IntRMembership::CertifiedInIntR { .. })
    }
}

/// How an element was built, for JSON output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Descriptor {
    Constant {
        value: GroupElement,
        element: String,
    },
    Zigzag {
        case: u8,
        alpha: GroupElement,
        alpha_prime: GroupElement,
        alpha_second: GroupElement,
        eps: Option<GroupElement>,
        shift: GroupElement,
        degree: usize,
        mu: Option<GroupElement>,
        f: Option<String>,
    },
    StoneWeierstrass {
        b_value: GroupElement,
        t_exp: GroupElement,
    },
    PsiS {
        s: String,
        c_value: GroupElement,
        t_exp: GroupElement,
    },
    Product {
        factors: Vec<Descriptor>,
    },
    Quotient {
        num: Box<Descriptor>,
        den: Box<Descriptor>,
    },
}

#[derive(Clone, Debug)]
pub struct IntRElement {
    pub func: RationalFunction,
    /// Profiles are functions of `v(a − center)`.
    pub center: FieldElement,
    pub group: Group,
    pub profile: ValueProfile,
    pub membership: IntRMembership,
    pub alpha: Alpha,
    pub descriptor: Descriptor,
}

fn unchecked() -> IntRMembership {
    IntRMembership::NotCertified {
        reason: "not checked".into(),
    }
}

impl IntRElement {
    pub fn new(func: RationalFunction, group: Group, profile: ValueProfile, descriptor: Descriptor) -> Self {
        let field = func.field();
        Self::centered(func, FieldElement::zero(field), group, profile, descriptor)
    }

    pub fn centered(
        func: RationalFunction,
        center: FieldElement,
        group: Group,
        profile: ValueProfile,
        descriptor: Descriptor,
    ) -> Self {
        let alpha = profile.alpha(&group);
        IntRElement {
            func,
            center,
            group,
            profile,
            membership: unchecked(),
            alpha,
            descriptor,
        }
    }

    pub fn constant(c: FieldElement, group: Group) -> Result<Self, GadgetError> {
        let v = c.valuation()?;
        let descriptor = Descriptor::Constant {
            value: v.clone(),
            element: c.to_string(),
        };
        Ok(Self::new(
            RationalFunction::constant(c),
            group,
            ValueProfile::constant(v),
            descriptor,
        ))
    }

    pub fn t_pow(field: CoeffField, e: GroupElement, group: Group) -> Self {
        Self::constant(FieldElement::t_pow(field, e), group).expect("monomial")
    }

    pub fn field(&self) -> CoeffField {
        self.func.field()
    }

    pub fn is_constant(&self) -> bool {
        self.func.as_constant().is_some()
    }

    fn product_descriptor(&self, o: &IntRElement) -> Descriptor {
        let mut factors = Vec::new();
        for d in [&self.descriptor, &o.descriptor] {
            match d {
                Descriptor::Product { factors: fs } => factors.extend(fs.iter().cloned()),
                other => factors.push(other.clone()),
            }
        }
        Descriptor::Product { factors }
    }

    fn check_center(&self, o: &IntRElement) -> Result<FieldElement, GadgetError> {
        // constants have the same value everywhere, so any center works
        if o.profile.is_constant() || self.center == o.center {
            Ok(self.center.clone())
        } else if self.profile.is_constant() {
            Ok(o.center.clone())
        } else {
            Err(GadgetError::CenterMismatch)
        }
    }

    pub fn mul(&self, o: &IntRElement) -> Result<IntRElement, GadgetError> {
        let center = self.check_center(o)?;
        Ok(Self::centered(
            self.func.mul(&o.func),
            center,
            self.group,
            self.profile.add(&o.profile),
            self.product_descriptor(o),
        ))
    }

    pub fn div(&self, o: &IntRElement) -> Result<IntRElement, GadgetError> {
        let center = self.check_center(o)?;
        Ok(Self::centered(
            self.func.div(&o.func)?,
            center,
            self.group,
            self.profile.sub(&o.profile),
            Descriptor::Quotient {
                num: Box::new(self.descriptor.clone()),
                den: Box::new(o.descriptor.clone()),
            },
        ))
    }

    pub fn pow(&self, n: u32) -> IntRElement {
        let factors = vec![self.descriptor.clone(); n as usize];
        Self::centered(
            self.func.pow(n),
            self.center.clone(),
            self.group,
            self.profile.scale(n),
            Descriptor::Product { factors },
        )
    }

    /// `a = center + c·t^γ`.
    pub fn point(&self, gamma: &GroupElement, c: &FieldElement) -> FieldElement {
        self.center.add(&c.shift(gamma))
    }

    /// `v(φ(a))` by direct field arithmetic. `None` for a zero value.
    pub fn value_at(&self, a: &FieldElement) -> Result<Option<GroupElement>, GadgetError> {
        Ok(self.func.value_at(a)?)
    }

    /// Compare direct evaluation at `center + c·t^γ` with the profile.
    pub fn check_profile_at(&self, gamma: &GroupElement, c: &FieldElement) -> Result<(), GadgetError> {
        let a = self.point(gamma, c);
        let found = match self.func.value_at(&a) {
            Ok(v) => v,
            Err(EvalError::Pole) => {
                return match self.profile.value_at(gamma) {
                    ProfileValue::Range { lower: None, .. } => Ok(()),
                    other => Err(mismatch(gamma, &other, "pole")),
                }
            }
            Err(e) => return Err(e.into()),
        };
        let expected = self.profile.value_at(gamma);
        let ok = match (&expected, &found) {
            (ProfileValue::Exact(v), Some(w)) => v == w,
            (ProfileValue::Exact(_), None) => false,
            (ProfileValue::Range { upper, .. }, None) => upper.is_none(),
            (ProfileValue::Range { lower, upper }, Some(w)) => {
                lower.as_ref().is_none_or(|l| l <= w) && upper.as_ref().is_none_or(|u| w <= u)
            }
        };
        if ok {
            Ok(())
        } else {
            let f = found.map(|w| w.to_string()).unwrap_or_else(|| "zero".into());
            Err(mismatch(gamma, &expected, &f))
        }
    }

    /// Certify membership in `base` from the profile. The profile must be
    /// exact; every value must be `0` or lie in the part of `M` where the
    /// odd-power normalization applies, and one representative evaluation per
    /// profile region is re-certified in `D`.
    pub fn certify(mut self, base: &Base) -> Result<IntRElement, GadgetError> {
        self.membership = match self.membership_in(base)? {
            Ok(n) => IntRMembership::CertifiedInIntR {
                ring: base.to_string(),
                checked_points: n,
            },
            Err(reason) => IntRMembership::NotCertified { reason },
        };
        Ok(self)
    }

    fn membership_in(&self, base: &Base) -> Result<Result<usize, String>, GadgetError> {
        if !self.profile.exact {
            return Ok(Err("profile is not exact".into()));
        }
        let group = base.group();
        if let Some(c) = self.func.as_constant() {
            return Ok(match base {
                Base::Valuation(_) => {
                    if c.valuation()?.signum().is_lt() {
                        Err("negative value".into())
                    } else {
                        Ok(1)
                    }
                }
                Base::Monoid(spec) => {
                    if normalize_to_D(&c, spec)?.is_certified() {
                        Ok(1)
                    } else {
                        Err(format!("constant {c} is not certified in D"))
                    }
                }
            });
        }
        let alpha = self.profile.alpha(&group);
        let Some(inf) = alpha.value else {
            return Ok(Err("values unbounded below".into()));
        };
        match base {
            Base::Valuation(_) => {
                if inf.is_negative() {
                    return Ok(Err(format!("value {inf} is negative")));
                }
                Ok(Ok(self.profile.representatives(&group).len()))
            }
            Base::Monoid(spec) => {
                if self.profile.is_identically_zero() {
                    return Ok(Err("non-constant function with zero profile".into()));
                }
                if let Some(w) = flat_violation(&self.profile, spec) {
                    return Ok(Err(GadgetError::Flat(w).to_string()));
                }
                let Some(delta) = find_integrally_terminal(spec) else {
                    return Ok(Err("M is not integrally terminal".into()));
                };
                let large = inf > delta || (inf == delta && spec.contains(&delta));
                if !large {
                    return Ok(Err(format!("infimum {inf} is below the terminal bound {delta}")));
                }
                let one = FieldElement::one(self.field());
                let mut n = 0;
                for g in self.profile.representatives(&group) {
                    let a = self.point(&g, &one);
                    let y = self.func.eval(&a)?;
                    let Some(cert) = normalize_to_D(&y, spec)?.certificate().cloned() else {
                        return Ok(Err(format!("value at v(a) = {g} not certified in D")));
                    };
                    if cert.to_field() != y {
                        return Ok(Err(format!("certificate at v(a) = {g} does not re-evaluate")));
                    }
                    n += 1;
                }
                Ok(Ok(n))
            }
        }
    }

    /// Left-to-right product.
    pub fn product_of(factors: &[IntRElement]) -> Result<IntRElement, GadgetError> {
        let mut it = factors.iter();
        let first = it
            .next()
            .ok_or_else(|| GadgetError::Precondition("empty product".into()))?;
        it.try_fold(first.clone(), |acc, f| acc.mul(f))
    }

    pub fn to_json(&self) -> ElementJson {
        ElementJson {
            function: self.func.to_string(),
            center: self.center.to_string(),
            group: self.group.to_string(),
            descriptor: self.descriptor.clone(),
            profile: self.profile.clone(),
            alpha: self.alpha.clone(),
            membership: self.membership.clone(),
        }
    }
}

/// Serializable view of an [`IntRElement`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementJson {
    pub function: String,
    pub center: String,
    pub group: String,
    pub descriptor: Descriptor,
    pub profile: ValueProfile,
    pub alpha: Alpha,
    pub membership: IntRMembership,
}

fn mismatch(at: &GroupElement, expected: &ProfileValue, found: &str) -> GadgetError {
    let e = match expected {
        ProfileValue::Exact(v) => v.to_string(),
        ProfileValue::Range { lower, upper } => format!(
            "[{}, {}]",
            lower.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "-inf".into()),
            upper.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "inf".into()),
        ),
    };
    GadgetError::ProfileMismatch {
        at: at.clone(),
        expected: e,
        found: found.into(),
    }
}

/// Values of `M` lying below a gap: `(0, c)` for `c` the right end of the
/// highest gap between two intervals of `M`.
pub fn flat_zone(spec: &MonoidSpec) -> Option<Interval> {
    let positive = IntervalSet::from_intervals([Interval::ray_up(GroupElement::zero(), false)]);
    let gaps = spec.positive_set().complement().intersect(&positive);
    let top = gaps.parts().last()?;
    if top.lo()?.is_zero() {
        return None;
    }
    Some(Interval::open(GroupElement::zero(), top.hi()?.clone()))
}

/// A value of `M` in the flat zone taken by a non-constant profile.
/// Nonzero values of `M` start at the first interval, so the zone is
/// searched as the band `[γ₁, c)`.
pub fn flat_violation(p: &ValueProfile, spec: &MonoidSpec) -> Option<GroupElement> {
    if p.generic.is_constant() {
        return None;
    }
    let zone = flat_zone(spec)?;
    let hi = zone.hi()?.clone();
    let g1 = spec.intervals().first()?.lo()?.clone();
    let band = p.generic.preimage_band(&g1, Some(&hi));
    band.pick_point(&spec.group(), Prefer::Low)
        .map(|g| p.generic.evaluate(&g))
}

/// A nonzero scalar as a field element.
pub fn scalar_element(c: Scalar) -> FieldElement {
    FieldElement::constant(c)
}
