//! Value profiles: `γ ↦ v(φ(a))` for `v(a − center) = γ`.

use serde::{Deserialize, Serialize};

use crate::group::{Group, GroupElement};
use crate::interval::{Interval, Prefer};
use crate::tropical::{Extremum, PiecewiseLinear};

/// A bound on `v(φ(a))` at one abscissa where the generic formula may fail.
/// `lower = None` allows arbitrarily negative values and poles; `upper =
/// None` allows zeros.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Override {
    pub at: GroupElement,
    pub lower: Option<GroupElement>,
    pub upper: Option<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueProfile {
    pub generic: PiecewiseLinear,
    pub overrides: Vec<Override>,
    /// Every `a` with `v(a − center) = γ` has `v(φ(a)) = generic(γ)`.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ProfileValue {
    Exact(GroupElement),
    Range {
        lower: Option<GroupElement>,
        upper: Option<GroupElement>,
    },
}

/// `α(φ) = inf v(φ(a))`. `value = None` means unbounded below.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alpha {
    pub value: Option<GroupElement>,
    pub attained: bool,
    /// Only a lower bound (inexact profile).
    pub bound_only: bool,
}

fn opt_add(a: &Option<GroupElement>, b: &Option<GroupElement>) -> Option<GroupElement> {
    Some(a.as_ref()? + b.as_ref()?)
}

impl ValueProfile {
    pub fn exact(generic: PiecewiseLinear) -> Self {
        ValueProfile {
            generic,
            overrides: Vec::new(),
            exact: true,
        }
    }

    pub fn with_overrides(generic: PiecewiseLinear, mut overrides: Vec<Override>) -> Self {
        overrides.sort_by(|a, b| a.at.cmp(&b.at));
        let exact = overrides.is_empty();
        ValueProfile {
            generic,
            overrides,
            exact,
        }
    }

    pub fn constant(v: GroupElement) -> Self {
        Self::exact(PiecewiseLinear::constant(v))
    }

    pub fn is_constant(&self) -> bool {
        self.exact && self.generic.is_constant()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.is_constant() && self.generic.pieces()[0].intercept.is_zero()
    }

    fn bounds_at(&self, g: &GroupElement) -> (Option<GroupElement>, Option<GroupElement>) {
        match self.overrides.iter().find(|o| &o.at == g) {
            Some(o) => (o.lower.clone(), o.upper.clone()),
            None => {
                let v = self.generic.evaluate(g);
                (Some(v.clone()), Some(v))
            }
        }
    }

    pub fn value_at(&self, g: &GroupElement) -> ProfileValue {
        match self.overrides.iter().find(|o| &o.at == g) {
            Some(o) => ProfileValue::Range {
                lower: o.lower.clone(),
                upper: o.upper.clone(),
            },
            None => ProfileValue::Exact(self.generic.evaluate(g)),
        }
    }

    fn combine(&self, o: &ValueProfile, sub: bool) -> ValueProfile {
        let generic = if sub {
            self.generic.sub(&o.generic)
        } else {
            self.generic.add(&o.generic)
        };
        let mut at: Vec<GroupElement> = self
            .overrides
            .iter()
            .chain(&o.overrides)
            .map(|x| x.at.clone())
            .collect();
        at.sort();
        at.dedup();
        let overrides = at
            .into_iter()
            .map(|g| {
                let (l1, u1) = self.bounds_at(&g);
                let (l2, u2) = o.bounds_at(&g);
                let (lower, upper) = if sub {
                    (opt_add(&l1, &u2.map(|x| -x)), opt_add(&u1, &l2.map(|x| -x)))
                } else {
                    (opt_add(&l1, &l2), opt_add(&u1, &u2))
                };
                Override { at: g, lower, upper }
            })
            .collect();
        let mut p = Self::with_overrides(generic, overrides);
        p.exact = p.overrides.is_empty() && self.exact && o.exact;
        p
    }

    pub fn add(&self, o: &ValueProfile) -> ValueProfile {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &ValueProfile) -> ValueProfile {
        self.combine(o, true)
    }

    pub fn scale(&self, n: u32) -> ValueProfile {
        let mut acc = Self::constant(GroupElement::zero());
        for _ in 0..n {
            acc = acc.add(self);
        }
        acc
    }

    /// Profile of `φ(x / r)` when `v(r) = h`.
    pub fn translate(&self, h: &GroupElement) -> ValueProfile {
        let overrides = self
            .overrides
            .iter()
            .map(|o| Override {
                at: &o.at + h,
                ..o.clone()
            })
            .collect();
        ValueProfile {
            generic: self.generic.translate(h),
            overrides,
            exact: self.exact,
        }
    }

    pub fn alpha(&self, group: &Group) -> Alpha {
        let inf = self.generic.infimum_over(group);
        let (mut value, mut attained) = match inf {
            Extremum::Infinite => (None, false),
            Extremum::Value { value, attained } => (Some(value), attained),
        };
        for o in &self.overrides {
            match (&o.lower, &value) {
                (None, _) => value = None,
                (Some(l), Some(v)) if l < v => {
                    value = Some(l.clone());
                    attained = false;
                }
                _ => {}
            }
        }
        Alpha {
            value,
            attained,
            bound_only: !self.exact,
        }
    }

    pub fn supremum(&self, group: &Group) -> Option<GroupElement> {
        match self.generic.supremum_over(group) {
            Extremum::Infinite => None,
            Extremum::Value { value, .. } => Some(value),
        }
    }

    /// One point of `Γ` inside each piece plus every breakpoint in `Γ`:
    /// enough abscissas to see every value region of the profile.
    pub fn representatives(&self, group: &Group) -> Vec<GroupElement> {
        let bps = self.generic.breakpoints();
        let mut out = Vec::new();
        for i in 0..=bps.len() {
            let lo = (i > 0).then(|| bps[i - 1].clone());
            let hi = bps.get(i).cloned();
            let open = match (lo, hi) {
                (None, None) => Interval::point(GroupElement::zero()),
                (Some(a), None) => Interval::ray_up(a, false),
                (None, Some(b)) => Interval::ray_down(b, false),
                (Some(a), Some(b)) => Interval::open(a, b),
            };
            if let Some(p) = open.pick_point(group, Prefer::Low) {
                out.push(p);
            }
        }
        out.extend(bps.iter().filter(|b| group.contains(b)).cloned());
        out.extend(self.overrides.iter().map(|o| o.at.clone()));
        out.sort();
        out.dedup();
        out
    }

    /// Abscissas on a `1/q` grid spanning all breakpoints with margin.
    pub fn sample_grid(&self, group: &Group, q: i64, margin: i64) -> Vec<GroupElement> {
        let bps = self.generic.breakpoints();
        let lo = bps.first().map(|b| b.floor_i64()).unwrap_or(0) - margin;
        let hi = bps.last().map(|b| b.ceil_i64()).unwrap_or(0) + margin;
        let mut out: Vec<GroupElement> = (lo * q..=hi * q)
            .map(|k| GroupElement::frac(k, q))
            .filter(|g| group.contains(g))
            .collect();
        out.extend(self.representatives(group));
        out.sort();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tropical::envelope;

    fn g(n: i64, d: i64) -> GroupElement {
        GroupElement::frac(n, d)
    }

    #[test]
    fn combine_with_overrides() {
        let a = ValueProfile::with_overrides(
            envelope(&[(0, g(1, 1)), (1, g(0, 1))]).unwrap(),
            vec![Override {
                at: g(1, 1),
                lower: Some(g(1, 1)),
                upper: None,
            }],
        );
        let b = ValueProfile::constant(g(2, 1));
        let s = a.add(&b);
        assert!(!s.exact);
        assert_eq!(s.value_at(&g(0, 1)), ProfileValue::Exact(g(2, 1)));
        assert_eq!(
            s.value_at(&g(1, 1)),
            ProfileValue::Range {
                lower: Some(g(3, 1)),
                upper: None
            }
        );
        let d = b.sub(&a);
        assert_eq!(
            d.value_at(&g(1, 1)),
            ProfileValue::Range {
                lower: None,
                upper: Some(g(1, 1))
            }
        );
        assert_eq!(a.alpha(&Group::Rationals).value, None);
    }

    #[test]
    fn representatives_cover_pieces() {
        let p = ValueProfile::exact(envelope(&[(0, g(1, 1)), (2, g(0, 1))]).unwrap());
        let r = p.representatives(&Group::Rationals);
        assert_eq!(r.len(), 3);
        assert!(r.contains(&g(1, 2)));
        let z = ValueProfile::exact(envelope(&[(0, g(1, 1)), (2, g(0, 1))]).unwrap());
        assert!(z.representatives(&Group::Integers).iter().all(|x| x.is_integer()));
    }
}
