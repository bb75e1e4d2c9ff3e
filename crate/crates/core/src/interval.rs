//! Interval sets over the real line with endpoints in `ℚΓ`.
//!
//! Endpoints are encoded as *cuts*: `At(x, Below)` sits just left of `x`,
//! `At(x, Above)` just right of it. An interval is the half-open cut range
//! `[lo, hi)`, which turns open/closed bookkeeping into plain comparisons:
//! `[a, b]` is `[At(a,Below), At(b,Above))`, `(a, b)` is
//! `[At(a,Above), At(b,Below))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::group::{rat, Group, GroupElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Below,
    Above,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cut {
    NegInf,
    At(GroupElement, Side),
    PosInf,
}

impl Cut {
    fn value(&self) -> Option<&GroupElement> {
        match self {
            Cut::At(x, _) => Some(x),
            _ => None,
        }
    }

    fn shift(&self, by: &GroupElement) -> Cut {
        match self {
            Cut::At(x, s) => Cut::At(x + by, *s),
            other => other.clone(),
        }
    }

    /// Image under `y ↦ v − y`; the side flips.
    fn reflect(&self, v: &GroupElement) -> Cut {
        match self {
            Cut::NegInf => Cut::PosInf,
            Cut::PosInf => Cut::NegInf,
            Cut::At(x, Side::Below) => Cut::At(v - x, Side::Above),
            Cut::At(x, Side::Above) => Cut::At(v - x, Side::Below),
        }
    }
}

/// A real interval, possibly empty or unbounded.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Cut,
    hi: Cut,
}

impl Interval {
    pub fn from_cuts(lo: Cut, hi: Cut) -> Self {
        Interval { lo, hi }
    }

    pub fn closed(a: GroupElement, b: GroupElement) -> Self {
        Self::from_cuts(Cut::At(a, Side::Below), Cut::At(b, Side::Above))
    }

    pub fn open(a: GroupElement, b: GroupElement) -> Self {
        Self::from_cuts(Cut::At(a, Side::Above), Cut::At(b, Side::Below))
    }

    pub fn closed_open(a: GroupElement, b: GroupElement) -> Self {
        Self::from_cuts(Cut::At(a, Side::Below), Cut::At(b, Side::Below))
    }

    pub fn point(a: GroupElement) -> Self {
        Self::closed(a.clone(), a)
    }

    /// `[a, ∞)` or `(a, ∞)`.
    pub fn ray_up(a: GroupElement, closed: bool) -> Self {
        let side = if closed { Side::Below } else { Side::Above };
        Self::from_cuts(Cut::At(a, side), Cut::PosInf)
    }

    /// `(-∞, b]` or `(-∞, b)`.
    pub fn ray_down(b: GroupElement, closed: bool) -> Self {
        let side = if closed { Side::Above } else { Side::Below };
        Self::from_cuts(Cut::NegInf, Cut::At(b, side))
    }

    pub fn everything() -> Self {
        Self::from_cuts(Cut::NegInf, Cut::PosInf)
    }

    pub fn lo_cut(&self) -> &Cut {
        &self.lo
    }

    pub fn hi_cut(&self) -> &Cut {
        &self.hi
    }

    pub fn lo(&self) -> Option<&GroupElement> {
        self.lo.value()
    }

    pub fn hi(&self) -> Option<&GroupElement> {
        self.hi.value()
    }

    pub fn lo_closed(&self) -> bool {
        matches!(self.lo, Cut::At(_, Side::Below))
    }

    pub fn hi_closed(&self) -> bool {
        matches!(self.hi, Cut::At(_, Side::Above))
    }

    pub fn is_unbounded_above(&self) -> bool {
        self.hi == Cut::PosInf
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn contains(&self, y: &GroupElement) -> bool {
        self.lo <= Cut::At(y.clone(), Side::Below) && Cut::At(y.clone(), Side::Above) <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
        }
    }

    /// Minkowski sum. Closed endpoints add to closed endpoints; any open end
    /// makes the sum open there.
    pub fn sum(&self, other: &Interval) -> Interval {
        let lo = match (&self.lo, &other.lo) {
            (Cut::NegInf, _) | (_, Cut::NegInf) => Cut::NegInf,
            (Cut::At(x, s), Cut::At(y, t)) => Cut::At(x + y, (*s).max(*t)),
            _ => Cut::PosInf,
        };
        let hi = match (&self.hi, &other.hi) {
            (Cut::PosInf, _) | (_, Cut::PosInf) => Cut::PosInf,
            (Cut::At(x, s), Cut::At(y, t)) => Cut::At(x + y, (*s).min(*t)),
            _ => Cut::NegInf,
        };
        Interval { lo, hi }
    }

    pub fn shift(&self, by: &GroupElement) -> Interval {
        Interval {
            lo: self.lo.shift(by),
            hi: self.hi.shift(by),
        }
    }

    /// `{v − y : y ∈ self}`.
    pub fn reflect(&self, v: &GroupElement) -> Interval {
        Interval {
            lo: self.hi.reflect(v),
            hi: self.lo.reflect(v),
        }
    }

    /// Some element of `Γ` inside the interval.
    ///
    /// With `Prefer::Low` a closed lower endpoint in `Γ` is returned first,
    /// with `Prefer::High` a closed upper endpoint; otherwise an interior
    /// point of small height is searched for.
    pub fn pick_point(&self, group: &Group, prefer: Prefer) -> Option<GroupElement> {
        if self.is_empty() {
            return None;
        }
        let lo_closed = self.lo_closed().then(|| self.lo().unwrap().clone());
        let hi_closed = self.hi_closed().then(|| self.hi().unwrap().clone());
        let ordered = match prefer {
            Prefer::Low => [lo_closed, hi_closed],
            Prefer::High => [hi_closed, lo_closed],
        };
        for c in ordered.into_iter().flatten() {
            if group.contains(&c) {
                return Some(c);
            }
        }
        match (self.lo(), self.hi()) {
            (None, None) => Some(GroupElement::zero()),
            (Some(a), None) => {
                let n = GroupElement::rational(rat(a.floor_i64() + 1, 1));
                Some(n)
            }
            (None, Some(b)) => {
                let n = GroupElement::rational(rat(b.ceil_i64() - 1, 1));
                Some(n)
            }
            (Some(a), Some(b)) => point_strictly_between(group, a, b, prefer),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prefer {
    Low,
    High,
}

/// An element of `Γ` in the open interval `(a, b)`.
pub fn point_strictly_between(
    group: &Group,
    a: &GroupElement,
    b: &GroupElement,
    prefer: Prefer,
) -> Option<GroupElement> {
    if a >= b {
        return None;
    }
    match *group {
        Group::Integers => {
            let n = GroupElement::rational(rat(a.floor_i64() + 1, 1));
            let m = GroupElement::rational(rat(b.ceil_i64() - 1, 1));
            let cand = if prefer == Prefer::Low { n } else { m };
            (&cand > a && &cand < b).then_some(cand)
        }
        Group::QuadraticField(_) => Some((a + b).halve()),
        Group::Rationals => {
            if a.is_rational() && b.is_rational() {
                return Some((a + b).halve());
            }
            let mut q: i64 = 1;
            while q < (1 << 40) {
                let cand = GroupElement::rational(rat((a.scale_int(q)).floor_i64() + 1, q));
                if &cand < b {
                    return Some(cand);
                }
                q *= 2;
            }
            None
        }
        Group::QuadraticIntegers(d) => {
            let root = GroupElement::sqrt(d);
            for k in 0..2_000_000i64 {
                let coef = if k % 2 == 0 { k / 2 } else { -(k / 2) - 1 };
                let irr = root.scale_int(coef);
                let base = a - &irr;
                let int_part = GroupElement::rational(rat(base.floor_i64() + 1, 1));
                let cand = &int_part + &irr;
                if &cand < b {
                    return Some(cand);
                }
            }
            None
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        match &self.lo {
            Cut::NegInf => write!(f, "(-inf")?,
            Cut::At(x, Side::Below) => write!(f, "[{x}")?,
            Cut::At(x, Side::Above) => write!(f, "({x}")?,
            Cut::PosInf => unreachable!(),
        }
        match &self.hi {
            Cut::PosInf => write!(f, ",inf)"),
            Cut::At(x, Side::Above) => write!(f, ",{x}]"),
            Cut::At(x, Side::Below) => write!(f, ",{x})"),
            Cut::NegInf => unreachable!(),
        }
    }
}

/// A finite union of intervals, kept sorted, disjoint and non-touching.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn from_intervals<I: IntoIterator<Item = Interval>>(items: I) -> Self {
        let mut parts: Vec<Interval> = items.into_iter().filter(|i| !i.is_empty()).collect();
        parts.sort_by(|x, y| x.lo.cmp(&y.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(last) if p.lo <= last.hi => {
                    if p.hi > last.hi {
                        last.hi = p.hi;
                    }
                }
                _ => merged.push(p),
            }
        }
        IntervalSet { parts: merged }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, y: &GroupElement) -> bool {
        self.parts.iter().any(|p| p.contains(y))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.parts.iter().chain(other.parts.iter()).cloned())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for p in &self.parts {
            for q in &other.parts {
                out.push(p.intersect(q));
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = Cut::NegInf;
        for p in &self.parts {
            out.push(Interval::from_cuts(cursor, p.lo.clone()));
            cursor = p.hi.clone();
        }
        out.push(Interval::from_cuts(cursor, Cut::PosInf));
        IntervalSet::from_intervals(out)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersect(&other.complement())
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn sum(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for p in &self.parts {
            for q in &other.parts {
                out.push(p.sum(q));
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn reflect(&self, v: &GroupElement) -> IntervalSet {
        IntervalSet::from_intervals(self.parts.iter().map(|p| p.reflect(v)))
    }

    /// First point of `Γ` found scanning the parts left to right.
    pub fn pick_point(&self, group: &Group, prefer: Prefer) -> Option<GroupElement> {
        self.parts.iter().find_map(|p| p.pick_point(group, prefer))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(" u "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64, d: i64) -> GroupElement {
        GroupElement::frac(n, d)
    }

    #[test]
    fn closedness_and_membership() {
        let i = Interval::closed_open(g(1, 1), g(2, 1));
        assert!(i.contains(&g(1, 1)));
        assert!(!i.contains(&g(2, 1)));
        assert!(Interval::open(g(1, 1), g(1, 1)).is_empty());
        assert!(!Interval::point(g(1, 1)).is_empty());
    }

    #[test]
    fn sums_track_closedness() {
        let a = Interval::closed(g(1, 1), g(3, 2));
        let s = a.sum(&a);
        assert_eq!(s, Interval::closed(g(2, 1), g(3, 1)));
        let b = Interval::closed_open(g(1, 1), g(2, 1));
        assert_eq!(b.sum(&b), Interval::closed_open(g(2, 1), g(4, 1)));
    }

    #[test]
    fn difference_and_merge() {
        let m = IntervalSet::from_intervals([Interval::closed(g(2, 1), g(3, 1)), Interval::ray_up(g(4, 1), true)]);
        let s = m.sum(&m);
        assert_eq!(s, IntervalSet::from_intervals([Interval::ray_up(g(4, 1), true)]));
        let atoms = m.difference(&s);
        assert_eq!(atoms.parts(), &[Interval::closed(g(2, 1), g(3, 1))]);
        let touching = IntervalSet::from_intervals([
            Interval::closed_open(g(1, 1), g(2, 1)),
            Interval::closed(g(2, 1), g(3, 1)),
        ]);
        assert_eq!(touching.parts().len(), 1);
    }

    #[test]
    fn reflection() {
        let i = Interval::closed_open(g(1, 1), g(2, 1));
        let r = i.reflect(&g(5, 1));
        assert_eq!(
            r,
            Interval::from_cuts(Cut::At(g(3, 1), Side::Above), Cut::At(g(4, 1), Side::Above))
        );
        assert!(r.contains(&g(4, 1)) && !r.contains(&g(3, 1)));
    }

    #[test]
    fn picks_points_in_lattices() {
        let z2 = Group::QuadraticIntegers(2);
        let i = Interval::open(g(1, 3), g(1, 2));
        let p = i.pick_point(&z2, Prefer::Low).unwrap();
        assert!(z2.contains(&p) && i.contains(&p));
        let j = Interval::open(g(3, 1), g(4, 1));
        assert_eq!(j.pick_point(&Group::Rationals, Prefer::Low), Some(g(7, 2)));
        assert_eq!(j.pick_point(&Group::Integers, Prefer::Low), None);
        let k = Interval::open("sqrt2".parse().unwrap(), g(3, 2));
        let q = k.pick_point(&Group::Rationals, Prefer::Low).unwrap();
        assert!(k.contains(&q) && q.is_rational());
    }
}
