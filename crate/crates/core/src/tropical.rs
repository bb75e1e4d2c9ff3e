//! Exact piecewise-linear minimum-valuation calculus.
//!
//! For `f = Σ a_i x^i` over `K`, `minval_f(γ) = min_i (v(a_i) + iγ)` is the
//! lower envelope of finitely many lines with integer slopes. Rational
//! functions subtract the two envelopes.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::xpoly::{RationalFunction, XPoly};
use crate::group::{Group, GroupElement, Rational};
use crate::interval::{Interval, Prefer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TropicalError {
    #[error("envelope of an empty family")]
    Empty,
    #[error("minval of the zero function")]
    ZeroFunction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub slope: i64,
    pub intercept: GroupElement,
}

impl Piece {
    pub fn at(&self, x: &GroupElement) -> GroupElement {
        &x.scale_int(self.slope) + &self.intercept
    }
}

/// `γ ↦ c_i γ + β_i` on `[δ_{i−1}, δ_i]`, with `δ_0 = −∞`, `δ_k = +∞`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    breakpoints: Vec<GroupElement>,
    pieces: Vec<Piece>,
}

/// Infimum or supremum of a piecewise-linear function over `Γ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Extremum {
    Infinite,
    Value { value: GroupElement, attained: bool },
}

impl Extremum {
    pub fn value(&self) -> Option<&GroupElement> {
        match self {
            Extremum::Infinite => None,
            Extremum::Value { value, .. } => Some(value),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Dichotomy {
    IdenticallyZero,
    StrictlyPositive,
    /// A point of `Γ` where the value is negative, or zero when the function
    /// is nonnegative but not identically zero.
    Mixed(GroupElement),
}

fn intersection(a: &Piece, b: &Piece) -> GroupElement {
    // a.s x + a.b = b.s x + b.b
    let ds = a.slope - b.slope;
    (&b.intercept - &a.intercept).scale(&Rational::new(1.into(), ds.into()))
}

impl PiecewiseLinear {
    pub fn constant(c: GroupElement) -> Self {
        PiecewiseLinear {
            breakpoints: Vec::new(),
            pieces: vec![Piece { slope: 0, intercept: c }],
        }
    }

    /// Build from raw parts, checking continuity.
    pub fn from_parts(breakpoints: Vec<GroupElement>, pieces: Vec<Piece>) -> Option<Self> {
        let p = PiecewiseLinear { breakpoints, pieces };
        (p.pieces.len() == p.breakpoints.len() + 1
            && p.breakpoints.windows(2).all(|w| w[0] < w[1])
            && p.is_continuous())
        .then_some(p)
    }

    pub fn breakpoints(&self) -> &[GroupElement] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_constant(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].slope == 0
    }

    pub fn is_continuous(&self) -> bool {
        self.breakpoints
            .iter()
            .enumerate()
            .all(|(i, x)| self.pieces[i].at(x) == self.pieces[i + 1].at(x))
    }

    pub fn slopes_strictly_decrease(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0].slope > w[1].slope)
    }

    /// Index of the piece used on the open interval right of `x`.
    fn piece_right_of(&self, x: &GroupElement) -> usize {
        self.breakpoints.partition_point(|b| b <= x)
    }

    pub fn evaluate(&self, x: &GroupElement) -> GroupElement {
        let i = self.breakpoints.partition_point(|b| b < x);
        self.pieces[i].at(x)
    }

    fn combine(&self, o: &PiecewiseLinear, sign: i64) -> PiecewiseLinear {
        let mut bps: Vec<GroupElement> = self.breakpoints.iter().chain(o.breakpoints.iter()).cloned().collect();
        bps.sort();
        bps.dedup();
        let mut pieces = Vec::with_capacity(bps.len() + 1);
        let pick = |p: &PiecewiseLinear, j: usize| -> usize {
            if j == 0 {
                0
            } else {
                p.piece_right_of(&bps[j - 1])
            }
        };
        for j in 0..=bps.len() {
            let a = &self.pieces[pick(self, j)];
            let b = &o.pieces[pick(o, j)];
            pieces.push(Piece {
                slope: a.slope + sign * b.slope,
                intercept: &a.intercept + &b.intercept.scale_int(sign),
            });
        }
        PiecewiseLinear {
            breakpoints: bps,
            pieces,
        }
        .simplified()
    }

    pub fn add(&self, o: &PiecewiseLinear) -> PiecewiseLinear {
        self.combine(o, 1)
    }

    pub fn sub(&self, o: &PiecewiseLinear) -> PiecewiseLinear {
        self.combine(o, -1)
    }

    pub fn scale(&self, n: i64) -> PiecewiseLinear {
        if n == 0 {
            return Self::constant(GroupElement::zero());
        }
        PiecewiseLinear {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    slope: p.slope * n,
                    intercept: p.intercept.scale_int(n),
                })
                .collect(),
        }
    }

    /// `γ ↦ p(γ − h)`: the profile of `φ(x / r)` when `v(r) = h`.
    pub fn translate(&self, h: &GroupElement) -> PiecewiseLinear {
        PiecewiseLinear {
            breakpoints: self.breakpoints.iter().map(|b| b + h).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    slope: p.slope,
                    intercept: &p.intercept - &h.scale_int(p.slope),
                })
                .collect(),
        }
    }

    /// Drop breakpoints between identical pieces.
    fn simplified(mut self) -> Self {
        let mut bps = Vec::new();
        let mut pieces: Vec<Piece> = vec![self.pieces.remove(0)];
        for (b, p) in self.breakpoints.into_iter().zip(self.pieces) {
            if pieces.last() == Some(&p) {
                continue;
            }
            bps.push(b);
            pieces.push(p);
        }
        PiecewiseLinear {
            breakpoints: bps,
            pieces,
        }
    }

    /// Infimum over `Γ`. Dense groups give the infimum over `ℚΓ`, attained
    /// only at points of `Γ`; over `ℤ` only integer points count.
    pub fn infimum_over(&self, group: &Group) -> Extremum {
        self.extremum(group, Ordering::Less)
    }

    pub fn supremum_over(&self, group: &Group) -> Extremum {
        self.extremum(group, Ordering::Greater)
    }

    fn extremum(&self, group: &Group, dir: Ordering) -> Extremum {
        let first = &self.pieces[0];
        let last = self.pieces.last().unwrap();
        // left end: γ → −∞ sends slope·γ to −sign(slope)·∞
        let left_escapes = match dir {
            Ordering::Less => first.slope > 0,
            _ => first.slope < 0,
        };
        let right_escapes = match dir {
            Ordering::Less => last.slope < 0,
            _ => last.slope > 0,
        };
        if left_escapes || right_escapes {
            return Extremum::Infinite;
        }
        let better = |a: &GroupElement, b: &GroupElement| a.cmp(b) == dir;
        let mut best: Option<(GroupElement, bool)> = None;
        let mut offer = |v: GroupElement, attained: bool| match &mut best {
            None => best = Some((v, attained)),
            Some((b, at)) => {
                if better(&v, b) {
                    *b = v;
                    *at = attained;
                } else if &v == b {
                    *at |= attained;
                }
            }
        };
        if first.slope == 0 {
            offer(first.intercept.clone(), true);
        }
        if last.slope == 0 {
            offer(last.intercept.clone(), true);
        }
        for b in &self.breakpoints {
            if *group == Group::Integers {
                for n in [b.floor(), b.ceil()] {
                    let x = GroupElement::rational(Rational::from_integer(n));
                    offer(self.evaluate(&x), true);
                }
            } else {
                offer(self.evaluate(b), group.contains(b));
            }
        }
        let (value, attained) = best.expect("at least one piece");
        Extremum::Value { value, attained }
    }

    pub fn dichotomy(&self, group: &Group) -> Dichotomy {
        if self.pieces.iter().all(|p| p.slope == 0 && p.intercept.is_zero()) {
            return Dichotomy::IdenticallyZero;
        }
        for strict in [true, false] {
            for (i, p) in self.pieces.iter().enumerate() {
                let dom = self.piece_domain(i);
                let region = nonpositive_region(p, strict).intersect(&dom);
                if let Some(w) = region.pick_point(group, Prefer::High) {
                    return Dichotomy::Mixed(w);
                }
            }
        }
        Dichotomy::StrictlyPositive
    }

    /// Closed domain of piece `i`.
    pub fn piece_domain(&self, i: usize) -> Interval {
        let lo = (i > 0).then(|| self.breakpoints[i - 1].clone());
        let hi = self.breakpoints.get(i).cloned();
        match (lo, hi) {
            (None, None) => Interval::everything(),
            (Some(a), None) => Interval::ray_up(a, true),
            (None, Some(b)) => Interval::ray_down(b, true),
            (Some(a), Some(b)) => Interval::closed(a, b),
        }
    }

    /// Where the function lies in the half-open band `[lo, hi)` (or above
    /// `lo` when `hi` is `None`), as a union of intervals, one per piece.
    pub fn preimage_band(&self, lo: &GroupElement, hi: Option<&GroupElement>) -> crate::interval::IntervalSet {
        let mut out = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let dom = self.piece_domain(i);
            let band = at_least(p, lo).intersect(&match hi {
                Some(h) => below(p, h),
                None => Interval::everything(),
            });
            out.push(band.intersect(&dom));
        }
        crate::interval::IntervalSet::from_intervals(out)
    }
}

/// `{γ : p(γ) < 0}` or `{γ : p(γ) ≤ 0}` for one affine piece.
fn nonpositive_region(p: &Piece, strict: bool) -> Interval {
    let zero = GroupElement::zero();
    if p.slope == 0 {
        let ok = if strict {
            p.intercept < zero
        } else {
            p.intercept <= zero
        };
        return if ok {
            Interval::everything()
        } else {
            Interval::open(zero.clone(), zero)
        };
    }
    let root = (-&p.intercept).scale(&Rational::new(1.into(), p.slope.into()));
    if p.slope > 0 {
        Interval::ray_down(root, !strict)
    } else {
        Interval::ray_up(root, !strict)
    }
}

/// `{γ : p(γ) ≥ c}`.
fn at_least(p: &Piece, c: &GroupElement) -> Interval {
    if p.slope == 0 {
        return if &p.intercept >= c {
            Interval::everything()
        } else {
            Interval::open(GroupElement::zero(), GroupElement::zero())
        };
    }
    let root = (c - &p.intercept).scale(&Rational::new(1.into(), p.slope.into()));
    if p.slope > 0 {
        Interval::ray_up(root, true)
    } else {
        Interval::ray_down(root, true)
    }
}

/// `{γ : p(γ) < c}`.
fn below(p: &Piece, c: &GroupElement) -> Interval {
    if p.slope == 0 {
        return if &p.intercept < c {
            Interval::everything()
        } else {
            Interval::open(GroupElement::zero(), GroupElement::zero())
        };
    }
    let root = (c - &p.intercept).scale(&Rational::new(1.into(), p.slope.into()));
    if p.slope > 0 {
        Interval::ray_down(root, false)
    } else {
        Interval::ray_up(root, false)
    }
}

impl fmt::Display for PiecewiseLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " | {} | ", self.breakpoints[i - 1])?;
            }
            write!(f, "{}g + {}", p.slope, p.intercept)?;
        }
        Ok(())
    }
}

/// Lower envelope of `γ ↦ v_i + iγ`.
///
/// Lines are swept by decreasing slope; a line is discarded as soon as the
/// next one meets its predecessor no later than it does.
pub fn envelope(lines: &[(usize, GroupElement)]) -> Result<PiecewiseLinear, TropicalError> {
    if lines.is_empty() {
        return Err(TropicalError::Empty);
    }
    let mut sorted: Vec<Piece> = lines
        .iter()
        .map(|(i, v)| Piece {
            slope: *i as i64,
            intercept: v.clone(),
        })
        .collect();
    sorted.sort_by(|a, b| b.slope.cmp(&a.slope).then_with(|| a.intercept.cmp(&b.intercept)));
    sorted.dedup_by(|later, earlier| later.slope == earlier.slope);
    let mut hull: Vec<Piece> = Vec::with_capacity(sorted.len());
    for line in sorted {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            if intersection(a, &line) <= intersection(a, b) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(line);
    }
    let breakpoints = hull.windows(2).map(|w| intersection(&w[0], &w[1])).collect();
    Ok(PiecewiseLinear {
        breakpoints,
        pieces: hull,
    })
}

pub fn minval_poly(f: &XPoly) -> Result<PiecewiseLinear, TropicalError> {
    envelope(&f.coefficient_values())
}

/// `minval_num − minval_den`.
pub fn minval_of(phi: &RationalFunction) -> Result<PiecewiseLinear, TropicalError> {
    if phi.is_zero() {
        return Err(TropicalError::ZeroFunction);
    }
    Ok(minval_poly(phi.num())?.sub(&minval_poly(phi.den())?))
}

/// Abscissas where two lines tie on either envelope. Off this set,
/// `v(φ(a)) = minval_φ(v(a))` for every `a`.
pub fn exceptional_abscissas(phi: &RationalFunction) -> Result<Vec<GroupElement>, TropicalError> {
    if phi.is_zero() {
        return Err(TropicalError::ZeroFunction);
    }
    let mut out: Vec<GroupElement> = minval_poly(phi.num())?
        .breakpoints
        .into_iter()
        .chain(minval_poly(phi.den())?.breakpoints)
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::FieldElement;
    use crate::scalar::CoeffField;

    fn g(n: i64, d: i64) -> GroupElement {
        GroupElement::frac(n, d)
    }

    fn tc(n: i64, d: i64) -> FieldElement {
        FieldElement::t_pow(CoeffField::Rationals, g(n, d))
    }

    fn xp(coeffs: Vec<FieldElement>) -> XPoly {
        XPoly::new(CoeffField::Rationals, coeffs)
    }

    fn zero() -> FieldElement {
        FieldElement::zero(CoeffField::Rationals)
    }

    fn one() -> FieldElement {
        FieldElement::one(CoeffField::Rationals)
    }

    #[test]
    fn two_line_envelope() {
        let e = envelope(&[(0, g(1, 1)), (2, g(0, 1))]).unwrap();
        assert_eq!(e.breakpoints(), &[g(1, 2)]);
        assert_eq!(e.pieces()[0].slope, 2);
        assert_eq!(e.pieces()[1].slope, 0);
        let single = envelope(&[(3, g(5, 2))]).unwrap();
        assert!(single.breakpoints().is_empty());
        let sw = envelope(&[(3, g(0, 1)), (0, g(3 * 2 + 1, 1))]).unwrap();
        assert_eq!(sw.breakpoints(), &[g(7, 3)]);
    }

    #[test]
    fn stone_weierstrass_minval() {
        // (x³ + t²)/(x³ + t)
        let num = xp(vec![tc(2, 1), zero(), zero(), one()]);
        let den = xp(vec![tc(1, 1), zero(), zero(), one()]);
        let phi = RationalFunction::new(num, den).unwrap();
        let m = minval_of(&phi).unwrap();
        assert_eq!(m.breakpoints(), &[g(1, 3), g(2, 3)]);
        assert_eq!(m.evaluate(&g(0, 1)), g(0, 1));
        assert_eq!(m.evaluate(&g(1, 2)), g(1, 2));
        assert_eq!(m.evaluate(&g(1, 1)), g(1, 1));
        let q = Group::Rationals;
        assert_eq!(
            m.infimum_over(&q),
            Extremum::Value {
                value: g(0, 1),
                attained: true
            }
        );
        assert_eq!(
            m.supremum_over(&q),
            Extremum::Value {
                value: g(1, 1),
                attained: true
            }
        );
        assert!(m.is_continuous());
    }

    #[test]
    fn trivial_minvals() {
        let c = RationalFunction::constant(tc(5, 2));
        let m = minval_of(&c).unwrap();
        assert_eq!(m, PiecewiseLinear::constant(g(5, 2)));
        assert_eq!(m.infimum_over(&Group::Rationals).value(), Some(&g(5, 2)));
        let f = xp(vec![tc(1, 1), one(), one()]);
        let ff = RationalFunction::new(f.clone(), f).unwrap();
        assert_eq!(
            minval_of(&ff).unwrap().dichotomy(&Group::Rationals),
            Dichotomy::IdenticallyZero
        );
        let line = envelope(&[(1, g(0, 1))]).unwrap();
        assert_eq!(line.infimum_over(&Group::Rationals), Extremum::Infinite);
    }

    #[test]
    fn dichotomy_cases() {
        let q = Group::Rationals;
        assert_eq!(
            PiecewiseLinear::constant(g(1, 1)).dichotomy(&q),
            Dichotomy::StrictlyPositive
        );
        let f = RationalFunction::polynomial(xp(vec![tc(1, 1), one()]));
        assert_eq!(minval_of(&f).unwrap().dichotomy(&q), Dichotomy::Mixed(g(-1, 1)));
    }

    #[test]
    fn exceptional_sets() {
        let f = RationalFunction::polynomial(xp(vec![tc(1, 1), zero(), one()]));
        assert_eq!(exceptional_abscissas(&f).unwrap(), vec![g(1, 2)]);
        assert!(exceptional_abscissas(&RationalFunction::constant(one()))
            .unwrap()
            .is_empty());
        // (x − 1)(x − t)
        let minus = |x: FieldElement| x.neg();
        let f = RationalFunction::polynomial(xp(vec![tc(1, 1), minus(one().add(&tc(1, 1))), one()]));
        assert_eq!(exceptional_abscissas(&f).unwrap(), vec![g(0, 1), g(1, 1)]);
    }

    #[test]
    fn translate_and_band() {
        let e = envelope(&[(0, g(1, 1)), (2, g(0, 1))]).unwrap();
        let t = e.translate(&g(1, 1));
        assert_eq!(t.evaluate(&g(3, 2)), g(1, 1));
        assert_eq!(t.evaluate(&g(1, 1)), g(0, 1));
        let band = e.preimage_band(&g(1, 2), Some(&g(1, 1)));
        assert!(band.contains(&g(1, 3)));
        assert!(!band.contains(&g(1, 1)));
    }
}
