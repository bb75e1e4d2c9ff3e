//! Gap monoids `M = {0} ∪ (I₁ ∪ … ∪ I_r) ∩ Γ` and their factorization data.
//!
//! The intervals are real intervals with endpoints in `ℚΓ`; the last one is
//! unbounded above. Everything that can be phrased as interval arithmetic
//! (closure, atoms, terminality) is decided exactly. Length sets come in two
//! flavours: the closed form for the one-gap monoid `{0} ∪ [1,∞)` and a grid
//! oracle that works for any gap monoid.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{rat, Group, GroupElement, Rational};
use crate::interval::{Cut, Interval, IntervalSet, Prefer, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("cannot parse monoid: {0}")]
    Parse(String),
    #[error("malformed monoid: {0}")]
    Malformed(String),
    /// `x + y` is missing, as `"x + y = s"`.
    #[error("not closed under addition: {0} is missing")]
    NotClosed(String),
    #[error("operation needs the one-gap monoid 0 u [1,inf) over a dense group")]
    NotOneGap,
    #[error("value {0} is below the least atom value")]
    ValueTooSmall(GroupElement),
    #[error("{0} is not on the grid (1/{1})Z")]
    GridMismatch(GroupElement, u64),
    #[error("{0} is not an element of the monoid")]
    NotInMonoid(GroupElement),
    #[error("enumeration needs {needed} steps, above the cap of {cap}")]
    CapExceeded { needed: u64, cap: u64 },
}

/// A gap monoid over a value group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidSpec {
    group: Group,
    intervals: Vec<Interval>,
}

impl MonoidSpec {
    /// Checks shape only: sorted, disjoint, positive, last interval unbounded.
    /// Closure under addition is a separate question, see [`check_monoid`].
    pub fn new(group: Group, intervals: Vec<Interval>) -> Result<Self, MonoidError> {
        if intervals.is_empty() {
            return Err(MonoidError::Malformed("no intervals".into()));
        }
        for iv in &intervals {
            if iv.is_empty() {
                return Err(MonoidError::Malformed(format!("empty interval {iv}")));
            }
            let Some(lo) = iv.lo() else {
                return Err(MonoidError::Malformed("interval unbounded below".into()));
            };
            if lo.is_negative() || (lo.is_zero() && iv.lo_closed()) {
                return Err(MonoidError::Malformed(format!("{iv} meets (-inf,0]")));
            }
            for x in [iv.lo(), iv.hi()].into_iter().flatten() {
                if !group.closure_contains(x) {
                    return Err(MonoidError::Malformed(format!("{x} is not in the closure of {group}")));
                }
            }
        }
        for w in intervals.windows(2) {
            if w[0].hi_cut() >= w[1].lo_cut() {
                return Err(MonoidError::Malformed(format!(
                    "{} and {} overlap or are unsorted",
                    w[0], w[1]
                )));
            }
        }
        if !intervals.last().unwrap().is_unbounded_above() {
            return Err(MonoidError::Malformed("last interval must be unbounded above".into()));
        }
        Ok(MonoidSpec { group, intervals })
    }

    /// Shape check plus closure under addition.
    pub fn checked(group: Group, intervals: Vec<Interval>) -> Result<Self, MonoidError> {
        let spec = Self::new(group, intervals)?;
        let report = check_monoid(&spec);
        match report.witness {
            Some((x, y)) => {
                let s = &x + &y;
                Err(MonoidError::NotClosed(format!("{x} + {y} = {s}")))
            }
            None => Ok(spec),
        }
    }

    /// `{0} ∪ [1, ∞)`.
    pub fn one_gap(group: Group) -> Self {
        Self::new(group, vec![Interval::ray_up(GroupElement::one(), true)]).unwrap()
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// The positive part as a real interval set.
    pub fn positive_set(&self) -> IntervalSet {
        IntervalSet::from_intervals(self.intervals.iter().cloned())
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.is_zero() || (self.group.contains(x) && self.intervals.iter().any(|i| i.contains(x)))
    }

    pub fn contains_positive(&self, x: &GroupElement) -> bool {
        !x.is_zero() && self.contains(x)
    }

    pub fn is_one_gap(&self) -> bool {
        self.intervals.len() == 1
            && self.intervals[0] == Interval::ray_up(GroupElement::one(), true)
            && self.group.has_no_minimal_positive()
    }

    /// Atom region intersected with `Γ` contains `x`.
    pub fn is_atom_value(&self, x: &GroupElement) -> bool {
        self.group.contains(x) && monoid_atoms(self).contains(x)
    }

    /// Left end of the unbounded interval.
    pub fn terminal_start(&self) -> (&GroupElement, bool) {
        let last = self.intervals.last().unwrap();
        (last.lo().unwrap(), last.lo_closed())
    }
}

impl fmt::Display for MonoidSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: 0", self.group)?;
        for iv in &self.intervals {
            write!(f, " u {iv}")?;
        }
        Ok(())
    }
}

fn parse_interval(s: &str) -> Result<Interval, MonoidError> {
    let bad = || MonoidError::Parse(format!("bad interval '{s}'"));
    let s = s.trim();
    let lo_closed = match s.chars().next() {
        Some('[') => true,
        Some('(') => false,
        _ => return Err(bad()),
    };
    let hi_closed = match s.chars().last() {
        Some(']') => true,
        Some(')') => false,
        _ => return Err(bad()),
    };
    let (a, b) = s[1..s.len() - 1].split_once(',').ok_or_else(bad)?;
    let lo: GroupElement = a.trim().parse().map_err(|_| bad())?;
    let hi_txt = b.trim();
    let lo_cut = Cut::At(lo, if lo_closed { Side::Below } else { Side::Above });
    let hi_cut = if matches!(hi_txt, "inf" | "+inf" | "∞") {
        if hi_closed {
            return Err(bad());
        }
        Cut::PosInf
    } else {
        let hi: GroupElement = hi_txt.parse().map_err(|_| bad())?;
        Cut::At(hi, if hi_closed { Side::Above } else { Side::Below })
    };
    Ok(Interval::from_cuts(lo_cut, hi_cut))
}

impl FromStr for MonoidSpec {
    type Err = MonoidError;

    /// `"Q: 0 u [1,inf)"`, `"Z[sqrt2]: 0 u [1,inf)"`, `"Q: 0 u [2,3] u [4,inf)"`.
    fn from_str(s: &str) -> Result<Self, MonoidError> {
        let (g, body) = s
            .split_once(':')
            .ok_or_else(|| MonoidError::Parse("expected '<group>: 0 u ...'".into()))?;
        let group: Group = g.trim().parse().map_err(|e| MonoidError::Parse(format!("{e}")))?;
        let mut parts = body.split(['u', '∪']).map(str::trim);
        if parts.next() != Some("0") {
            return Err(MonoidError::Parse("monoid must start with '0'".into()));
        }
        let intervals = parts.map(parse_interval).collect::<Result<Vec<_>, _>>()?;
        MonoidSpec::checked(group, intervals)
    }
}

impl Serialize for MonoidSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonoidSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub closed_under_addition: bool,
    pub witness: Option<(GroupElement, GroupElement)>,
}

/// Decides `M_{>0} + M_{>0} ⊆ M_{>0}` over `Γ`.
///
/// Each pairwise interval sum is compared against the union. A leftover
/// piece only matters if it holds a point of `Γ` that really is a sum of two
/// points of `Γ`, which is checked by intersecting `I_i` with `p − I_j`.
pub fn check_monoid(spec: &MonoidSpec) -> ClosureReport {
    let union = spec.positive_set();
    let ivs = spec.intervals();
    for i in 0..ivs.len() {
        for j in i..ivs.len() {
            let sum = IntervalSet::from_intervals([ivs[i].sum(&ivs[j])]);
            let missing = sum.difference(&union);
            for piece in missing.parts().iter().rev() {
                if let Some(w) = sum_witness(spec.group(), piece, &ivs[i], &ivs[j]) {
                    return ClosureReport {
                        closed_under_addition: false,
                        witness: Some(w),
                    };
                }
            }
        }
    }
    ClosureReport {
        closed_under_addition: true,
        witness: None,
    }
}

fn sum_witness(group: Group, piece: &Interval, a: &Interval, b: &Interval) -> Option<(GroupElement, GroupElement)> {
    let mut candidates = Vec::new();
    candidates.extend(piece.pick_point(&group, Prefer::High));
    candidates.extend(piece.pick_point(&group, Prefer::Low));
    if let Some(mut x) = group.small_positive_below(&GroupElement::one()) {
        // dense groups: walk inward from the low end of the piece
        if let Some(lo) = piece.lo() {
            for _ in 0..8 {
                let p = lo + &x;
                if group.contains(&p) && piece.contains(&p) {
                    candidates.push(p);
                }
                x = x.halve();
            }
        }
    }
    for p in candidates {
        let region = a.intersect(&b.reflect(&p));
        if let Some(x) = region.pick_point(&group, Prefer::High) {
            let y = &p - &x;
            if group.contains(&y) && b.contains(&y) {
                return Some((x, y));
            }
        }
    }
    None
}

/// Infimum of `M_{>0}` when positive, with a flag telling whether it is
/// attained.
pub fn is_bounded_away_from_zero(spec: &MonoidSpec) -> Option<(GroupElement, bool)> {
    let first = &spec.intervals()[0];
    let lo = first.lo().unwrap();
    if lo.is_zero() {
        None
    } else {
        Some((lo.clone(), first.lo_closed()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Terminality {
    pub holds: bool,
    /// A point of `Γ` above `γ` missing from `M`.
    pub witness: Option<GroupElement>,
    /// Every positive element has a multiple above `γ`. Always true here,
    /// since all supported groups sit inside `ℝ`.
    pub archimedean: bool,
}

pub fn is_integrally_terminal_for(spec: &MonoidSpec, gamma: &GroupElement) -> Terminality {
    let above = IntervalSet::from_intervals([Interval::ray_up(gamma.clone(), false)]);
    let gaps = above.difference(&spec.positive_set());
    let witness = gaps.pick_point(&spec.group(), Prefer::Low);
    Terminality {
        holds: witness.is_none(),
        witness,
        archimedean: true,
    }
}

/// Least left endpoint that works: the start of the unbounded interval.
pub fn find_integrally_terminal(spec: &MonoidSpec) -> Option<GroupElement> {
    let (lo, _) = spec.terminal_start();
    is_integrally_terminal_for(spec, lo).holds.then(|| lo.clone())
}

pub fn has_no_minimal_positive(group: &Group) -> bool {
    group.has_no_minimal_positive()
}

/// `M_{>0} \ (M_{>0} + M_{>0})` as real intervals; intersect with `Γ` for
/// the atom values.
pub fn monoid_atoms(spec: &MonoidSpec) -> IntervalSet {
    let pos = spec.positive_set();
    pos.difference(&pos.sum(&pos))
}

/// A set of lengths. `exceptional` lists the integers in `[min, max]` that
/// are missing, so it is empty exactly when `full` holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthSet {
    pub min: u64,
    pub max: u64,
    pub full: bool,
    pub exceptional: Vec<u64>,
}

impl LengthSet {
    pub fn interval(min: u64, max: u64) -> Self {
        assert!(min <= max);
        LengthSet {
            min,
            max,
            full: true,
            exceptional: Vec::new(),
        }
    }

    pub fn from_set(set: &BTreeSet<u64>) -> Option<Self> {
        let min = *set.first()?;
        let max = *set.last()?;
        let exceptional: Vec<u64> = (min..=max).filter(|n| !set.contains(n)).collect();
        Some(LengthSet {
            min,
            max,
            full: exceptional.is_empty(),
            exceptional,
        })
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.min && n <= self.max && !self.exceptional.contains(&n)
    }

    pub fn to_set(&self) -> BTreeSet<u64> {
        (self.min..=self.max).filter(|&n| self.contains(n)).collect()
    }
}

impl fmt::Display for LengthSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.to_set().iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// Inverse of the `{a,b,c}` display form.
impl FromStr for LengthSet {
    type Err = MonoidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MonoidError::Parse(format!("length set {s:?}"));
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(bad)?;
        let set = inner
            .split(',')
            .map(|x| x.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<BTreeSet<u64>, _>>()?;
        LengthSet::from_set(&set).ok_or_else(bad)
    }
}

/// `⌊v/2⌋ + 1 .. ⌊v⌋` on the one-gap monoid.
pub fn length_set_closed_form(spec: &MonoidSpec, v: &GroupElement) -> Result<LengthSet, MonoidError> {
    if !spec.is_one_gap() {
        return Err(MonoidError::NotOneGap);
    }
    if v < &GroupElement::one() {
        return Err(MonoidError::ValueTooSmall(v.clone()));
    }
    let lo = v.halve().floor_i64() + 1;
    let hi = v.floor_i64();
    Ok(LengthSet::interval(lo as u64, hi as u64))
}

/// `⌈v / (2 − 1/n)⌉`, the quantity whose limit gives the lower endpoint.
pub fn lower_length_at(v: &GroupElement, n: i64) -> i64 {
    let r = rat(2 * n - 1, n);
    v.scale(&(Rational::from_integer(1.into()) / r)).ceil_i64()
}

fn on_grid(x: &GroupElement, q: u64) -> Option<i64> {
    let r = x.as_rational()?;
    let scaled = r * Rational::from_integer(BigInt::from(q));
    scaled.is_integer().then(|| scaled.to_integer().to_i64()).flatten()
}

/// Lengths of factorizations of `v` whose atoms all lie on `(1/q)ℤ`.
///
/// Dynamic programming over grid sums, so every multiset of grid atoms is
/// covered without being listed. `cap` bounds the work (sums times atom
/// candidates). This is the true length set only when `q` is fine enough;
/// see [`oracle_grid`].
pub fn length_set_bruteforce(spec: &MonoidSpec, v: &GroupElement, q: u64, cap: u64) -> Result<LengthSet, MonoidError> {
    assert!(q >= 1);
    let target = on_grid(v, q).ok_or_else(|| MonoidError::GridMismatch(v.clone(), q))?;
    for iv in spec.intervals() {
        for x in [iv.lo(), iv.hi()].into_iter().flatten() {
            if on_grid(x, q).is_none() {
                return Err(MonoidError::GridMismatch(x.clone(), q));
            }
        }
    }
    if !spec.contains_positive(v) {
        return Err(MonoidError::NotInMonoid(v.clone()));
    }
    let atoms = monoid_atoms(spec);
    let qr = Rational::from_integer(BigInt::from(q));
    let parts: Vec<usize> = (1..=target)
        .filter(|&k| {
            let x = GroupElement::rational(Rational::from_integer(k.into()) / &qr);
            spec.group().contains(&x) && atoms.contains(&x)
        })
        .map(|k| k as usize)
        .collect();
    let needed = (target as u64).saturating_mul(parts.len().max(1) as u64);
    if needed > cap {
        return Err(MonoidError::CapExceeded { needed, cap });
    }
    let n = target as usize;
    let mut reach: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); n + 1];
    reach[0].insert(0);
    for s in 1..=n {
        let mut here = BTreeSet::new();
        for &a in parts.iter().take_while(|&&a| a <= s) {
            for &l in &reach[s - a] {
                here.insert(l + 1);
            }
        }
        reach[s] = here;
    }
    LengthSet::from_set(&reach[n]).ok_or_else(|| MonoidError::NotInMonoid(v.clone()))
}

/// A grid fine enough for [`length_set_bruteforce`] to see every length of
/// `v` on the one-gap monoid: `q` times the largest possible length
/// `⌊v / γ₁⌋`. A length `ℓ` needs parts with denominator up to `qℓ`.
pub fn oracle_grid(spec: &MonoidSpec, v: &GroupElement, q: u64) -> u64 {
    let bound = is_bounded_away_from_zero(spec)
        .map(|(g, _)| g)
        .unwrap_or_else(GroupElement::one);
    let inv = bound.as_rational().map(|b| Rational::from_integer(1.into()) / b);
    let max_len = match inv {
        Some(r) => v.scale(&r).floor_i64().max(1) as u64,
        None => v.floor_i64().max(1) as u64,
    };
    q * max_len
}

/// `0 / 2 / 3` on the one-gap monoid.
pub fn catenary_closed_form(spec: &MonoidSpec, v: &GroupElement) -> Result<u64, MonoidError> {
    if !spec.is_one_gap() {
        return Err(MonoidError::NotOneGap);
    }
    let two = GroupElement::integer(2);
    let three = GroupElement::integer(3);
    if v < &GroupElement::one() {
        Err(MonoidError::ValueTooSmall(v.clone()))
    } else if v < &two {
        Ok(0)
    } else if v < &three {
        Ok(2)
    } else {
        Ok(3)
    }
}

/// `L_D(v)`: the largest length, by the same grid oracle.
pub fn max_length(spec: &MonoidSpec, v: &GroupElement, q: u64, cap: u64) -> Result<u64, MonoidError> {
    length_set_bruteforce(spec, v, q, cap).map(|l| l.max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64, d: i64) -> GroupElement {
        GroupElement::frac(n, d)
    }

    fn m(s: &str) -> MonoidSpec {
        s.parse().unwrap()
    }

    fn raw(s: &str) -> MonoidSpec {
        let (g, body) = s.split_once(':').unwrap();
        let ivs = body.split('u').skip(1).map(|p| parse_interval(p).unwrap()).collect();
        MonoidSpec::new(g.trim().parse().unwrap(), ivs).unwrap()
    }

    #[test]
    fn closure_examples() {
        assert!(check_monoid(&m("Q: 0 u [1,inf)")).closed_under_addition);
        assert!(check_monoid(&m("Q: 0 u [2,3] u [4,inf)")).closed_under_addition);
        let bad = check_monoid(&raw("Q: 0 u [1,3/2] u [4,inf)"));
        assert!(!bad.closed_under_addition);
        assert_eq!(bad.witness, Some((g(3, 2), g(3, 2))));
        assert!("Q: 0 u [1,3/2] u [4,inf)".parse::<MonoidSpec>().is_err());
    }

    #[test]
    fn bounded_away() {
        assert_eq!(is_bounded_away_from_zero(&m("Q: 0 u [1,inf)")), Some((g(1, 1), true)));
        assert_eq!(
            is_bounded_away_from_zero(&m("Q: 0 u [2,3] u [4,inf)")),
            Some((g(2, 1), true))
        );
        assert_eq!(is_bounded_away_from_zero(&m("Q: 0 u (0,inf)")), None);
    }

    #[test]
    fn terminality() {
        let one = m("Q: 0 u [1,inf)");
        assert!(is_integrally_terminal_for(&one, &g(1, 1)).holds);
        let t = is_integrally_terminal_for(&one, &g(1, 2));
        assert_eq!(t.witness, Some(g(3, 4)));
        let four = m("Q: 0 u [2,3] u [4,inf)");
        assert!(is_integrally_terminal_for(&four, &g(4, 1)).holds);
        assert_eq!(is_integrally_terminal_for(&four, &g(3, 1)).witness, Some(g(7, 2)));
        assert_eq!(find_integrally_terminal(&four), Some(g(4, 1)));
    }

    #[test]
    fn atoms() {
        let a = monoid_atoms(&m("Q: 0 u [1,inf)"));
        assert_eq!(a.parts(), &[Interval::closed_open(g(1, 1), g(2, 1))]);
        let a = monoid_atoms(&m("Q: 0 u [2,3] u [4,inf)"));
        assert_eq!(a.parts(), &[Interval::closed(g(2, 1), g(3, 1))]);
        let a = monoid_atoms(&m("Q: 0 u [5,inf)"));
        assert_eq!(a.parts(), &[Interval::closed_open(g(5, 1), g(10, 1))]);
    }

    #[test]
    fn closed_form_lengths() {
        let one = m("Q: 0 u [1,inf)");
        assert_eq!(length_set_closed_form(&one, &g(3, 1)).unwrap().to_set(), [2, 3].into());
        assert_eq!(length_set_closed_form(&one, &g(4, 1)).unwrap().to_set(), [3, 4].into());
        assert_eq!(length_set_closed_form(&one, &g(3, 2)).unwrap().to_set(), [1].into());
        assert!(length_set_closed_form(&one, &g(1, 2)).is_err());
        assert_eq!(lower_length_at(&g(3, 1), 1_000_000), 2);
    }

    #[test]
    fn brute_force_lengths() {
        let one = m("Q: 0 u [1,inf)");
        // the 1/2 grid cannot split 7/2 into two atoms
        assert_eq!(
            length_set_bruteforce(&one, &g(7, 2), 2, 1_000_000).unwrap().to_set(),
            [3].into()
        );
        let q = oracle_grid(&one, &g(7, 2), 2);
        assert_eq!(
            length_set_bruteforce(&one, &g(7, 2), q, 1_000_000).unwrap().to_set(),
            [2, 3].into()
        );
        assert_eq!(
            length_set_bruteforce(&one, &g(4, 1), 4, 1_000_000).unwrap().to_set(),
            [3, 4].into()
        );
        let four = m("Q: 0 u [2,3] u [4,inf)");
        assert_eq!(
            length_set_bruteforce(&four, &g(13, 1), 1, 1_000_000).unwrap().to_set(),
            [5, 6].into()
        );
        assert_eq!(
            length_set_bruteforce(&four, &g(5, 2), 2, 1_000_000).unwrap().to_set(),
            [1].into()
        );
        assert!(matches!(
            length_set_bruteforce(&one, &g(7, 3), 2, 100),
            Err(MonoidError::GridMismatch(..))
        ));
        assert!(matches!(
            length_set_bruteforce(&one, &g(12, 1), 64, 100),
            Err(MonoidError::CapExceeded { .. })
        ));
    }

    #[test]
    fn catenary() {
        let one = m("Q: 0 u [1,inf)");
        assert_eq!(catenary_closed_form(&one, &g(3, 2)).unwrap(), 0);
        assert_eq!(catenary_closed_form(&one, &g(5, 2)).unwrap(), 2);
        assert_eq!(catenary_closed_form(&one, &g(10, 1)).unwrap(), 3);
    }

    #[test]
    fn quadratic_monoid_parses() {
        let s = m("Z[sqrt2]: 0 u [1,inf)");
        assert!(s.is_one_gap());
        assert!(s.contains(&"1+sqrt2".parse().unwrap()));
        assert!(!s.contains(&g(3, 2)));
        assert_eq!(s.to_string().parse::<MonoidSpec>().unwrap(), s);
    }
}
