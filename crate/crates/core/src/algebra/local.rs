//! The local ring `D = k[t;M]_(t;M)` inside `K`.
//!
//! Membership is certified constructively: an element is in `D` once it is
//! written as `num / den` with every exponent in `M` and `den(0) ≠ 0`.
//! [`normalize_to_D`] produces such a representation for every element of
//! large enough value, using the odd-power identity
//! `(xⁿ + b₀ⁿ) = (x + b₀)·f(x)`.

use serde::Serialize;
use thiserror::Error;

use super::field::{FieldElement, FieldError};
use super::poly::Poly;
use crate::group::{GroupElement, Rational};
use crate::interval::{Interval, IntervalSet, Prefer};
use crate::monoid::{find_integrally_terminal, length_set_closed_form, monoid_atoms, MonoidError, MonoidSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error("monoid is not integrally terminal")]
    NotTerminal,
    #[error("element is not certified to lie in D")]
    Uncertified,
    #[error("length {0} is not in the length set {1}")]
    BadLength(u64, String),
    #[error("factorizations are of different elements")]
    DifferentElements,
    #[error("no atom value available for the requested split")]
    NoSplit,
}

/// An element with a certificate of membership in `D`: `num / den` with all
/// exponents in `M` and a nonzero constant term in `den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DElement {
    pub value: GroupElement,
    pub num: Poly,
    pub den: Poly,
}

impl DElement {
    pub fn to_field(&self) -> FieldElement {
        FieldElement::new(self.num.clone(), self.den.clone()).expect("certified denominator")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    InD(DElement),
    NotCertified,
}

impl Membership {
    pub fn certificate(&self) -> Option<&DElement> {
        match self {
            Membership::InD(d) => Some(d),
            Membership::NotCertified => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Membership::InD(_))
    }
}

fn all_in(spec: &MonoidSpec, p: &Poly) -> bool {
    p.exponents().all(|e| spec.contains(e))
}

fn certificate_if_valid(spec: &MonoidSpec, value: GroupElement, num: Poly, den: Poly) -> Membership {
    if all_in(spec, &num) && all_in(spec, &den) && !den.constant_term().is_zero() {
        Membership::InD(DElement { value, num, den })
    } else {
        Membership::NotCertified
    }
}

/// Certify `c ∈ D`.
///
/// Succeeds when `c` is already written over `k[t;M]` with a unit
/// denominator, or when `v(c) > δ` (or `v(c) = δ ∈ M`) for the terminal
/// bound `δ`, in which case the denominator is cleared by
/// `f(den − b₀)`, `f(x) = Σ (−b₀)^i x^{n−1−i}`, `n` odd with `nε > δ`.
#[allow(non_snake_case)]
pub fn normalize_to_D(c: &FieldElement, spec: &MonoidSpec) -> Result<Membership, LocalError> {
    let field = c.field();
    if c.is_zero() {
        return Ok(Membership::InD(DElement {
            value: GroupElement::zero(),
            num: Poly::zero(field),
            den: Poly::one(field),
        }));
    }
    let value = c.valuation()?;
    let quick = certificate_if_valid(spec, value.clone(), c.num().clone(), c.den().clone());
    if quick.is_certified() {
        return Ok(quick);
    }
    let delta = find_integrally_terminal(spec).ok_or(LocalError::NotTerminal)?;
    let large = value > delta || (value == delta && spec.contains(&delta));
    if !large {
        return Ok(Membership::NotCertified);
    }
    // canonical form: den has lowest exponent 0 and lowest coefficient 1
    let den = c.den();
    let b0 = den.constant_term();
    let h = den.sub(&Poly::constant(b0.clone()));
    let Some(eps) = h.min_exp().cloned() else {
        return Ok(certificate_if_valid(spec, value, c.num().clone(), Poly::one(field)));
    };
    let n = odd_multiplier(&eps, &delta);
    let minus_b0 = b0.neg();
    let mut f_h = Poly::zero(field);
    let mut h_pow = Poly::one(field);
    // f(h) = Σ_{i<n} (−b₀)^i h^{n−1−i}, built from the top power of b₀ down
    for i in (0..n).rev() {
        f_h = f_h.add(&h_pow.scale(&minus_b0.pow(i)));
        if i > 0 {
            h_pow = h_pow.mul(&h);
        }
    }
    let new_den = h_pow.mul(&h).add(&Poly::constant(b0.pow(n)));
    let new_num = f_h.mul(c.num());
    Ok(certificate_if_valid(spec, value, new_num, new_den))
}

/// Least odd `n` with `n·ε > δ`.
fn odd_multiplier(eps: &GroupElement, delta: &GroupElement) -> u32 {
    let mut n = 1u32;
    while &eps.scale_int(n as i64) <= delta {
        n += 2;
    }
    n
}

pub fn is_unit_of_d(x: &DElement) -> bool {
    x.value.is_zero()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomVerdict {
    Yes,
    /// Not an atom. Units carry no split.
    No(Option<(FieldElement, FieldElement)>),
    Unknown,
}

/// Atom test by the value of `x`: atoms of `D` are exactly the elements whose
/// value lies in the atom region of `M`.
pub fn is_atom_of_d(x: &FieldElement, spec: &MonoidSpec) -> Result<AtomVerdict, LocalError> {
    let cert = normalize_to_D(x, spec)?;
    let d = cert.certificate().ok_or(LocalError::Uncertified)?;
    if is_unit_of_d(d) {
        return Ok(AtomVerdict::No(None));
    }
    if spec.is_atom_value(&d.value) {
        return Ok(AtomVerdict::Yes);
    }
    let Some(s) = split_point(spec, &d.value) else {
        return Ok(AtomVerdict::Unknown);
    };
    let field = x.field();
    let left = FieldElement::t_pow(field, s.clone());
    let right = x.shift(&-&s);
    let ok = normalize_to_D(&left, spec)?.is_certified() && normalize_to_D(&right, spec)?.is_certified();
    Ok(if ok {
        AtomVerdict::No(Some((left, right)))
    } else {
        AtomVerdict::Unknown
    })
}

/// Least `s ∈ M_{>0} ∩ Γ` with `v − s ∈ M_{>0}`.
pub fn split_point(spec: &MonoidSpec, v: &GroupElement) -> Option<GroupElement> {
    let pos = spec.positive_set();
    let region = pos.intersect(&pos.reflect(v));
    region
        .pick_point(&spec.group(), Prefer::Low)
        .filter(|s| spec.contains_positive(s) && spec.contains_positive(&(v - s)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DFactor {
    pub element: FieldElement,
    pub value: GroupElement,
    pub atom: bool,
}

impl DFactor {
    fn certify(element: FieldElement, spec: &MonoidSpec) -> Result<Self, LocalError> {
        let value = element.valuation()?;
        let atom = is_atom_of_d(&element, spec)? == AtomVerdict::Yes;
        Ok(DFactor { element, value, atom })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DFactorization {
    pub factors: Vec<DFactor>,
    pub value: GroupElement,
}

impl DFactorization {
    pub fn from_elements(elems: Vec<FieldElement>, spec: &MonoidSpec) -> Result<Self, LocalError> {
        let factors = elems
            .into_iter()
            .map(|e| DFactor::certify(e, spec))
            .collect::<Result<Vec<_>, _>>()?;
        let value = factors.iter().fold(GroupElement::zero(), |acc, f| &acc + &f.value);
        Ok(DFactorization { factors, value })
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn product(&self) -> FieldElement {
        let field = self.factors[0].element.field();
        self.factors
            .iter()
            .fold(FieldElement::one(field), |acc, f| acc.mul(&f.element))
    }

    pub fn all_atoms(&self) -> bool {
        self.factors.iter().all(|f| f.atom)
    }
}

/// An atom value `a ∈ Γ` for the first `ℓ − 1` factors of a length-`ℓ`
/// factorization of value `v` on the one-gap monoid. `v/ℓ` when it lies in
/// `Γ`, otherwise a lattice point leaving a cofactor value in `[1, 2)`.
fn part_value(spec: &MonoidSpec, v: &GroupElement, l: u64) -> Option<GroupElement> {
    let even = v.scale(&Rational::new(1.into(), (l as i64).into()));
    if spec.group().contains(&even) {
        return Some(even);
    }
    let k = Rational::new(1.into(), ((l - 1) as i64).into());
    let two = GroupElement::integer(2);
    let one = GroupElement::one();
    let window = Interval::from_cuts(
        crate::interval::Cut::At((v - &two).scale(&k), crate::interval::Side::Above),
        crate::interval::Cut::At((v - &one).scale(&k), crate::interval::Side::Above),
    )
    .intersect(&Interval::closed_open(one, two));
    window.pick_point(&spec.group(), Prefer::High)
}

/// `ℓ − 1` copies of `t^{v/ℓ}` and the cofactor. One-gap monoid only.
pub fn factor_in_d(x: &FieldElement, spec: &MonoidSpec, l: u64) -> Result<DFactorization, LocalError> {
    let cert = normalize_to_D(x, spec)?;
    let d = cert.certificate().ok_or(LocalError::Uncertified)?;
    let lengths = length_set_closed_form(spec, &d.value)?;
    if !lengths.contains(l) {
        return Err(LocalError::BadLength(l, lengths.to_string()));
    }
    let field = x.field();
    if l == 1 {
        return DFactorization::from_elements(vec![x.clone()], spec);
    }
    let a = part_value(spec, &d.value, l).ok_or(LocalError::NoSplit)?;
    let mut elems = vec![FieldElement::t_pow(field, a.clone()); (l - 1) as usize];
    elems.push(x.shift(&-a.scale_int(l as i64 - 1)));
    DFactorization::from_elements(elems, spec)
}

/// Why two elements are not associates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NonAssociation {
    /// `v(x/y) ≠ 0`.
    Valuation(GroupElement),
    /// `v(x/y − c) ∉ M` for the constant term `c`.
    Gap(GroupElement),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Association {
    Yes,
    No(NonAssociation),
    Unknown,
}

/// Certified association test in `D`.
pub fn associated(x: &FieldElement, y: &FieldElement, spec: &MonoidSpec) -> Result<Association, LocalError> {
    let q = x.div(y)?;
    let v = q.valuation()?;
    if !v.is_zero() {
        return Ok(Association::No(NonAssociation::Valuation(v)));
    }
    let c = q.leading_coeff().expect("nonzero");
    let r = q.sub(&FieldElement::constant(c));
    if r.is_zero() {
        return Ok(Association::Yes);
    }
    let w = r.valuation()?;
    if !spec.contains(&w) {
        return Ok(Association::No(NonAssociation::Gap(w)));
    }
    if normalize_to_D(&q, spec)?.is_certified() || normalize_to_D(&r, spec)?.is_certified() {
        return Ok(Association::Yes);
    }
    Ok(Association::Unknown)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Distance {
    pub value: u64,
    /// False when some association test came back unknown; `value` is then
    /// an upper bound.
    pub exact: bool,
}

/// `max(|z − gcd|, |z′ − gcd|)` with factors grouped by association.
pub fn distance(z1: &DFactorization, z2: &DFactorization, spec: &MonoidSpec) -> Result<Distance, LocalError> {
    let mut used = vec![false; z2.len()];
    let mut common = 0usize;
    let mut exact = true;
    for a in &z1.factors {
        for (j, b) in z2.factors.iter().enumerate() {
            if used[j] || a.value != b.value {
                continue;
            }
            match associated(&a.element, &b.element, spec)? {
                Association::Yes => {
                    used[j] = true;
                    common += 1;
                    break;
                }
                Association::Unknown => exact = false,
                Association::No(_) => {}
            }
        }
    }
    let value = (z1.len() - common).max(z2.len() - common) as u64;
    Ok(Distance { value, exact })
}

/// `(t, …, t, x / t^{⌊v⌋−1})` with `⌊v⌋ − 1` copies of `t`.
pub fn canonical_factorization(x: &FieldElement, spec: &MonoidSpec) -> Result<DFactorization, LocalError> {
    let v = x.valuation()?;
    let k = (v.floor_i64() - 1).max(0);
    let field = x.field();
    let t = FieldElement::t_pow(field, GroupElement::one());
    let mut elems = vec![t; k as usize];
    elems.push(x.shift(&GroupElement::integer(-k)));
    DFactorization::from_elements(elems, spec)
}

/// Chains from two factorizations of the same element to the canonical one.
#[derive(Clone, Debug)]
pub struct ThreeChain {
    pub from_first: Vec<DFactorization>,
    pub from_second: Vec<DFactorization>,
}

impl ThreeChain {
    /// `z1 → canonical → z2`.
    pub fn joined(&self) -> Vec<DFactorization> {
        let mut out = self.from_first.clone();
        out.extend(self.from_second.iter().rev().skip(1).cloned());
        out
    }
}

fn is_t_like(f: &DFactor, spec: &MonoidSpec) -> Result<bool, LocalError> {
    if f.value != GroupElement::one() {
        return Ok(false);
    }
    let t = FieldElement::t_pow(f.element.field(), GroupElement::one());
    Ok(associated(&f.element, &t, spec)? == Association::Yes)
}

fn chain_to_canonical(
    x: &FieldElement,
    z: &DFactorization,
    spec: &MonoidSpec,
) -> Result<Vec<DFactorization>, LocalError> {
    let field = x.field();
    let t = FieldElement::t_pow(field, GroupElement::one());
    let mut chain = vec![z.clone()];
    let mut cur = z.clone();
    loop {
        let mut others = Vec::new();
        for (i, f) in cur.factors.iter().enumerate() {
            if !is_t_like(f, spec)? {
                others.push(i);
                if others.len() == 2 {
                    break;
                }
            }
        }
        if others.len() < 2 {
            break;
        }
        let (i, j) = (others[0], others[1]);
        let p = cur.factors[i].element.mul(&cur.factors[j].element);
        let vp = p.valuation()?;
        let mut elems: Vec<FieldElement> = cur
            .factors
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i && k != j)
            .map(|(_, f)| f.element.clone())
            .collect();
        if vp >= GroupElement::integer(3) {
            elems.extend([t.clone(), t.clone(), p.shift(&GroupElement::integer(-2))]);
        } else {
            elems.extend([t.clone(), p.shift(&GroupElement::integer(-1))]);
        }
        cur = DFactorization::from_elements(elems, spec)?;
        chain.push(cur.clone());
    }
    let canon = canonical_factorization(x, spec)?;
    if chain.last() != Some(&canon) {
        chain.push(canon);
    }
    Ok(chain)
}

/// The replacement procedure: while two factors are not associate to `t`,
/// swap their product for `t·(p/t)` or `t·t·(p/t²)`.
pub fn three_chain(
    x: &FieldElement,
    z1: &DFactorization,
    z2: &DFactorization,
    spec: &MonoidSpec,
) -> Result<ThreeChain, LocalError> {
    for z in [z1, z2] {
        if &z.product() != x {
            return Err(LocalError::DifferentElements);
        }
    }
    Ok(ThreeChain {
        from_first: chain_to_canonical(x, z1, spec)?,
        from_second: chain_to_canonical(x, z2, spec)?,
    })
}

/// Atom region of `M` for display and table output.
pub fn atom_region(spec: &MonoidSpec) -> IntervalSet {
    monoid_atoms(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::CoeffField;

    fn q() -> CoeffField {
        CoeffField::Rationals
    }

    fn t(n: i64, d: i64) -> Poly {
        Poly::t_pow(q(), GroupElement::frac(n, d))
    }

    fn fe(p: Poly) -> FieldElement {
        FieldElement::from_poly(p)
    }

    fn one_gap() -> MonoidSpec {
        "Q: 0 u [1,inf)".parse().unwrap()
    }

    fn four() -> MonoidSpec {
        "Q: 0 u [2,3] u [4,inf)".parse().unwrap()
    }

    #[test]
    fn biggest_filter_example() {
        let num = t(3, 1).add(&t(7, 1)).add(&t(13, 1));
        let den = Poly::one(q()).add(&t(1, 2));
        let c = FieldElement::new(num.clone(), den).unwrap();
        let m = normalize_to_D(&c, &one_gap()).unwrap();
        let d = m.certificate().unwrap();
        assert_eq!(d.den, Poly::one(q()).add(&t(3, 2)));
        let f = Poly::one(q()).sub(&t(1, 2)).add(&t(1, 1));
        assert_eq!(d.num, f.mul(&num));
        assert_eq!(d.to_field(), c);
        assert_eq!(d.value, GroupElement::integer(3));
    }

    #[test]
    fn normalize_trivial_cases() {
        let c = fe(t(3, 2).add(&t(2, 1)));
        let m = normalize_to_D(&c, &one_gap()).unwrap();
        assert_eq!(m.certificate().unwrap().den, Poly::one(q()));
        let half = fe(t(1, 2));
        assert_eq!(normalize_to_D(&half, &one_gap()).unwrap(), Membership::NotCertified);
    }

    #[test]
    fn atom_examples() {
        let s = one_gap();
        assert_eq!(is_atom_of_d(&fe(t(3, 2)), &s).unwrap(), AtomVerdict::Yes);
        let AtomVerdict::No(Some((a, b))) = is_atom_of_d(&fe(t(2, 1)), &s).unwrap() else {
            panic!()
        };
        assert_eq!((a, b), (fe(t(1, 1)), fe(t(1, 1))));
        let x = fe(t(13, 1).add(&t(14, 1)));
        let AtomVerdict::No(Some((a, b))) = is_atom_of_d(&x, &four()).unwrap() else {
            panic!()
        };
        assert_eq!(a.valuation().unwrap(), GroupElement::integer(2));
        assert_eq!(b.valuation().unwrap(), GroupElement::integer(11));
    }

    #[test]
    fn factor_examples() {
        let s = one_gap();
        let z = factor_in_d(&fe(t(3, 1)), &s, 2).unwrap();
        assert_eq!(z.factors[0].element, fe(t(3, 2)));
        assert_eq!(z.factors[1].element, fe(t(3, 2)));
        let x = fe(t(6, 1).add(&t(7, 1)));
        let z = factor_in_d(&x, &s, 4).unwrap();
        assert_eq!(z.len(), 4);
        assert!(z.all_atoms());
        assert_eq!(z.factors[3].value, GroupElement::frac(3, 2));
        assert_eq!(z.product(), x);
        assert!(matches!(
            factor_in_d(&fe(t(2, 1)), &s, 3),
            Err(LocalError::BadLength(..))
        ));
    }

    #[test]
    fn factor_on_quadratic_lattice() {
        let s: MonoidSpec = "Z[sqrt2]: 0 u [1,inf)".parse().unwrap();
        let x = FieldElement::t_pow(q(), GroupElement::integer(5));
        for l in 3..=5 {
            let z = factor_in_d(&x, &s, l).unwrap();
            assert_eq!(z.len() as u64, l);
            assert!(z.all_atoms());
            assert_eq!(z.product(), x);
        }
    }

    #[test]
    fn non_association_witness() {
        let s = one_gap();
        let a = fe(t(1, 1).add(&t(5, 4)));
        let b = fe(t(1, 1).add(&t(3, 2)));
        assert_eq!(
            associated(&a, &b, &s).unwrap(),
            Association::No(NonAssociation::Gap(GroupElement::frac(1, 4)))
        );
        let two_a = a.scale(&q().from_i64(2));
        assert_eq!(associated(&a, &two_a, &s).unwrap(), Association::Yes);
    }

    #[test]
    fn distances() {
        let s = one_gap();
        let x = fe(t(5, 2));
        let z1 = DFactorization::from_elements(vec![fe(t(1, 1)), fe(t(3, 2))], &s).unwrap();
        let z2 = DFactorization::from_elements(vec![fe(t(5, 4)), fe(t(5, 4))], &s).unwrap();
        assert_eq!(distance(&z1, &z1, &s).unwrap().value, 0);
        assert_eq!(distance(&z1, &z2, &s).unwrap(), Distance { value: 2, exact: true });
        let y = fe(t(4, 1));
        let canon = canonical_factorization(&y, &s).unwrap();
        assert_eq!(canon.len(), 4);
        let z3 = factor_in_d(&y, &s, 3).unwrap();
        assert_eq!(distance(&canon, &z3, &s).unwrap().value, 4);
        let chain = three_chain(&y, &z3, &canon, &s).unwrap();
        let joined = chain.joined();
        assert_eq!(joined.first(), Some(&z3));
        for w in joined.windows(2) {
            assert!(distance(&w[0], &w[1], &s).unwrap().value <= 3);
        }
        let _ = x;
    }
}
