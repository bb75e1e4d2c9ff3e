//! Factorization theory of `IntR(K, D)`: atoms, length sets, explicit
//! factorizations, chains and strict-divisor witnesses.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::construct::{gadget_stone_weierstrass, gadget_zigzag, gadget_zigzag_shifted};
use super::element::{flat_zone, Base, GadgetError, IntRElement, IntRMembership};
use super::hypotheses::check_atomic_hypotheses;
use super::profile::ProfileValue;
use crate::algebra::field::FieldElement;
use crate::algebra::local::{
    associated, canonical_factorization, is_atom_of_d, normalize_to_D, Association, AtomVerdict, Distance,
    NonAssociation,
};
use crate::algebra::xpoly::RationalFunction;
use crate::group::{rat, Group, GroupElement};
use crate::interval::{Interval, IntervalSet};
use crate::monoid::{
    catenary_closed_form, is_bounded_away_from_zero, is_integrally_terminal_for, length_set_bruteforce, oracle_grid,
    LengthSet, MonoidSpec,
};

fn pre(msg: impl Into<String>) -> GadgetError {
    GadgetError::Precondition(msg.into())
}

fn ge(n: i64) -> GroupElement {
    GroupElement::integer(n)
}

#[derive(Clone, Debug)]
pub enum IntRAtomVerdict {
    Atom { reason: String },
    NotAtom { split: Vec<IntRElement> },
    Unit,
    Unknown { reason: String },
}

impl IntRAtomVerdict {
    pub fn is_atom(&self) -> bool {
        matches!(self, IntRAtomVerdict::Atom { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            IntRAtomVerdict::Atom { .. } => "atom",
            IntRAtomVerdict::NotAtom { .. } => "not_atom",
            IntRAtomVerdict::Unit => "unit",
            IntRAtomVerdict::Unknown { .. } => "unknown",
        }
    }
}

fn require_certified(phi: &IntRElement) -> Result<(), GadgetError> {
    match &phi.membership {
        IntRMembership::NotCertified { reason } => Err(GadgetError::Uncertified(reason.clone())),
        IntRMembership::CertifiedInIntR { .. } => Ok(()),
    }
}

fn exact_alpha(phi: &IntRElement) -> Result<GroupElement, GadgetError> {
    if !phi.profile.exact {
        return Err(pre("profile is not exact"));
    }
    phi.alpha.value.clone().ok_or_else(|| pre("values are unbounded below"))
}

/// Replace a function that is constant in disguise (an unreduced quotient)
/// by the constant itself.
pub fn reduce(e: IntRElement) -> Result<IntRElement, GadgetError> {
    if e.is_constant() || !e.profile.is_constant() {
        return Ok(e);
    }
    let field = e.field();
    for x in [FieldElement::zero(field), FieldElement::one(field)] {
        let Ok(c) = e.func.eval(&x) else { continue };
        if c.is_zero() {
            continue;
        }
        if e.func == RationalFunction::constant(c.clone()) {
            let mut r = IntRElement::constant(c, e.group)?;
            r.membership = e.membership;
            return Ok(r);
        }
        break;
    }
    Ok(e)
}

fn certified(e: IntRElement, base: &Base) -> Result<IntRElement, GadgetError> {
    let e = reduce(e)?.certify(base)?;
    require_certified(&e)?;
    Ok(e)
}

/// Atom test in `IntR(K, D)`.
///
/// One-gap monoids: atom iff `1 ≤ α(φ) < 2`. Other gap monoids: constants
/// are atoms iff they are atoms of `D`; a non-constant `φ` is an atom when
/// some value `w` it attains cannot be split in `M`, or every split
/// `w = w₁ + w₂` has both parts below a gap (such factors would be constant).
pub fn atom_certify_intr(phi: &IntRElement, spec: &MonoidSpec) -> Result<IntRAtomVerdict, GadgetError> {
    require_certified(phi)?;
    if !phi.profile.exact {
        return Ok(IntRAtomVerdict::Unknown {
            reason: "profile is not exact".into(),
        });
    }
    if phi.profile.is_identically_zero() {
        return Ok(IntRAtomVerdict::Unit);
    }
    let Some(alpha) = phi.alpha.value.clone() else {
        return Ok(IntRAtomVerdict::Unknown {
            reason: "values unbounded below".into(),
        });
    };
    if spec.is_one_gap() {
        if alpha < GroupElement::one() {
            return Ok(IntRAtomVerdict::Unknown {
                reason: format!("α(φ) = {alpha} < 1"),
            });
        }
        if alpha < ge(2) {
            return Ok(IntRAtomVerdict::Atom {
                reason: format!("α(φ) = {alpha} lies in [1, 2)"),
            });
        }
        let split = if phi.is_constant() {
            factorization_intr(phi, 2, spec)?
        } else {
            let base = Base::Monoid(spec.clone());
            let t = IntRElement::t_pow(phi.field(), GroupElement::one(), phi.group);
            let rest = phi.div(&t)?;
            vec![certified(t, &base)?, certified(rest, &base)?]
        };
        return Ok(IntRAtomVerdict::NotAtom { split });
    }
    if let Some(c) = phi.func.as_constant() {
        return Ok(match is_atom_of_d(&c, spec)? {
            AtomVerdict::Yes => IntRAtomVerdict::Atom {
                reason: format!("value {alpha} is an atom of M, so the constant is an atom of D"),
            },
            AtomVerdict::No(None) => IntRAtomVerdict::Unit,
            AtomVerdict::No(Some((l, r))) => {
                let base = Base::Monoid(spec.clone());
                let l = certified(IntRElement::constant(l, phi.group)?, &base)?;
                let r = certified(IntRElement::constant(r, phi.group)?, &base)?;
                IntRAtomVerdict::NotAtom { split: vec![l, r] }
            }
            AtomVerdict::Unknown => IntRAtomVerdict::Unknown {
                reason: "no certified split in D".into(),
            },
        });
    }
    let report = check_atomic_hypotheses(spec, phi.field());
    if !report.all_pass() {
        return Ok(IntRAtomVerdict::Unknown {
            reason: "IntR(K, D) is not known to be local".into(),
        });
    }
    let pos = spec.positive_set();
    let zone = flat_zone(spec).map(|z| IntervalSet::from_intervals([z]));
    let mut values: Vec<GroupElement> = phi
        .profile
        .representatives(&phi.group)
        .iter()
        .map(|g| phi.profile.generic.evaluate(g))
        .collect();
    values.sort();
    values.dedup();
    for w in values.iter().filter(|w| w.is_positive()) {
        let splits = pos.intersect(&pos.reflect(w));
        if splits.is_empty() {
            return Ok(IntRAtomVerdict::Atom {
                reason: format!("attained value {w} is an atom of M"),
            });
        }
        if zone.as_ref().is_some_and(|z| splits.is_subset_of(z)) {
            return Ok(IntRAtomVerdict::Atom {
                reason: format!("every split of the attained value {w} lies below a gap of M"),
            });
        }
    }
    Ok(IntRAtomVerdict::Unknown {
        reason: "no attained value forces an atom".into(),
    })
}

/// `{2, …, ⌊α(φ)⌋}` when `α(φ) ≥ 2`, `{1}` when `1 ≤ α(φ) < 2`.
pub fn length_set_intr(phi: &IntRElement, spec: &MonoidSpec) -> Result<LengthSet, GadgetError> {
    if !spec.is_one_gap() {
        return Err(pre("closed form needs the one-gap monoid"));
    }
    require_certified(phi)?;
    let alpha = exact_alpha(phi)?;
    if alpha < GroupElement::one() {
        return Err(pre(format!("α(φ) = {alpha} < 1: φ is a unit")));
    }
    if alpha < ge(2) {
        return Ok(LengthSet::interval(1, 1));
    }
    Ok(LengthSet::interval(2, alpha.floor_i64() as u64))
}

fn check_product(factors: &[IntRElement], target: &RationalFunction) -> Result<(), GadgetError> {
    let p = IntRElement::product_of(factors)?;
    if &p.func != target {
        return Err(GadgetError::ProductMismatch);
    }
    Ok(())
}

/// Certify every factor and require each to be an atom.
fn finish(factors: Vec<IntRElement>, spec: &MonoidSpec) -> Result<Vec<IntRElement>, GadgetError> {
    let base = Base::Monoid(spec.clone());
    let mut out = Vec::with_capacity(factors.len());
    for f in factors {
        let f = certified(f, &base)?;
        match atom_certify_intr(&f, spec)? {
            IntRAtomVerdict::Atom { .. } => out.push(f),
            other => {
                return Err(GadgetError::Uncertified(format!(
                    "factor with α = {} is {}",
                    f.alpha
                        .value
                        .as_ref()
                        .map(|a| a.to_string())
                        .unwrap_or_else(|| "-inf".into()),
                    other.label()
                )))
            }
        }
    }
    Ok(out)
}

/// An explicit factorization of `φ` into `ℓ` atoms on the one-gap monoid.
///
/// `ℓ = ⌊α⌋` uses `t^{ℓ−1} · φ/t^{ℓ−1}`. Other lengths use `ℓ − 1` copies
/// of `φ_{1, α′, ε}` and the cofactor, with `ε = 1/(ℓ − 1)` and
/// `α′ = (v − 1)/(ℓ − 1)` for a constant of value `v`. For non-constant `φ`,
/// `α′ = (⌊α⌋ − 1)/(ℓ − 1)` and the zigzag is high where `φ` takes a value
/// below `⌊α⌋ + 1`, so the cofactor is an atom.
pub fn factorization_intr(phi: &IntRElement, l: u64, spec: &MonoidSpec) -> Result<Vec<IntRElement>, GadgetError> {
    let lengths = length_set_intr(phi, spec)?;
    if !lengths.contains(l) {
        return Err(GadgetError::BadLength(l, lengths.to_string()));
    }
    let alpha = exact_alpha(phi)?;
    let m = alpha.floor_i64() as u64;
    let group = phi.group;
    let field = phi.field();
    let factors = if l == 1 {
        vec![phi.clone()]
    } else if l == m {
        let t = IntRElement::t_pow(field, GroupElement::one(), group);
        let rest = phi.div(&t.pow((l - 1) as u32))?;
        let mut fs = vec![t; (l - 1) as usize];
        fs.push(rest);
        fs
    } else if !phi.is_constant() {
        let k = rat(1, l as i64 - 1);
        let ap = GroupElement::integer(m as i64 - 1).scale(&k);
        let eps = GroupElement::rational(k);
        let zz = zigzag_high_at(phi, m, &ap, &eps)?;
        let rho = phi.div(&zz.pow((l - 1) as u32))?;
        let mut fs = vec![zz; (l - 1) as usize];
        fs.push(rho);
        fs
    } else {
        let k = rat(1, l as i64 - 1);
        let ap = (&alpha - &GroupElement::one()).scale(&k);
        let eps = GroupElement::rational(k);
        let zz = gadget_zigzag(&GroupElement::one(), &ap, &eps, &group, field)?;
        let rho = phi.div(&zz.pow((l - 1) as u32))?;
        let mut fs = vec![zz; (l - 1) as usize];
        fs.push(rho);
        fs
    };
    check_product(&factors, &phi.func)?;
    finish(factors, spec)
}

/// `φ_{1, α′, ε}` recentered at the center of `φ` and shifted so that its
/// value is `α′` wherever `φ` takes a value in `[m, m + 1)`.
fn zigzag_high_at(
    phi: &IntRElement,
    m: u64,
    ap: &GroupElement,
    eps: &GroupElement,
) -> Result<IntRElement, GadgetError> {
    let group = phi.group;
    let field = phi.field();
    let (lo, hi) = (GroupElement::integer(m as i64), GroupElement::integer(m as i64 + 1));
    let mut cands = phi.profile.representatives(&group);
    cands.extend(phi.profile.sample_grid(&group, 4, 2));
    let gamma0 = cands
        .into_iter()
        .find(|g| matches!(phi.profile.value_at(g), ProfileValue::Exact(w) if w >= lo && w < hi))
        .ok_or_else(|| pre(format!("no abscissa with value in [{m}, {})", m + 1)))?;
    let one = GroupElement::one();
    let base = gadget_zigzag(&one, ap, eps, &group, field)?;
    let top = base
        .profile
        .generic
        .breakpoints()
        .last()
        .cloned()
        .unwrap_or_else(GroupElement::zero);
    let shift = GroupElement::integer((&gamma0 - &top).floor_i64());
    let zz = gadget_zigzag_shifted(&one, ap, eps, &shift, &group, field)?;
    if zz.profile.generic.evaluate(&gamma0) != *ap {
        return Err(pre(format!("shifted zigzag is not high at {gamma0}")));
    }
    if phi.center.is_zero() {
        return Ok(zz);
    }
    let func = zz.func.compose_linear(&FieldElement::one(field), &phi.center.neg());
    Ok(IntRElement::centered(
        func,
        phi.center.clone(),
        group,
        zz.profile,
        zz.descriptor,
    ))
}

/// `c_IntR` on the one-gap monoid: `0 / 2 / 3` by `α(φ)`.
pub fn catenary_intr_closed_form(phi: &IntRElement, spec: &MonoidSpec) -> Result<u64, GadgetError> {
    let alpha = exact_alpha(phi)?;
    Ok(catenary_closed_form(spec, &alpha)?)
}

fn is_t_like(f: &IntRElement, spec: &MonoidSpec) -> Result<bool, GadgetError> {
    let Some(c) = f.func.as_constant() else {
        return Ok(false);
    };
    if c.valuation()? != GroupElement::one() {
        return Ok(false);
    }
    let t = FieldElement::t_pow(c.field(), GroupElement::one());
    Ok(associated(&c, &t, spec)? == Association::Yes)
}

fn nonzero_value(e: &IntRElement) -> Option<GroupElement> {
    e.profile
        .representatives(&e.group)
        .iter()
        .map(|g| e.profile.generic.evaluate(g))
        .find(|w| !w.is_zero())
}

/// Association in `IntR(K, D)`. Constants reduce to `D`; otherwise a
/// quotient with an exact profile that is not identically zero takes a
/// nonzero value, so it is not a unit.
pub fn associated_intr(a: &IntRElement, b: &IntRElement, spec: &MonoidSpec) -> Result<Association, GadgetError> {
    if a.func == b.func {
        return Ok(Association::Yes);
    }
    if let (Some(x), Some(y)) = (a.func.as_constant(), b.func.as_constant()) {
        return Ok(associated(&x, &y, spec)?);
    }
    let q = match a.div(b) {
        Ok(q) => reduce(q)?,
        Err(GadgetError::CenterMismatch) => return Ok(Association::Unknown),
        Err(e) => return Err(e),
    };
    if let Some(c) = q.func.as_constant() {
        return Ok(associated(&c, &FieldElement::one(c.field()), spec)?);
    }
    if q.profile.exact {
        if let Some(w) = nonzero_value(&q) {
            return Ok(Association::No(NonAssociation::Valuation(w)));
        }
    }
    Ok(Association::Unknown)
}

/// Factorization distance with factors matched up to association.
pub fn distance_intr(z1: &[IntRElement], z2: &[IntRElement], spec: &MonoidSpec) -> Result<Distance, GadgetError> {
    let mut used = vec![false; z2.len()];
    let mut common = 0usize;
    let mut exact = true;
    for a in z1 {
        for (j, b) in z2.iter().enumerate() {
            if used[j] {
                continue;
            }
            match associated_intr(a, b, spec)? {
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

/// `(t, …, t, d/t^{⌊v⌋−1})`.
pub fn canonical_intr(d: &IntRElement, spec: &MonoidSpec) -> Result<Vec<IntRElement>, GadgetError> {
    let c = d
        .func
        .as_constant()
        .ok_or_else(|| pre("canonical factorization needs a constant"))?;
    let base = Base::Monoid(spec.clone());
    canonical_factorization(&c, spec)?
        .factors
        .into_iter()
        .map(|f| certified(IntRElement::constant(f.element, d.group)?, &base))
        .collect()
}

#[derive(Clone, Debug)]
pub struct IntRChain {
    pub steps: Vec<Vec<IntRElement>>,
    pub distances: Vec<Distance>,
}

impl IntRChain {
    pub fn max_step(&self) -> u64 {
        self.distances.iter().map(|d| d.value).max().unwrap_or(0)
    }

    pub fn exact(&self) -> bool {
        self.distances.iter().all(|d| d.exact)
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.steps.iter().map(Vec::len).collect()
    }
}

fn to_canonical(
    z: &[IntRElement],
    canon: &[IntRElement],
    spec: &MonoidSpec,
) -> Result<Vec<Vec<IntRElement>>, GadgetError> {
    let base = Base::Monoid(spec.clone());
    let field = canon[0].field();
    let group = canon[0].group;
    let t = certified(IntRElement::t_pow(field, GroupElement::one(), group), &base)?;
    let mut cur: Vec<IntRElement> = z.to_vec();
    let mut out = vec![cur.clone()];
    loop {
        let mut others = Vec::new();
        for (i, f) in cur.iter().enumerate() {
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
        let p = cur[i].mul(&cur[j])?;
        let ap = exact_alpha(&p)?;
        let mut next: Vec<IntRElement> = cur
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i && k != j)
            .map(|(_, f)| f.clone())
            .collect();
        if ap >= ge(4) {
            let rest = certified(p.div(&t)?, &base)?;
            next.push(t.clone());
            next.extend(factorization_intr(&rest, 2, spec)?);
        } else if ap >= ge(3) {
            let rest = p.div(&t.pow(2))?;
            next.extend([t.clone(), t.clone(), certified(rest, &base)?]);
        } else {
            let rest = p.div(&t)?;
            next.extend([t.clone(), certified(rest, &base)?]);
        }
        cur = next;
        out.push(cur.clone());
    }
    if distance_intr(&cur, canon, spec)?.value > 0 {
        out.push(canon.to_vec());
    }
    Ok(out)
}

/// A chain `z1 → canonical → z2`. Each step merges two factors not
/// associate to `t` into `t·(ψᵢψⱼ/t)`, `t·t·(ψᵢψⱼ/t²)` or `t·ρ₁·ρ₂` by
/// `α(ψᵢψⱼ)`, where `ρ₁ρ₂` is a length-2 factorization of `ψᵢψⱼ/t`.
/// Below `v = 3` the chain is the single step `z1 → z2`.
pub fn chain_intr(
    d: &IntRElement,
    z1: &[IntRElement],
    z2: &[IntRElement],
    spec: &MonoidSpec,
) -> Result<IntRChain, GadgetError> {
    if !spec.is_one_gap() {
        return Err(pre("chains are built on the one-gap monoid"));
    }
    for z in [z1, z2] {
        if z.is_empty() {
            return Err(pre("empty factorization"));
        }
        check_product(z, &d.func)?;
    }
    let v = exact_alpha(d)?;
    let steps = if v < ge(3) {
        if distance_intr(z1, z2, spec)?.value == 0 {
            vec![z1.to_vec()]
        } else {
            vec![z1.to_vec(), z2.to_vec()]
        }
    } else {
        let canon = canonical_intr(d, spec)?;
        let mut a = to_canonical(z1, &canon, spec)?;
        let b = to_canonical(z2, &canon, spec)?;
        a.extend(b.into_iter().rev().skip(1));
        a
    };
    let distances = steps
        .windows(2)
        .map(|w| distance_intr(&w[0], &w[1], spec))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntRChain { steps, distances })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendBounds {
    pub value: GroupElement,
    pub gamma1: GroupElement,
    pub n: u64,
    pub lengths_d: LengthSet,
    pub max_d: u64,
    pub lower: BTreeSet<u64>,
    pub upper: u64,
    /// Lengths realized by constructed factorizations.
    pub witnessed: Vec<u64>,
}

fn rational_denominator(x: &GroupElement) -> Option<u64> {
    x.as_rational().and_then(|r| r.denom().to_u64())
}

/// `𝓛_D(d) ∪ {2, …, N−2} ⊆ 𝓛_IntR(d) ⊆ {2, …, L_D(d)}` with
/// `N = min{n : nα > v(d)}`, and a witness factorization for each
/// `ℓ ∈ {2, …, N−2}`: `ℓ − 1` copies of `φ_{α, (v−α)/(ℓ−1), γ₁/(ℓ−1)}` and
/// the cofactor. Also returns the witnesses.
pub fn extend_length_bounds(
    d: &FieldElement,
    spec: &MonoidSpec,
    alpha: &GroupElement,
    beta: &GroupElement,
) -> Result<(ExtendBounds, Vec<Vec<IntRElement>>), GadgetError> {
    let group = spec.group();
    let field = d.field();
    let v = d.valuation()?;
    if v <= alpha.scale_int(3) {
        return Err(pre(format!("need v(d) > 3α, got v(d) = {v}, α = {alpha}")));
    }
    if !(beta.is_positive() && beta < alpha) || !group.contains(alpha) || !group.contains(beta) {
        return Err(pre("need 0 < β < α in Γ"));
    }
    let gap = IntervalSet::from_intervals([Interval::open(beta.clone(), alpha.clone())]);
    if !spec.positive_set().intersect(&gap).is_empty() {
        return Err(pre(format!("M meets ({beta}, {alpha})")));
    }
    if !spec.contains(alpha) || !is_integrally_terminal_for(spec, alpha).holds {
        return Err(pre(format!("M is not integrally terminal at {alpha}")));
    }
    if !group.has_no_minimal_positive() {
        return Err(pre(format!("{group} has a least positive element")));
    }
    if !normalize_to_D(d, spec)?.is_certified() {
        return Err(pre("d is not certified in D"));
    }
    let (gamma1, _) = is_bounded_away_from_zero(spec).ok_or_else(|| pre("M is not bounded away from 0"))?;
    let mut n = 1u64;
    while alpha.scale_int(n as i64) <= v {
        n += 1;
    }
    let mut q0 = rational_denominator(&v).ok_or_else(|| pre("grid oracle needs a rational v(d)"))?;
    for iv in spec.intervals() {
        for x in [iv.lo(), iv.hi()].into_iter().flatten() {
            q0 = q0.lcm(&rational_denominator(x).ok_or_else(|| pre("grid oracle needs rational endpoints"))?);
        }
    }
    let q = oracle_grid(spec, &v, q0);
    let lengths_d = length_set_bruteforce(spec, &v, q, 200_000_000)?;
    let max_d = lengths_d.max;
    let base = Base::Monoid(spec.clone());
    let mut witnesses = Vec::new();
    let dd = certified(IntRElement::constant(d.clone(), group)?, &base)?;
    for l in 2..=n.saturating_sub(2) {
        let k = rat(1, l as i64 - 1);
        let ap = (&v - alpha).scale(&k);
        let eps = gamma1.scale(&k);
        let zz = gadget_zigzag(alpha, &ap, &eps, &group, field)?;
        let rho = dd.div(&zz.pow((l - 1) as u32))?;
        let mut fs = vec![zz; (l - 1) as usize];
        fs.push(rho);
        check_product(&fs, &dd.func)?;
        witnesses.push(finish(fs, spec)?);
    }
    let mut lower = lengths_d.to_set();
    lower.extend(2..=n.saturating_sub(2));
    let witnessed = witnesses.iter().map(|w| w.len() as u64).collect();
    Ok((
        ExtendBounds {
            value: v,
            gamma1,
            n,
            lengths_d,
            max_d,
            lower,
            upper: max_d,
            witnessed,
        },
        witnesses,
    ))
}

#[derive(Clone, Debug)]
pub struct AntimatterWitness {
    pub branch: u8,
    pub psi: IntRElement,
    pub quotient: IntRElement,
}

fn is_nonunit(e: &IntRElement) -> bool {
    e.membership.is_certified() && e.profile.exact && nonzero_value(e).is_some()
}

/// A nonunit `ψ` with `φ/ψ` a nonunit of `IntR(K, V)`.
///
/// Branch 1 (`Γ` divisible) and 2 (`Γ` not divisible, no least positive
/// element) use `φ_{0, w/2, w/2}` shifted past the last breakpoint of `φ`,
/// where `w > 0` is the tail value of `φ`. Branch 3 (`Γ = ℤ`) uses the
/// cubic gadget with `v(b)` past the last breakpoint and `v(t) = 1`.
pub fn antimatter_witness(phi: &IntRElement, branch: u8) -> Result<AntimatterWitness, GadgetError> {
    let group = phi.group;
    let field = phi.field();
    let base = Base::Valuation(group);
    if !phi.profile.exact {
        return Err(pre("φ needs an exact profile"));
    }
    let phi = certified(phi.clone(), &base)?;
    if !is_nonunit(&phi) {
        return Err(pre("φ is a unit"));
    }
    if !phi.center.is_zero() && !phi.profile.is_constant() {
        return Err(pre("φ must be centered at 0"));
    }
    let start = phi
        .profile
        .generic
        .breakpoints()
        .last()
        .map(|b| b.ceil_i64() + 1)
        .unwrap_or(0);
    let tail = phi.profile.generic.evaluate(&ge(start));
    if !tail.is_positive() {
        return Err(pre("φ takes unit values near 0"));
    }
    let psi = match branch {
        1 | 2 => {
            if branch == 1 && !group.is_divisible() {
                return Err(pre(format!("branch 1 needs a divisible group, got {group}")));
            }
            if branch == 2 && (group.is_divisible() || !group.has_no_minimal_positive()) {
                return Err(pre(format!(
                    "branch 2 needs a non-divisible group without least positive element, got {group}"
                )));
            }
            let half = tail.halve();
            let zero = GroupElement::zero();
            let probe = gadget_zigzag(&zero, &half, &half, &group, field)?;
            let first = probe
                .profile
                .generic
                .breakpoints()
                .first()
                .cloned()
                .unwrap_or_else(GroupElement::zero);
            let h = ge((&ge(start) - &first).ceil_i64() + 1);
            gadget_zigzag_shifted(&zero, &half, &half, &h, &group, field)?
        }
        3 => {
            if group != Group::Integers {
                return Err(pre(format!("branch 3 needs Γ = Z, got {group}")));
            }
            let b = FieldElement::t_pow(field, ge(start));
            gadget_stone_weierstrass(&b, &GroupElement::one(), &group)?
        }
        _ => return Err(pre(format!("unknown branch {branch}"))),
    };
    let psi = certified(psi, &base)?;
    let quotient = certified(phi.div(&psi)?, &base)?;
    if !is_nonunit(&psi) || !is_nonunit(&quotient) {
        return Err(GadgetError::Uncertified("witness is a unit".into()));
    }
    Ok(AntimatterWitness { branch, psi, quotient })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::CoeffField;

    fn g(n: i64, d: i64) -> GroupElement {
        GroupElement::frac(n, d)
    }

    fn one_gap() -> MonoidSpec {
        "Q: 0 u [1,inf)".parse().unwrap()
    }

    fn tconst(e: GroupElement, spec: &MonoidSpec) -> IntRElement {
        IntRElement::t_pow(CoeffField::Prime(2), e, spec.group())
            .certify(&Base::Monoid(spec.clone()))
            .unwrap()
    }

    #[test]
    fn non_constant_lengths() {
        let s = one_gap();
        let f = CoeffField::Rationals;
        let zz = gadget_zigzag(&g(1, 1), &g(3, 1), &g(1, 2), &s.group(), f).unwrap();
        let phi = zz
            .mul(&IntRElement::t_pow(f, g(9, 2), s.group()))
            .unwrap()
            .certify(&Base::Monoid(s.clone()))
            .unwrap();
        assert_eq!(length_set_intr(&phi, &s).unwrap(), LengthSet::interval(2, 5));
        for l in 2..=5 {
            let z = factorization_intr(&phi, l, &s).unwrap();
            assert_eq!(z.len() as u64, l);
        }
        assert!(canonical_intr(&phi, &s).is_err());
    }

    #[test]
    fn atoms_by_alpha() {
        let s = one_gap();
        assert!(atom_certify_intr(&tconst(g(3, 2), &s), &s).unwrap().is_atom());
        match atom_certify_intr(&tconst(g(3, 1), &s), &s).unwrap() {
            IntRAtomVerdict::NotAtom { split } => assert_eq!(split.len(), 2),
            other => panic!("{other:?}"),
        }
        let zz = gadget_zigzag(&g(1, 1), &g(3, 2), &g(1, 2), &Group::Rationals, CoeffField::Prime(2))
            .unwrap()
            .certify(&Base::Monoid(s.clone()))
            .unwrap();
        assert!(atom_certify_intr(&zz, &s).unwrap().is_atom());
        let raw = IntRElement::t_pow(CoeffField::Prime(2), g(3, 1), Group::Rationals);
        assert!(atom_certify_intr(&raw, &s).is_err());
    }

    #[test]
    fn lengths_and_factorizations_of_t6() {
        let s = one_gap();
        let d = tconst(g(6, 1), &s);
        assert_eq!(length_set_intr(&d, &s).unwrap(), LengthSet::interval(2, 6));
        assert_eq!(
            length_set_intr(&tconst(g(5, 2), &s), &s).unwrap(),
            LengthSet::interval(2, 2)
        );
        for l in 2..=6 {
            let z = factorization_intr(&d, l, &s).unwrap();
            assert_eq!(z.len() as u64, l);
            for f in &z {
                let a = f.alpha.value.clone().unwrap();
                assert!(a >= g(1, 1) && a < g(2, 1), "{a}");
            }
        }
        assert!(matches!(
            factorization_intr(&d, 7, &s),
            Err(GadgetError::BadLength(7, _))
        ));
    }

    #[test]
    fn chain_from_length_two() {
        let s = one_gap();
        let d = tconst(g(4, 1), &s);
        let z2 = factorization_intr(&d, 2, &s).unwrap();
        let canon = canonical_intr(&d, &s).unwrap();
        let c = chain_intr(&d, &canon, &z2, &s).unwrap();
        assert!(c.max_step() <= 3);
        assert!(c.steps.len() <= 4);
        assert!(distance_intr(&canon, &z2, &s).unwrap().value >= 3);
        let same = chain_intr(&d, &canon, &canon, &s).unwrap();
        assert_eq!(same.steps.len(), 1);
    }

    #[test]
    fn section_four_bounds() {
        let s: MonoidSpec = "Q: 0 u [2,3] u [4,inf)".parse().unwrap();
        let d = FieldElement::t_pow(CoeffField::Rationals, g(13, 1));
        let (b, w) = extend_length_bounds(&d, &s, &g(4, 1), &g(3, 1)).unwrap();
        assert_eq!(b.n, 4);
        assert_eq!(b.lower, BTreeSet::from([2, 5, 6]));
        assert_eq!(b.upper, 6);
        assert_eq!(w.len(), 1);
        let d12 = FieldElement::t_pow(CoeffField::Rationals, g(12, 1));
        assert!(extend_length_bounds(&d12, &s, &g(4, 1), &g(3, 1)).is_err());
    }

    #[test]
    fn antimatter_branches() {
        let t = |grp: Group, field| IntRElement::t_pow(field, GroupElement::one(), grp);
        let w = antimatter_witness(&t(Group::Rationals, CoeffField::Prime(2)), 1).unwrap();
        assert!(w.quotient.alpha.value.clone().unwrap() >= GroupElement::zero());
        antimatter_witness(&t(Group::QuadraticIntegers(2), CoeffField::Rationals), 2).unwrap();
        antimatter_witness(&t(Group::Integers, CoeffField::Rationals), 3).unwrap();
        assert!(antimatter_witness(&t(Group::Integers, CoeffField::Rationals), 1).is_err());
    }
}
