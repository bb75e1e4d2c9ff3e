//! Explicit integer-valued rational functions with exact value profiles.

use num_traits::ToPrimitive;

use super::element::{Descriptor, GadgetError, IntRElement};
use super::profile::{Override, ValueProfile};
use crate::algebra::field::FieldElement;
use crate::algebra::xpoly::{RationalFunction, XPoly};
use crate::group::{Group, GroupElement, Rational};
use crate::scalar::{CoeffField, Scalar};
use crate::tropical::minval_of;

fn pre(msg: impl Into<String>) -> GadgetError {
    GadgetError::Precondition(msg.into())
}

fn tp(field: CoeffField, e: GroupElement) -> FieldElement {
    FieldElement::t_pow(field, e)
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Monic polynomial over `k` with no root in `k`: `x²+x+1` over `𝔽₂`,
/// `x^p − x + 1` over `𝔽_p`, `x²+1` over `ℚ`.
pub fn unit_valued_poly(field: CoeffField) -> Vec<Scalar> {
    match field {
        CoeffField::Prime(2) => vec![field.one(), field.one(), field.one()],
        CoeffField::Prime(p) => {
            let mut c = vec![field.zero(); p as usize + 1];
            c[0] = field.one();
            c[1] = field.from_i64(-1);
            c[p as usize] = field.one();
            c
        }
        CoeffField::Rationals => vec![field.one(), field.zero(), field.one()],
    }
}

fn eval_scalar(coeffs: &[Scalar], x: &Scalar) -> Scalar {
    coeffs.iter().rev().fold(x.field().zero(), |acc, c| acc.mul(x).add(c))
}

/// Residue check: monic with unit constant term and no root in `k`
/// (all of `𝔽_p`, or the integer divisors of the constant term over `ℚ`).
pub fn is_unit_valued(coeffs: &[Scalar]) -> bool {
    let Some(lead) = coeffs.last() else { return false };
    if !lead.is_one() || coeffs.len() < 2 || coeffs[0].is_zero() {
        return false;
    }
    let field = lead.field();
    match field.elements() {
        Some(all) => all.iter().all(|x| !eval_scalar(coeffs, x).is_zero()),
        None => {
            let ints: Option<Vec<i64>> = coeffs
                .iter()
                .map(|c| match c {
                    Scalar::Q(q) if q.is_integer() => q.to_integer().to_i64(),
                    _ => None,
                })
                .collect();
            let Some(ints) = ints else { return false };
            let c0 = ints[0].abs();
            (1..=c0)
                .filter(|d| c0 % d == 0)
                .flat_map(|d| [d, -d])
                .all(|r| !eval_scalar(coeffs, &field.from_i64(r)).is_zero())
        }
    }
}

/// `Σ a_i x^i ↦ Σ a_i t^{−ih} x^i`, i.e. `φ(x / t^h)`.
fn scale_x(p: &XPoly, h: &GroupElement) -> XPoly {
    let coeffs = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c.shift(&-h.scale_int(i as i64)))
        .collect();
    XPoly::new(p.field(), coeffs)
}

fn format_f(coeffs: &[Scalar]) -> String {
    let field = coeffs[0].field();
    let f = XPoly::new(field, coeffs.iter().cloned().map(FieldElement::constant).collect());
    f.to_string()
}

/// Elements `a + b√d` (or integers) in the half-open window `(lo, hi]`,
/// scanning `|b| ≤ bmax`.
fn lattice_in(group: &Group, lo: &GroupElement, hi: &GroupElement, bmax: i64) -> Vec<(i64, GroupElement)> {
    let mut out = Vec::new();
    let (d, brange) = match group {
        Group::QuadraticIntegers(d) => (Some(*d), -bmax..=bmax),
        _ => (None, 0..=0),
    };
    for b in brange {
        let irr = match d {
            Some(d) => GroupElement::quadratic(0, b, d),
            None => GroupElement::zero(),
        };
        let top = (hi - &irr).floor();
        let bottom = (lo - &irr).floor();
        let mut a = top;
        // at most a few dozen integers fit in the windows we search
        let mut count = 0;
        while a > bottom && count < 64 {
            if let Some(ai) = a.to_i64() {
                let g = &GroupElement::integer(ai) + &irr;
                if &g > lo && &g <= hi && group.contains(&g) {
                    out.push((ai.abs().max(b.abs()), g));
                }
            }
            a -= 1;
            count += 1;
        }
    }
    out
}

/// `α″ ∈ Γ` with `max(α′ − ε, α) < α″ ≤ α′` and `(α″ − α)/p ∈ Γ`: least
/// height, then largest.
pub fn select_alpha_second(
    alpha: &GroupElement,
    alpha_prime: &GroupElement,
    eps: &GroupElement,
    p: u32,
    group: &Group,
) -> Option<GroupElement> {
    let lo = (alpha_prime - eps).max(alpha.clone());
    let k = ratio(1, p as i64);
    let glo = (&lo - alpha).scale(&k);
    let ghi = (alpha_prime - alpha).scale(&k);
    let cands = lattice_in(group, &glo, &ghi, 64);
    let h = cands.iter().map(|(h, _)| *h).min()?;
    cands
        .into_iter()
        .filter(|(x, _)| *x == h)
        .map(|(_, g)| alpha + &g.scale_int(p as i64))
        .max()
}

/// `φ_{α,α′,ε}`. Case 1 (`Γ` divisible): `b cⁿ f(x/c) / f(x)` with `f` unit
/// valued. Case 2 (`Γ` not divisible, no least positive element):
/// `b(x^p + cc′)/(x^p + c′)`.
pub fn gadget_zigzag(
    alpha: &GroupElement,
    alpha_prime: &GroupElement,
    eps: &GroupElement,
    group: &Group,
    field: CoeffField,
) -> Result<IntRElement, GadgetError> {
    gadget_zigzag_shifted(alpha, alpha_prime, eps, &GroupElement::zero(), group, field)
}

/// `φ_{α,α′,ε}(x / r)` with `v(r) = shift`.
pub fn gadget_zigzag_shifted(
    alpha: &GroupElement,
    alpha_prime: &GroupElement,
    eps: &GroupElement,
    shift: &GroupElement,
    group: &Group,
    field: CoeffField,
) -> Result<IntRElement, GadgetError> {
    if alpha.is_negative() || alpha >= alpha_prime {
        return Err(pre(format!("need 0 ≤ α < α′, got α = {alpha}, α′ = {alpha_prime}")));
    }
    if !group.contains(alpha) || !group.contains(shift) {
        return Err(pre("α and the shift must lie in Γ"));
    }
    if !group.closure_contains(alpha_prime) {
        return Err(pre("α′ must lie in QΓ"));
    }
    let (func, descriptor) = if group.is_divisible() {
        let f = unit_valued_poly(field);
        if !is_unit_valued(&f) {
            return Err(pre("no unit-valued polynomial"));
        }
        let n = f.len() - 1;
        let w = (alpha_prime - alpha).scale(&ratio(1, n as i64));
        if !group.contains(alpha_prime) {
            return Err(pre("α′ must lie in Γ"));
        }
        let num = XPoly::new(
            field,
            f.iter()
                .enumerate()
                .map(|(i, fi)| tp(field, alpha + &w.scale_int((n - i) as i64)).scale(fi))
                .collect(),
        );
        let den = XPoly::new(field, f.iter().cloned().map(FieldElement::constant).collect());
        let d = Descriptor::Zigzag {
            case: 1,
            alpha: alpha.clone(),
            alpha_prime: alpha_prime.clone(),
            alpha_second: alpha_prime.clone(),
            eps: None,
            shift: shift.clone(),
            degree: n,
            mu: None,
            f: Some(format_f(&f)),
        };
        (RationalFunction::new(num, den)?, d)
    } else {
        if !group.has_no_minimal_positive() {
            return Err(pre(format!(
                "{group} has a least positive element; the second construction needs a non-principal maximal ideal"
            )));
        }
        if !eps.is_positive() {
            return Err(pre("ε must be positive"));
        }
        let (p, mu) = group.non_divisibility_witness().ok_or_else(|| pre("Γ is divisible"))?;
        let a2 = select_alpha_second(alpha, alpha_prime, eps, p, group)
            .ok_or_else(|| pre("no admissible α″ found in the searched lattice window"))?;
        let k = ratio(1, p as i64);
        for tie in [mu.scale(&k), (&(&mu + &a2) - alpha).scale(&k)] {
            if group.contains(&tie) {
                return Err(pre(format!("breakpoint {tie} lies in Γ")));
            }
        }
        let pu = p as usize;
        let mut num = vec![FieldElement::zero(field); pu + 1];
        num[0] = tp(field, &a2 + &mu);
        num[pu] = tp(field, alpha.clone());
        let mut den = vec![FieldElement::zero(field); pu + 1];
        den[0] = tp(field, mu.clone());
        den[pu] = FieldElement::one(field);
        let d = Descriptor::Zigzag {
            case: 2,
            alpha: alpha.clone(),
            alpha_prime: alpha_prime.clone(),
            alpha_second: a2,
            eps: Some(eps.clone()),
            shift: shift.clone(),
            degree: pu,
            mu: Some(mu),
            f: None,
        };
        (
            RationalFunction::new(XPoly::new(field, num), XPoly::new(field, den))?,
            d,
        )
    };
    let func = RationalFunction::new(scale_x(func.num(), shift), scale_x(func.den(), shift))?;
    // exact: ties are absorbed by the unit-valued f (case 1) or lie outside Γ (case 2)
    let profile = ValueProfile::exact(minval_of(&func)?);
    Ok(IntRElement::new(func, *group, profile, descriptor))
}

fn sw_parts(b: &FieldElement, tau: &GroupElement, field: CoeffField) -> (XPoly, XPoly) {
    let b3 = b.pow(3);
    let x3 = XPoly::monomial(FieldElement::one(field), 3);
    let num = x3.add(&XPoly::constant(b3.shift(&tau.scale_int(2))));
    let den = x3.add(&XPoly::constant(b3.shift(tau)));
    (num, den)
}

fn sw_profile(
    func: &RationalFunction,
    beta: &GroupElement,
    tau: &GroupElement,
    group: &Group,
) -> Result<ValueProfile, GadgetError> {
    let generic = minval_of(func)?;
    let third = ratio(1, 3);
    let low = beta + &tau.scale(&third);
    let high = beta + &tau.scale(&ratio(2, 3));
    let mut overrides = Vec::new();
    if group.contains(&low) {
        // the denominator may cancel there
        overrides.push(Override {
            at: low,
            lower: None,
            upper: Some(GroupElement::zero()),
        });
    }
    if group.contains(&high) {
        overrides.push(Override {
            at: high,
            lower: Some(tau.clone()),
            upper: None,
        });
    }
    Ok(ValueProfile::with_overrides(generic, overrides))
}

/// `ψ(x) = (x³ + b³t²)/(x³ + b³t)` with `t = t^{τ}`: value `0` below
/// `v(b) + τ/3`, `τ` above `v(b) + 2τ/3`.
pub fn gadget_stone_weierstrass(
    b: &FieldElement,
    t_exp: &GroupElement,
    group: &Group,
) -> Result<IntRElement, GadgetError> {
    if !t_exp.is_positive() {
        return Err(pre("v(t) must be positive"));
    }
    let field = b.field();
    let beta = b.valuation()?;
    let (num, den) = sw_parts(b, t_exp, field);
    let func = RationalFunction::new(num, den)?;
    let profile = sw_profile(&func, &beta, t_exp, group)?;
    let d = Descriptor::StoneWeierstrass {
        b_value: beta,
        t_exp: t_exp.clone(),
    };
    Ok(IntRElement::new(func, *group, profile, d))
}

/// `ψ_s(x) = ((x−s)³ + c³t²)/((x−s)³ + c³t)`, profiled in `v(a − s)`.
/// Every other point of `points` must land where the profile is exactly `0`.
pub fn gadget_psi_s(
    s: &FieldElement,
    c: &FieldElement,
    t_exp: &GroupElement,
    group: &Group,
    points: &[FieldElement],
) -> Result<IntRElement, GadgetError> {
    if !t_exp.is_positive() {
        return Err(pre("v(t) must be positive"));
    }
    let field = s.field();
    let beta = c.valuation()?;
    let (num, den) = sw_parts(c, t_exp, field);
    let one = FieldElement::one(field);
    let minus_s = s.neg();
    let base = RationalFunction::new(num, den)?;
    let profile = sw_profile(&base, &beta, t_exp, group)?;
    for b in points {
        let diff = b.sub(s);
        if diff.is_zero() {
            continue;
        }
        let g = diff.valuation()?;
        if profile.value_at(&g) != super::profile::ProfileValue::Exact(GroupElement::zero()) {
            return Err(pre(format!("point {b} is too close to {s} for this c_s")));
        }
    }
    let func = base.compose_linear(&one, &minus_s);
    let d = Descriptor::PsiS {
        s: s.to_string(),
        c_value: beta,
        t_exp: t_exp.clone(),
    };
    Ok(IntRElement::centered(func, s.clone(), *group, profile, d))
}

/// `u^m` with `m = 1 + max v(b − s)` over the other points (or `0`).
pub fn default_separation(s: &FieldElement, points: &[FieldElement]) -> Result<FieldElement, GadgetError> {
    let mut m = GroupElement::zero();
    for b in points {
        let d = b.sub(s);
        if !d.is_zero() {
            let v = &d.valuation()? + &GroupElement::one();
            m = m.max(v);
        }
    }
    let m = GroupElement::integer(m.ceil_i64().max(0));
    Ok(FieldElement::t_pow(s.field(), m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::profile::ProfileValue;

    fn g(n: i64, d: i64) -> GroupElement {
        GroupElement::frac(n, d)
    }

    #[test]
    fn unit_valued_defaults() {
        for f in [
            CoeffField::Prime(2),
            CoeffField::Prime(3),
            CoeffField::Prime(5),
            CoeffField::Rationals,
        ] {
            assert!(is_unit_valued(&unit_valued_poly(f)), "{f}");
        }
        let q = CoeffField::Rationals;
        // x² − 1 has roots ±1
        assert!(!is_unit_valued(&[q.from_i64(-1), q.zero(), q.one()]));
    }

    #[test]
    fn zigzag_case_one_f2() {
        let z = gadget_zigzag(&g(0, 1), &g(1, 1), &g(1, 1), &Group::Rationals, CoeffField::Prime(2)).unwrap();
        let p = &z.profile.generic;
        assert_eq!(p.evaluate(&g(-1, 1)), g(0, 1));
        assert_eq!(p.evaluate(&g(1, 4)), g(1, 2));
        assert_eq!(p.evaluate(&g(1, 1)), g(1, 1));
        assert_eq!(p.breakpoints(), &[g(0, 1), g(1, 2)]);
        let one = FieldElement::one(CoeffField::Prime(2));
        for k in -4..8 {
            z.check_profile_at(&g(k, 8), &one).unwrap();
        }
    }

    #[test]
    fn zigzag_case_two_sqrt2() {
        let grp = Group::QuadraticIntegers(2);
        let eps = &g(2, 1) - &GroupElement::sqrt(2);
        let z = gadget_zigzag(&g(0, 1), &g(1, 1), &eps, &grp, CoeffField::Rationals).unwrap();
        let a2 = GroupElement::quadratic(-2, 2, 2);
        match &z.descriptor {
            Descriptor::Zigzag { alpha_second, .. } => assert_eq!(alpha_second, &a2),
            _ => unreachable!(),
        }
        assert_eq!(z.profile.generic.evaluate(&g(-3, 1)), g(0, 1));
        assert_eq!(z.profile.generic.evaluate(&g(5, 1)), a2);
        let one = FieldElement::one(CoeffField::Rationals);
        for x in [g(0, 1), g(1, 1), GroupElement::quadratic(-1, 1, 2), g(-1, 1)] {
            z.check_profile_at(&x, &one).unwrap();
        }
    }

    #[test]
    fn zigzag_preconditions() {
        let e = gadget_zigzag(&g(1, 1), &g(1, 1), &g(1, 1), &Group::Rationals, CoeffField::Rationals);
        assert!(matches!(e, Err(GadgetError::Precondition(_))));
        let e = gadget_zigzag(&g(0, 1), &g(1, 1), &g(1, 2), &Group::Integers, CoeffField::Rationals);
        assert!(matches!(e, Err(GadgetError::Precondition(_))));
    }

    #[test]
    fn stone_weierstrass_profile() {
        let q = CoeffField::Rationals;
        let b = FieldElement::t_pow(q, g(2, 1));
        let sw = gadget_stone_weierstrass(&b, &g(1, 1), &Group::Rationals).unwrap();
        assert_eq!(sw.profile.generic.breakpoints(), &[g(7, 3), g(8, 3)]);
        assert!(!sw.profile.exact);
        let one = FieldElement::one(q);
        assert_eq!(sw.value_at(&one).unwrap(), Some(g(0, 1)));
        assert_eq!(sw.value_at(&FieldElement::zero(q)).unwrap(), Some(g(1, 1)));
        assert_eq!(
            sw.profile.value_at(&g(7, 3)),
            ProfileValue::Range {
                lower: None,
                upper: Some(g(0, 1))
            }
        );
        let on_z = gadget_stone_weierstrass(&b, &g(1, 1), &Group::Integers).unwrap();
        assert!(on_z.profile.exact);
    }

    #[test]
    fn psi_s_values() {
        let q = CoeffField::Rationals;
        let pts = [FieldElement::zero(q), FieldElement::one(q)];
        let c = default_separation(&pts[0], &pts).unwrap();
        let psi = gadget_psi_s(&pts[0], &c, &g(1, 1), &Group::Integers, &pts).unwrap();
        assert_eq!(psi.value_at(&pts[0]).unwrap(), Some(g(1, 1)));
        assert_eq!(psi.value_at(&pts[1]).unwrap(), Some(g(0, 1)));
        let close = gadget_psi_s(
            &pts[0],
            &FieldElement::one(q).shift(&g(-1, 1)),
            &g(1, 1),
            &Group::Integers,
            &pts,
        );
        assert!(close.is_err());
    }
}
