//! Hypothesis report for atomicity of `IntR(K, D)`.

use serde::Serialize;

use crate::group::GroupElement;
use crate::interval::{Interval, IntervalSet};
use crate::monoid::{check_monoid, is_bounded_away_from_zero, MonoidSpec};
use crate::scalar::CoeffField;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomicReport {
    pub monoid: String,
    pub field: String,
    pub checks: Vec<HypothesisCheck>,
    pub gamma1: Option<GroupElement>,
    pub certificate: Option<String>,
}

impl AtomicReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&HypothesisCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> HypothesisCheck {
    HypothesisCheck { name, passed, detail }
}

/// Positivity, closure, a positive lower bound `γ₁` for `M_{>0}` (which gives
/// bounded factorization: at most `v/γ₁` atoms), and no least positive
/// element of `Γ`. All passing certifies that `IntR(K, D)` is local and
/// atomic.
pub fn check_atomic_hypotheses(spec: &MonoidSpec, field: CoeffField) -> AtomicReport {
    let mut checks = Vec::new();
    let nonpositive = IntervalSet::from_intervals([Interval::ray_down(GroupElement::zero(), true)]);
    let positive = spec.positive_set().intersect(&nonpositive).is_empty();
    checks.push(check("positive", positive, "M ∩ (-inf, 0] = {0}".into()));

    let closure = check_monoid(spec);
    let detail = match &closure.witness {
        None => "M_{>0} + M_{>0} ⊆ M_{>0}".into(),
        Some((x, y)) => format!("{x} + {y} = {} is missing", x + y),
    };
    checks.push(check("closed under addition", closure.closed_under_addition, detail));

    let bound = is_bounded_away_from_zero(spec);
    let gamma1 = bound.as_ref().map(|(g, _)| g.clone());
    let detail = match &bound {
        Some((g, attained)) => format!("γ₁ = {g} ({})", if *attained { "attained" } else { "infimum" }),
        None => "nonzero elements accumulate at 0".into(),
    };
    checks.push(check("bounded away from 0", bound.is_some(), detail));

    let detail = match &gamma1 {
        Some(g) => format!("a factorization of value v has at most v/{g} atoms"),
        None => "no uniform bound on lengths".into(),
    };
    checks.push(check("bounded factorization", gamma1.is_some(), detail));

    let group = spec.group();
    let dense = group.has_no_minimal_positive();
    let detail = if dense {
        format!("{group} has no least positive element")
    } else {
        format!("{group} has a least positive element")
    };
    checks.push(check("no minimal positive", dense, detail));

    let certificate = checks.iter().all(|c| c.passed).then(|| {
        format!(
            "values of M_{{>0}} stay at or above {}, so nonzero values of IntR(K, D) avoid (0, γ₁) and \
             its nonunits form one ideal: IntR(K, D) is local; M bounded factorization makes D bounded \
             factorization; a local domain over a bounded factorization base is atomic",
            gamma1.as_ref().unwrap()
        )
    });
    AtomicReport {
        monoid: spec.to_string(),
        field: field.to_string(),
        checks,
        gamma1,
        certificate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports() {
        let r = check_atomic_hypotheses(&"Q: 0 u [1,inf)".parse().unwrap(), CoeffField::Prime(2));
        assert!(r.all_pass() && r.certificate.is_some());
        let r = check_atomic_hypotheses(&"Q: 0 u [2,3] u [4,inf)".parse().unwrap(), CoeffField::Rationals);
        assert!(r.all_pass());
        let r = check_atomic_hypotheses(&"Z: 0 u [1,inf)".parse().unwrap(), CoeffField::Rationals);
        assert_eq!(r.failures().len(), 1);
        assert_eq!(r.failures()[0].name, "no minimal positive");
        assert!(r.certificate.is_none());
    }
}
