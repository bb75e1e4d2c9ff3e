//! Randomized and exhaustive checks of the closed forms against independent
//! oracles. Shared by `gapfactor verify` and the acceptance test.
//!
//! Every suite is deterministic for a given seed: each sample draws from its
//! own ChaCha stream keyed by `(seed, suite, index)`, so parallel and
//! sequential runs agree.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::field::FieldElement;
use crate::algebra::local::{
    associated, canonical_factorization, distance, factor_in_d, normalize_to_D, three_chain, Association,
    DFactorization, Membership, NonAssociation,
};
use crate::algebra::poly::Poly;
use crate::algebra::xpoly::{RationalFunction, XPoly};
use crate::dvr::DvrContext;
use crate::gadgets::construct::{default_separation, gadget_psi_s, gadget_stone_weierstrass, gadget_zigzag};
use crate::gadgets::element::{Base, Descriptor, IntRElement};
use crate::gadgets::intr::{
    antimatter_witness, atom_certify_intr, extend_length_bounds, factorization_intr, length_set_intr,
};
use crate::gadgets::profile::ProfileValue;
use crate::group::{rat, Group, GroupElement};
use crate::interval::{Interval, Prefer};
use crate::monoid::{
    find_integrally_terminal, length_set_bruteforce, length_set_closed_form, oracle_grid, LengthSet, MonoidSpec,
};
use crate::par::{par_map, Mode};
use crate::scalar::CoeffField;
use crate::tropical::{envelope, exceptional_abscissas, minval_of};

/// `(id, name, time limit in seconds)`.
pub const SUITES: [(u8, &str, u64); 9] = [
    (1, "length sets", 60),
    (2, "catenary witnesses", 30),
    (3, "envelope oracle", 60),
    (4, "gadget profiles", 120),
    (5, "IntR length sets", 120),
    (6, "sandwich bounds", 60),
    (7, "DVR round trips", 30),
    (8, "antimatter witnesses", 60),
    (9, "normalization into D", 30),
];

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub mode: Mode,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 20240917,
            mode: Mode::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub id: u8,
    pub name: &'static str,
    pub checks: u64,
    pub failures: Vec<String>,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks > 0 && self.failures.is_empty() && self.elapsed <= self.limit
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}. {}: {} checks, {} failures, {:.2}s (limit {}s)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.checks,
            self.failures.len(),
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        )?;
        for msg in self.failures.iter().take(5) {
            write!(f, "\n    {msg}")?;
        }
        Ok(())
    }
}

/// Checks passed by one sample, or the first failure.
type Outcome = Result<u64, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng_for(seed: u64, suite: u8, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ ((suite as u64) << 56) ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn run_suite(id: u8, cfg: &VerifyConfig) -> SuiteReport {
    let (_, name, limit) = SUITES
        .iter()
        .copied()
        .find(|s| s.0 == id)
        .unwrap_or_else(|| panic!("no suite {id}"));
    let start = Instant::now();
    let outcomes = match id {
        1 => suite_lengths(cfg),
        2 => suite_catenary(cfg),
        3 => suite_envelope(cfg),
        4 => suite_gadgets(cfg),
        5 => suite_intr_lengths(cfg),
        6 => suite_sandwich(cfg),
        7 => suite_dvr(cfg),
        8 => suite_antimatter(cfg),
        _ => suite_normalize(cfg),
    };
    let elapsed = start.elapsed();
    let mut checks = 0;
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(n) => checks += n,
            Err(e) => failures.push(e),
        }
    }
    SuiteReport {
        id,
        name,
        checks,
        failures,
        elapsed,
        limit: Duration::from_secs(limit),
    }
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<SuiteReport> {
    SUITES.iter().map(|s| run_suite(s.0, cfg)).collect()
}

/// Run `f` on sample indices `0..n`, each with its own generator.
fn sampled<F>(cfg: &VerifyConfig, suite: u8, n: usize, f: F) -> Vec<Outcome>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Outcome + Sync + Send,
{
    let idx: Vec<usize> = (0..n).collect();
    let seed = cfg.seed;
    par_map(cfg.mode, &idx, |&i| f(i, &mut rng_for(seed, suite, i)))
}

fn g(n: i64, d: i64) -> GroupElement {
    GroupElement::frac(n, d)
}

/// `k/q` with `q` from `dens` and `k/q ∈ [lo, hi]`.
fn rand_rational<R: Rng>(rng: &mut R, lo: i64, hi: i64, dens: &[i64]) -> GroupElement {
    let q = *dens.choose(rng).unwrap();
    g(rng.gen_range(lo * q..=hi * q), q)
}

/// A random element of `ℤ[√2]` in `(lo, hi]`.
fn rand_sqrt2<R: Rng>(rng: &mut R, lo: &GroupElement, hi: &GroupElement) -> GroupElement {
    loop {
        let x = GroupElement::quadratic(rng.gen_range(-6..=6), rng.gen_range(-4..=4), 2);
        if &x > lo && &x <= hi {
            return x;
        }
    }
}

fn one_gap() -> MonoidSpec {
    MonoidSpec::one_gap(Group::Rationals)
}

fn section_four() -> MonoidSpec {
    "Q: 0 u [2,3] u [4,inf)".parse().expect("valid monoid")
}

// 1 ------------------------------------------------------------------------

fn suite_lengths(cfg: &VerifyConfig) -> Vec<Outcome> {
    let spec = one_gap();
    let mut grid = Vec::new();
    for q in [1i64, 2, 3, 4, 6] {
        for k in q..=12 * q {
            grid.push((k, q));
        }
    }
    par_map(cfg.mode, &grid, |&(k, q)| {
        let v = g(k, q);
        let closed = length_set_closed_form(&spec, &v).map_err(|e| format!("v = {v}: {e}"))?;
        let brute = length_set_bruteforce(&spec, &v, oracle_grid(&spec, &v, q as u64), u64::MAX)
            .map_err(|e| format!("v = {v}: {e}"))?;
        ensure(closed == brute, || {
            format!("v = {v}: closed form {closed} vs brute force {brute}")
        })?;
        let lower = (k / (2 * q)) as u64 + 1;
        ensure(closed.min == lower, || {
            format!("v = {v}: min {} vs ⌊v/2⌋+1 = {lower}", closed.min)
        })?;
        Ok(2)
    })
}

// 2 ------------------------------------------------------------------------

fn tq(e: GroupElement) -> FieldElement {
    FieldElement::t_pow(CoeffField::Rationals, e)
}

/// A factorization of `x` of random length, with units `1 + t` moved
/// between random factors.
fn shuffled_factorization(
    x: &FieldElement,
    lengths: &LengthSet,
    spec: &MonoidSpec,
    rng: &mut ChaCha8Rng,
) -> Result<DFactorization, String> {
    let l = rng.gen_range(lengths.min..=lengths.max);
    let z = factor_in_d(x, spec, l).map_err(|e| format!("factor_in_d(ℓ = {l}): {e}"))?;
    let mut elems: Vec<FieldElement> = z.factors.into_iter().map(|f| f.element).collect();
    if elems.len() >= 2 {
        let u = tq(GroupElement::zero()).add(&tq(GroupElement::one()));
        for _ in 0..rng.gen_range(1..=3) {
            let i = rng.gen_range(0..elems.len());
            let j = (i + rng.gen_range(1..elems.len())) % elems.len();
            elems[i] = elems[i].mul(&u);
            elems[j] = elems[j].div(&u).expect("nonzero unit");
        }
    }
    elems.shuffle(rng);
    DFactorization::from_elements(elems, spec).map_err(|e| e.to_string())
}

fn suite_catenary(cfg: &VerifyConfig) -> Vec<Outcome> {
    let spec = one_gap();
    let mut out = sampled(cfg, 2, 20, |_, rng| {
        let v = rand_rational(rng, 3, 9, &[1, 2, 3, 4, 6]);
        let x = tq(v.clone()).mul(&tq(GroupElement::zero()).add(&tq(g(1, 2))));
        let lengths = length_set_closed_form(&spec, &v).map_err(|e| e.to_string())?;
        let canon = canonical_factorization(&x, &spec).map_err(|e| e.to_string())?;
        let mut checks = 0;
        for _ in 0..5 {
            let z = shuffled_factorization(&x, &lengths, &spec, rng)?;
            ensure(z.product() == x, || {
                format!("v = {v}: constructed factorization does not multiply to x")
            })?;
            let chain = three_chain(&x, &z, &canon, &spec)
                .map_err(|e| e.to_string())?
                .from_first;
            ensure(chain.first() == Some(&z), || {
                format!("v = {v}: chain does not start at z")
            })?;
            ensure(chain.last() == Some(&canon), || {
                format!("v = {v}: chain does not end canonically")
            })?;
            for w in chain.windows(2) {
                let d = distance(&w[0], &w[1], &spec).map_err(|e| e.to_string())?;
                ensure(d.value <= 3, || format!("v = {v}: step of distance {}", d.value))?;
                ensure(w[1].product() == x, || {
                    format!("v = {v}: chain element does not multiply to x")
                })?;
                ensure(w[1].all_atoms(), || format!("v = {v}: chain element with a non-atom"))?;
                checks += 3;
            }
        }
        Ok(checks)
    });
    // 2 ≤ v < 3: t + t^α against t + t^β
    out.extend(sampled(cfg, 102, 20, |_, rng| {
        let v = rand_rational(rng, 2, 3, &[1, 2, 3, 4, 5, 6]).min(g(23, 8));
        let a = g(rng.gen_range(9..=15), 8);
        let mut b = a.clone();
        while b == a {
            b = g(rng.gen_range(9..=15), 8);
        }
        let x = tq(v.clone());
        let fa = tq(GroupElement::one()).add(&tq(a.clone()));
        let fb = tq(GroupElement::one()).add(&tq(b.clone()));
        let z1 =
            DFactorization::from_elements(vec![fa.clone(), x.div(&fa).unwrap()], &spec).map_err(|e| e.to_string())?;
        let z2 =
            DFactorization::from_elements(vec![fb.clone(), x.div(&fb).unwrap()], &spec).map_err(|e| e.to_string())?;
        ensure(z1.all_atoms() && z2.all_atoms(), || {
            format!("v = {v}: witness factor is not an atom")
        })?;
        let want = (&a.clone().min(b.clone())) - &GroupElement::one();
        match associated(&fa, &fb, &spec).map_err(|e| e.to_string())? {
            Association::No(NonAssociation::Gap(w)) if w == want => {}
            other => return Err(format!("t + t^{a} vs t + t^{b}: {other:?}, expected a gap at {want}")),
        }
        let d = distance(&z1, &z2, &spec).map_err(|e| e.to_string())?;
        ensure(d.value == 2 && d.exact, || {
            format!("v = {v}, α = {a}, β = {b}: distance {d:?}")
        })?;
        Ok(3)
    }));
    out
}

// 3 ------------------------------------------------------------------------

fn suite_envelope(cfg: &VerifyConfig) -> Vec<Outcome> {
    let mut out = sampled(cfg, 3, 500, |_, rng| {
        let deg = rng.gen_range(0..=8usize);
        let mut lines: Vec<(usize, GroupElement)> = Vec::new();
        for i in 0..=deg {
            if rng.gen_bool(0.7) {
                lines.push((i, rand_rational(rng, -6, 6, &[1, 2, 3, 5])));
            }
        }
        if lines.is_empty() {
            lines.push((deg, rand_rational(rng, -6, 6, &[1, 2])));
        }
        let env = envelope(&lines).map_err(|e| e.to_string())?;
        let mut xs: Vec<GroupElement> = env.breakpoints().to_vec();
        while xs.len() < 50 {
            xs.push(rand_rational(rng, -10, 10, &[1, 2, 3, 4, 7]));
        }
        for x in &xs[..50] {
            let direct = lines.iter().map(|(i, c)| c + &x.scale_int(*i as i64)).min().unwrap();
            let got = env.evaluate(x);
            ensure(got == direct, || {
                format!("lines {lines:?} at {x}: envelope {got}, pointwise min {direct}")
            })?;
        }
        Ok(50)
    });
    out.extend(sampled(cfg, 103, 100, |_, rng| {
        let field = CoeffField::Rationals;
        let poly = |rng: &mut ChaCha8Rng| {
            let deg = rng.gen_range(0..=5usize);
            let coeffs = (0..=deg)
                .map(|_| {
                    if rng.gen_bool(0.25) {
                        FieldElement::zero(field)
                    } else {
                        let c = field.from_i64(*[-3, -2, -1, 1, 2, 3].choose(rng).unwrap());
                        FieldElement::constant(c).shift(&rand_rational(rng, -3, 3, &[1, 2, 3]))
                    }
                })
                .collect();
            let p = XPoly::new(field, coeffs);
            if p.is_zero() {
                XPoly::one(field)
            } else {
                p
            }
        };
        let phi = RationalFunction::new(poly(rng), poly(rng)).unwrap();
        let mv = minval_of(&phi).map_err(|e| e.to_string())?;
        let bad = exceptional_abscissas(&phi).map_err(|e| e.to_string())?;
        let mut checks = 0;
        while checks < 50 {
            let gamma = rand_rational(rng, -6, 6, &[1, 2, 3, 4, 5]);
            if bad.contains(&gamma) {
                continue;
            }
            let u = FieldElement::constant(field.from_i64(*[-2, -1, 1, 3].choose(rng).unwrap()))
                .add(&FieldElement::t_pow(field, g(rng.gen_range(1..=4), 2)));
            let a = u.shift(&gamma);
            let got = phi.value_at(&a).map_err(|e| format!("{phi} at {a}: {e}"))?;
            let want = mv.evaluate(&gamma);
            ensure(got.as_ref() == Some(&want), || {
                format!("{phi} at v(a) = {gamma}: v(φ(a)) = {got:?}, minval = {want}")
            })?;
            checks += 1;
        }
        Ok(checks)
    }));
    out
}

// 4 ------------------------------------------------------------------------

/// Units `c` with `v(c) = 0` and assorted residues.
fn units(field: CoeffField, group: &Group) -> Vec<FieldElement> {
    let small = match group {
        Group::Integers => GroupElement::one(),
        Group::QuadraticIntegers(d) | Group::QuadraticField(d) => {
            let r = GroupElement::sqrt(*d);
            &r - &GroupElement::integer(r.floor_i64())
        }
        Group::Rationals => g(1, 2),
    };
    let mut out = vec![FieldElement::one(field)];
    let minus = FieldElement::one(field).neg();
    if minus != out[0] {
        out.push(minus);
    }
    let two = FieldElement::constant(field.from_i64(2));
    if !two.is_zero() && !out.contains(&two) {
        out.push(two);
    }
    out.push(FieldElement::one(field).add(&FieldElement::t_pow(field, small)));
    out
}

fn snap(x: &GroupElement, step: &GroupElement, group: &Group) -> GroupElement {
    if group.contains(x) {
        return x.clone();
    }
    Interval::closed(x.clone(), x + step)
        .pick_point(group, Prefer::Low)
        .unwrap_or_else(|| GroupElement::integer(x.floor_i64()))
}

/// Direct evaluation against the profile at 200 points spanning every
/// breakpoint, cycling through units.
fn profile_sweep(e: &IntRElement) -> Outcome {
    let group = e.group;
    let bps = e.profile.generic.breakpoints();
    let lo = &bps.first().cloned().unwrap_or_else(GroupElement::zero) - &GroupElement::integer(2);
    let hi = &bps.last().cloned().unwrap_or_else(GroupElement::zero) + &GroupElement::integer(2);
    let step = (&hi - &lo).scale(&rat(1, 199));
    let mut gammas: Vec<GroupElement> = (0..200)
        .map(|i| snap(&(&lo + &step.scale_int(i)), &step, &group))
        .collect();
    gammas.extend(e.profile.representatives(&group));
    let cs = units(e.field(), &group);
    for (i, gamma) in gammas.iter().enumerate() {
        let c = &cs[i % cs.len()];
        e.check_profile_at(gamma, c)
            .map_err(|err| format!("{:?} at γ = {gamma}, c = {c}: {err}", e.descriptor))?;
    }
    Ok(gammas.len() as u64)
}

fn zigzag_ends(e: &IntRElement, alpha: &GroupElement, top: &GroupElement) -> Result<(), String> {
    let bps = e.profile.generic.breakpoints();
    let below = &bps.first().cloned().unwrap_or_else(GroupElement::zero) - &GroupElement::one();
    let above = &bps.last().cloned().unwrap_or_else(GroupElement::zero) + &GroupElement::one();
    let (b, a) = (e.profile.generic.evaluate(&below), e.profile.generic.evaluate(&above));
    ensure(&b == alpha && &a == top, || {
        format!("{:?}: ends {b} / {a}, expected {alpha} / {top}", e.descriptor)
    })
}

fn suite_gadgets(cfg: &VerifyConfig) -> Vec<Outcome> {
    sampled(cfg, 4, 50, |i, rng| match i / 10 {
        0 | 1 => {
            let field = if i < 10 {
                CoeffField::Prime(2)
            } else {
                CoeffField::Rationals
            };
            let alpha = rand_rational(rng, 0, 2, &[1, 2, 3, 4]);
            let ap = &alpha + &rand_rational(rng, 0, 2, &[1, 2, 3, 4, 6]).max(g(1, 6));
            let eps = rand_rational(rng, 0, 1, &[2, 3]).max(g(1, 3));
            let z = gadget_zigzag(&alpha, &ap, &eps, &Group::Rationals, field).map_err(|e| e.to_string())?;
            zigzag_ends(&z, &alpha, &ap)?;
            Ok(profile_sweep(&z)? + 2)
        }
        2 => {
            let grp = Group::QuadraticIntegers(2);
            let alpha = rand_sqrt2(rng, &g(-1, 100), &g(2, 1));
            let ap = &alpha + &rand_sqrt2(rng, &GroupElement::zero(), &g(2, 1));
            let eps = rand_sqrt2(rng, &GroupElement::zero(), &g(3, 2));
            let z = gadget_zigzag(&alpha, &ap, &eps, &grp, CoeffField::Rationals).map_err(|e| e.to_string())?;
            let Descriptor::Zigzag { alpha_second, .. } = &z.descriptor else {
                return Err("case 2 produced a non-zigzag descriptor".into());
            };
            let a2 = alpha_second.clone();
            ensure((&ap - &eps) < a2 && a2 <= ap && a2 > alpha, || {
                format!("α = {alpha}, α′ = {ap}, ε = {eps}: α″ = {a2} off the plateau")
            })?;
            ensure(grp.contains(&(&a2 - &alpha).scale(&rat(1, 2))), || {
                format!("(α″ − α)/2 ∉ Γ for α″ = {a2}")
            })?;
            zigzag_ends(&z, &alpha, &a2)?;
            Ok(profile_sweep(&z)? + 3)
        }
        3 => {
            let field = CoeffField::Rationals;
            let beta = rand_rational(rng, 0, 3, &[1, 2, 3]);
            let tau = rand_rational(rng, 0, 2, &[1, 2, 3, 4]).max(g(1, 4));
            let b = FieldElement::constant(field.from_i64(rng.gen_range(1..=3))).shift(&beta);
            let sw = gadget_stone_weierstrass(&b, &tau, &Group::Rationals).map_err(|e| e.to_string())?;
            profile_sweep(&sw)
        }
        _ => {
            let field = CoeffField::Rationals;
            let n = rng.gen_range(1..=4);
            let mut pts: Vec<FieldElement> = Vec::new();
            while pts.len() < n {
                let p = FieldElement::constant(field.from_i64(rng.gen_range(-2..=2))).add(
                    &FieldElement::t_pow(field, GroupElement::integer(rng.gen_range(0..=3)))
                        .scale(&field.from_i64(rng.gen_range(0..=1))),
                );
                if !pts.contains(&p) {
                    pts.push(p);
                }
            }
            let mut checks = 0;
            for s in &pts {
                let c = default_separation(s, &pts).map_err(|e| e.to_string())?;
                let psi =
                    gadget_psi_s(s, &c, &GroupElement::one(), &Group::Integers, &pts).map_err(|e| e.to_string())?;
                checks += profile_sweep(&psi)?;
                for (j, b) in pts.iter().enumerate() {
                    let want = if b == s {
                        GroupElement::one()
                    } else {
                        GroupElement::zero()
                    };
                    let got = psi.value_at(b).map_err(|e| e.to_string())?;
                    ensure(got.as_ref() == Some(&want), || format!("ψ_{s} at point {j}: {got:?}"))?;
                    checks += 1;
                }
            }
            Ok(checks)
        }
    })
}

// 5 ------------------------------------------------------------------------

fn suite_intr_lengths(cfg: &VerifyConfig) -> Vec<Outcome> {
    let spec = one_gap();
    let base = Base::Monoid(spec.clone());
    let field = CoeffField::Rationals;
    // v ∈ {1, 3/2, 2, 5/2, …, 8}
    let values: Vec<GroupElement> = (2..=16).map(|k| g(k, 2)).collect();
    par_map(cfg.mode, &values, |v| {
        let c = tq(v.clone()).mul(&tq(GroupElement::zero()).add(&tq(g(1, 2))));
        let d = IntRElement::constant(c, Group::Rationals)
            .and_then(|e| e.certify(&base))
            .map_err(|e| e.to_string())?;
        let top = v.floor_i64() as u64;
        let expected: BTreeSet<u64> = if top < 2 {
            BTreeSet::from([1])
        } else {
            (2..=top).collect()
        };
        let ls = length_set_intr(&d, &spec).map_err(|e| e.to_string())?;
        ensure(ls.to_set() == expected, || format!("v = {v}: length set {ls}"))?;
        let mut checks = 1;
        for l in 1..=top + 2 {
            let r = factorization_intr(&d, l, &spec);
            match (expected.contains(&l), r) {
                (true, Ok(z)) => {
                    ensure(z.len() as u64 == l, || format!("v = {v}, ℓ = {l}: {} factors", z.len()))?;
                    let prod = z
                        .iter()
                        .fold(RationalFunction::constant(FieldElement::one(field)), |acc, f| {
                            acc.mul(&f.func)
                        });
                    ensure(prod == d.func, || format!("v = {v}, ℓ = {l}: product differs"))?;
                    for f in &z {
                        let a = f
                            .alpha
                            .value
                            .clone()
                            .ok_or_else(|| format!("v = {v}, ℓ = {l}: unbounded factor"))?;
                        ensure(f.membership.is_certified() && a >= g(1, 1) && a < g(2, 1), || {
                            format!("v = {v}, ℓ = {l}: factor with α = {a}")
                        })?;
                        let verdict = atom_certify_intr(f, &spec).map_err(|e| e.to_string())?;
                        ensure(verdict.is_atom(), || {
                            format!("v = {v}, ℓ = {l}: factor is {}", verdict.label())
                        })?;
                    }
                    checks += 2 + z.len() as u64;
                }
                (false, Err(_)) => checks += 1,
                (true, Err(e)) => return Err(format!("v = {v}, ℓ = {l}: {e}")),
                (false, Ok(_)) => return Err(format!("v = {v}: factorization of impossible length {l}")),
            }
        }
        Ok(checks)
    })
}

// 6 ------------------------------------------------------------------------

fn suite_sandwich(cfg: &VerifyConfig) -> Vec<Outcome> {
    let spec = section_four();
    let values = vec![g(13, 1), g(14, 1), g(27, 2)];
    let (alpha, beta) = (g(4, 1), g(3, 1));
    par_map(cfg.mode, &values, |v| {
        let d = tq(v.clone());
        let (b, witnesses) = extend_length_bounds(&d, &spec, &alpha, &beta).map_err(|e| format!("v = {v}: {e}"))?;
        // atoms of M are [2, 3], so a length n needs 2n ≤ v ≤ 3n
        let oracle: BTreeSet<u64> = (1..=v.floor_i64() as u64)
            .filter(|&n| g(2 * n as i64, 1) <= *v && *v <= g(3 * n as i64, 1))
            .collect();
        ensure(b.lengths_d.to_set() == oracle, || {
            format!("v = {v}: 𝓛_D = {} vs {oracle:?}", b.lengths_d)
        })?;
        let n = (1..).find(|&n| alpha.scale_int(n) > *v).unwrap() as u64;
        ensure(b.n == n, || format!("v = {v}: N = {} vs {n}", b.n))?;
        let middle: BTreeSet<u64> = (2..=n.saturating_sub(2)).collect();
        let seen: BTreeSet<u64> = witnesses.iter().map(|w| w.len() as u64).collect();
        ensure(seen == middle, || {
            format!("v = {v}: witnessed {seen:?}, expected {middle:?}")
        })?;
        ensure(middle.is_subset(&b.lower) && oracle.is_subset(&b.lower), || {
            format!("v = {v}: lower bound {:?}", b.lower)
        })?;
        let max_d = *oracle.last().unwrap();
        ensure(b.upper == max_d, || format!("v = {v}: L_D = {} vs {max_d}", b.upper))?;
        let mut checks = 5;
        for w in &witnesses {
            let prod = w.iter().fold(
                RationalFunction::constant(FieldElement::one(CoeffField::Rationals)),
                |acc, f| acc.mul(&f.func),
            );
            ensure(prod == RationalFunction::constant(d.clone()), || {
                format!("v = {v}: witness does not multiply to d")
            })?;
            ensure(w.len() as u64 <= max_d, || {
                format!("v = {v}: witness length {} > L_D", w.len())
            })?;
            for f in w {
                let verdict = atom_certify_intr(f, &spec).map_err(|e| e.to_string())?;
                ensure(verdict.is_atom(), || {
                    format!("v = {v}: witness factor is {}", verdict.label())
                })?;
            }
            checks += 2 + w.len() as u64;
        }
        Ok(checks)
    })
}

// 7 ------------------------------------------------------------------------

fn suite_dvr(cfg: &VerifyConfig) -> Vec<Outcome> {
    sampled(cfg, 7, 100, |i, rng| {
        let n = [1usize, 2, 3, 5][i % 4];
        let field = if (i / 4) % 2 == 0 {
            CoeffField::Rationals
        } else {
            CoeffField::Prime(3)
        };
        let mut pts: Vec<FieldElement> = Vec::new();
        while pts.len() < n {
            let p = FieldElement::constant(field.from_i64(rng.gen_range(-2..=2))).add(
                &FieldElement::constant(field.from_i64(rng.gen_range(0..=2)))
                    .shift(&GroupElement::integer(rng.gen_range(1..=3))),
            );
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        let ctx = DvrContext::new(field, pts).map_err(|e| e.to_string())?;
        let exps: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        let unit = ctx.sample_unit(rng);
        let phi = ctx.atom_product(&exps).mul(&unit);
        let z = ctx
            .factor_into_atoms(&phi)
            .map_err(|e| format!("E = {:?}: {e}", ctx.points()))?;
        ensure(z.exponents == exps, || {
            format!("E = {:?}: exponents {:?} vs {exps:?}", ctx.points(), z.exponents)
        })?;
        ensure(z.unit == unit, || {
            format!("E = {:?}: unit {} vs {unit}", ctx.points(), z.unit)
        })?;
        let fwd = ctx.value_vector(&z.unit).map_err(|e| e.to_string())?;
        let back = ctx
            .value_vector(&z.unit.inv().map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure(fwd.iter().chain(&back).all(|&x| x == 0), || {
            format!("unit value vectors {fwd:?} / {back:?}")
        })?;
        let rebuilt = ctx.atom_product(&z.exponents).mul(&z.unit);
        ensure(rebuilt == phi, || "round trip does not rebuild φ".into())?;
        Ok(4)
    })
}

// 8 ------------------------------------------------------------------------

fn is_certified_nonunit(e: &IntRElement) -> bool {
    let vals: Vec<GroupElement> = e
        .profile
        .representatives(&e.group)
        .iter()
        .filter_map(|x| match e.profile.value_at(x) {
            ProfileValue::Exact(w) => Some(w),
            ProfileValue::Range { .. } => None,
        })
        .collect();
    e.membership.is_certified()
        && e.profile.exact
        && vals.iter().all(|w| !w.is_negative())
        && vals.iter().any(GroupElement::is_positive)
}

fn suite_antimatter(cfg: &VerifyConfig) -> Vec<Outcome> {
    sampled(cfg, 8, 30, |i, rng| {
        let branch = (i / 10) as u8 + 1;
        let (group, field) = match branch {
            1 => (
                Group::Rationals,
                if i % 2 == 0 {
                    CoeffField::Prime(2)
                } else {
                    CoeffField::Rationals
                },
            ),
            2 => (Group::QuadraticIntegers(2), CoeffField::Rationals),
            _ => (Group::Integers, CoeffField::Rationals),
        };
        let e = match branch {
            1 => rand_rational(rng, 0, 2, &[1, 2, 3]).max(g(1, 3)),
            2 => rand_sqrt2(rng, &GroupElement::zero(), &g(2, 1)),
            _ => GroupElement::integer(rng.gen_range(1..=3)),
        };
        let mut phi = IntRElement::t_pow(field, e.clone(), group);
        if i % 2 == 1 {
            let other = match branch {
                1 => {
                    let a = rand_rational(rng, 0, 2, &[1, 2]);
                    gadget_zigzag(&a, &(&a + &g(1, 2)), &g(1, 2), &group, field)
                }
                2 => {
                    let a = rand_sqrt2(rng, &g(-1, 100), &g(1, 1));
                    gadget_zigzag(&a, &(&a + &GroupElement::one()), &g(1, 1), &group, field)
                }
                _ => gadget_stone_weierstrass(
                    &FieldElement::t_pow(field, GroupElement::integer(rng.gen_range(0..=3))),
                    &GroupElement::one(),
                    &group,
                ),
            }
            .map_err(|e| e.to_string())?;
            phi = phi.mul(&other).map_err(|e| e.to_string())?;
        }
        let w =
            antimatter_witness(&phi, branch).map_err(|err| format!("branch {branch}, {:?}: {err}", phi.descriptor))?;
        ensure(is_certified_nonunit(&w.psi), || {
            format!("branch {branch}: ψ is not a certified nonunit")
        })?;
        ensure(is_certified_nonunit(&w.quotient), || {
            format!("branch {branch}: φ/ψ is not a certified nonunit")
        })?;
        ensure(w.psi.func.mul(&w.quotient.func) == phi.func, || {
            format!("branch {branch}: ψ·(φ/ψ) ≠ φ")
        })?;
        let mut checks = 3;
        for x in w.psi.profile.representatives(&group) {
            w.psi
                .check_profile_at(&x, &FieldElement::one(field))
                .map_err(|e| format!("branch {branch}: ψ {e}"))?;
            checks += 1;
        }
        Ok(checks)
    })
}

// 9 ------------------------------------------------------------------------

fn exponents_in(spec: &MonoidSpec, p: &Poly) -> bool {
    p.exponents().all(|e| spec.contains(e))
}

fn check_certificate(c: &FieldElement, spec: &MonoidSpec) -> Result<GroupElement, String> {
    let m = normalize_to_D(c, spec).map_err(|e| e.to_string())?;
    let Membership::InD(d) = m else {
        return Err(format!("{c} over {spec}: not certified"));
    };
    ensure(d.to_field() == *c, || {
        format!("{c}: certificate re-evaluates differently")
    })?;
    ensure(exponents_in(spec, &d.num) && exponents_in(spec, &d.den), || {
        format!("{c}: certificate exponent outside {spec}")
    })?;
    ensure(!d.den.constant_term().is_zero(), || {
        format!("{c}: denominator is not a unit")
    })?;
    let v = c.valuation().map_err(|e| e.to_string())?;
    ensure(d.value == v, || format!("{c}: certified value {} vs {v}", d.value))?;
    Ok(v)
}

fn suite_normalize(cfg: &VerifyConfig) -> Vec<Outcome> {
    let specs = [one_gap(), section_four()];
    let mut out = sampled(cfg, 9, 50, |i, rng| {
        let spec = &specs[i % 2];
        let field = if i % 4 < 2 {
            CoeffField::Rationals
        } else {
            CoeffField::Prime(2)
        };
        let delta = find_integrally_terminal(spec).ok_or("not integrally terminal")?;
        let v = &delta + &rand_rational(rng, 0, 3, &[1, 2, 3, 4]).max(g(1, 4));
        let coeff = |rng: &mut ChaCha8Rng| {
            let c = field.from_i64(rng.gen_range(1..=4));
            if c.is_zero() {
                field.one()
            } else {
                c
            }
        };
        let mut num = Poly::monomial(coeff(rng), v.clone());
        for _ in 0..rng.gen_range(0..=3) {
            num = num.add(&Poly::monomial(
                coeff(rng),
                &v + &rand_rational(rng, 0, 4, &[1, 2, 3]).max(g(1, 3)),
            ));
        }
        let mut den = Poly::constant(coeff(rng));
        for _ in 0..rng.gen_range(1..=3) {
            den = den.add(&Poly::monomial(
                coeff(rng),
                rand_rational(rng, 0, 3, &[2, 3, 4, 5]).max(g(1, 5)),
            ));
        }
        if den.constant_term().is_zero() {
            den = den.add(&Poly::one(field));
        }
        let c = FieldElement::new(num, den).map_err(|e| e.to_string())?;
        let got = check_certificate(&c, spec)?;
        ensure(got > delta, || format!("{c}: value {got} not above δ = {delta}"))?;
        Ok(5)
    });
    // (t^{13δ} + t^{7δ} + t^{3δ}) / (t^{δ/2} + 1) has value 3δ
    out.extend(specs.iter().map(|spec| {
        let field = CoeffField::Rationals;
        let delta = find_integrally_terminal(spec).ok_or("not integrally terminal")?;
        let t = |k: i64| Poly::t_pow(field, delta.scale_int(k));
        let num = t(13).add(&t(7)).add(&t(3));
        let den = Poly::t_pow(field, delta.halve()).add(&Poly::one(field));
        let c = FieldElement::new(num, den).map_err(|e| e.to_string())?;
        let v = check_certificate(&c, spec)?;
        ensure(v == delta.scale_int(3), || {
            format!("example value {v}, expected 3δ = {}", delta.scale_int(3))
        })?;
        if spec.is_one_gap() {
            let Membership::InD(d) = normalize_to_D(&c, spec).map_err(|e| e.to_string())? else {
                return Err("example not certified".into());
            };
            let want = Poly::t_pow(field, g(3, 2)).add(&Poly::one(field));
            ensure(d.den == want, || {
                format!("example denominator {}, expected 1 + t^(3/2)", d.den)
            })?;
        }
        Ok(3)
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suites_pass() {
        let cfg = VerifyConfig::default();
        for id in [6, 9] {
            let r = run_suite(id, &cfg);
            assert!(r.failures.is_empty(), "{r}");
        }
    }

    #[test]
    fn modes_agree() {
        let seq = VerifyConfig {
            mode: Mode::Sequential,
            ..VerifyConfig::default()
        };
        let a = run_suite(2, &seq);
        let b = run_suite(2, &VerifyConfig::default());
        assert_eq!(a.checks, b.checks);
        assert_eq!(a.failures, b.failures);
    }
}
