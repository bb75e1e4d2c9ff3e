use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gapfactor::algebra::field::FieldElement;
use gapfactor::algebra::local::{
    canonical_factorization, distance, factor_in_d, normalize_to_D, three_chain, Membership,
};
use gapfactor::algebra::xpoly::{RationalFunction, XPoly};
use gapfactor::dvr::DvrContext;
use gapfactor::gadgets::intr::{canonical_intr, chain_intr, factorization_intr, length_set_intr};
use gapfactor::gadgets::{gadget_zigzag, Base, IntRElement};
use gapfactor::monoid::{length_set_bruteforce, length_set_closed_form, oracle_grid};
use gapfactor::par::Mode;
use gapfactor::parse::parse_field_element;
use gapfactor::tables::{catenary_table, lengths_table, CatenaryRow, LengthRow, Table};
use gapfactor::tropical::{envelope, exceptional_abscissas, minval_of};
use gapfactor::{CoeffField, Group, GroupElement, LengthSet, MonoidSpec};

const Q: CoeffField = CoeffField::Rationals;

fn frac() -> impl Strategy<Value = GroupElement> {
    (-40i64..40, prop::sample::select(vec![1i64, 2, 3, 4, 5, 6])).prop_map(|(n, d)| GroupElement::frac(n, d))
}

fn sqrt2() -> impl Strategy<Value = GroupElement> {
    (-30i64..30, -30i64..30).prop_map(|(a, b)| GroupElement::quadratic(a, b, 2))
}

fn positive_frac(lo: i64, hi: i64) -> impl Strategy<Value = GroupElement> {
    (lo * 6..=hi * 6, prop::sample::select(vec![1i64, 2, 3, 6]))
        .prop_map(move |(k, d)| GroupElement::frac((k / (6 / d)).max(lo * d), d))
}

fn one_gap() -> MonoidSpec {
    MonoidSpec::one_gap(Group::Rationals)
}

fn t(e: &GroupElement) -> FieldElement {
    FieldElement::t_pow(Q, e.clone())
}

fn term(c: i64, e: &GroupElement) -> FieldElement {
    t(e).scale(&Q.from_i64(c))
}

/// Polynomials in `x` with coefficients `c·t^e`.
fn xpoly() -> impl Strategy<Value = XPoly> {
    prop::collection::vec(
        prop::option::weighted(0.75, (prop::sample::select(vec![-3i64, -1, 1, 2, 5]), frac())),
        1..6,
    )
    .prop_filter_map("zero", |cs| {
        let coeffs: Vec<FieldElement> = cs
            .iter()
            .map(|c| match c {
                Some((c, e)) => term(*c, e),
                None => FieldElement::zero(Q),
            })
            .collect();
        let p = XPoly::new(Q, coeffs);
        (!p.is_zero()).then_some(p)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn order_is_translation_invariant(x in sqrt2(), y in sqrt2(), z in sqrt2()) {
        prop_assert_eq!(x.cmp(&y), (&x + &z).cmp(&(&y + &z)));
        prop_assert_eq!(x.cmp(&y), y.cmp(&x).reverse());
        if x <= y && y <= z {
            prop_assert!(x <= z);
        }
    }

    #[test]
    fn sign_agrees_with_floats(a in -1000i64..1000, b in -1000i64..1000) {
        let x = GroupElement::quadratic(a, b, 2);
        let f = a as f64 + b as f64 * 2f64.sqrt();
        // exact zero only at a = b = 0; otherwise |a + b√2| ≥ 1/(|a| + |b|√2) ≫ f64 error
        prop_assert_eq!(x.is_positive(), f > 0.0);
        prop_assert_eq!(x.is_zero(), a == 0 && b == 0);
    }

    #[test]
    fn scaling_inverts(x in sqrt2(), p in 1i64..20, neg in any::<bool>()) {
        let p = if neg { -p } else { p };
        let q = gapfactor::group::rat(p, 7);
        let back = x.scale(&q).scale(&(gapfactor::group::rat(1, 1) / &q));
        prop_assert_eq!(back, x);
    }

    #[test]
    fn values_print_and_parse(x in prop_oneof![frac(), sqrt2()]) {
        prop_assert_eq!(x.to_string().parse::<GroupElement>().unwrap(), x);
    }

    #[test]
    fn length_sets_print_and_parse(xs in prop::collection::btree_set(1u64..40, 1..8)) {
        let l = LengthSet::from_set(&xs).unwrap();
        prop_assert_eq!(l.to_string().parse::<LengthSet>().unwrap(), l);
    }

    #[test]
    fn envelope_is_pointwise_min(
        lines in prop::collection::btree_map(0usize..9, frac(), 1..9),
        xs in prop::collection::vec(frac(), 20),
    ) {
        let lines: Vec<(usize, GroupElement)> = lines.into_iter().collect();
        let env = envelope(&lines).unwrap();
        prop_assert!(env.slopes_strictly_decrease());
        prop_assert!(env.is_continuous());
        for x in &xs {
            let min = lines.iter().map(|(i, c)| c + &(x * *i as i64)).min().unwrap();
            prop_assert_eq!(env.evaluate(x), min);
        }
    }

    #[test]
    fn minval_is_additive(f in xpoly(), g in xpoly(), xs in prop::collection::vec(frac(), 10)) {
        let (f, g) = (RationalFunction::polynomial(f), RationalFunction::polynomial(g));
        let sum = minval_of(&f).unwrap().add(&minval_of(&g).unwrap());
        let prod = minval_of(&f.mul(&g)).unwrap();
        for x in &xs {
            prop_assert_eq!(prod.evaluate(x), sum.evaluate(x));
        }
    }

    #[test]
    fn generic_value_law(f in xpoly(), g in xpoly(), gamma in frac(), c in prop::sample::select(vec![1i64, -1, 2, 3, -7])) {
        let phi = RationalFunction::new(f, g).unwrap();
        prop_assume!(!exceptional_abscissas(&phi).unwrap().contains(&gamma));
        let a = term(c, &gamma);
        let direct = phi.value_at(&a).unwrap();
        prop_assert_eq!(direct, Some(minval_of(&phi).unwrap().evaluate(&gamma)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_bruteforce(k in 6i64..=54, q in prop::sample::select(vec![1u64, 2, 3, 4, 6])) {
        let spec = one_gap();
        let v = GroupElement::frac((k * q as i64) / 6, q as i64).max(GroupElement::one());
        let closed = length_set_closed_form(&spec, &v).unwrap();
        let brute = length_set_bruteforce(&spec, &v, oracle_grid(&spec, &v, q), 1 << 30).unwrap();
        prop_assert_eq!(&closed, &brute);
        prop_assert_eq!(closed.min as i64, v.halve().floor_i64() + 1);
    }

    #[test]
    fn normalize_reevaluates(
        terms in prop::collection::vec((prop::sample::select(vec![1i64, -2, 3]), positive_frac(1, 5)), 1..4),
        unit_exp in positive_frac(1, 3),
        shift in prop::sample::select(vec![0i64, 1, 2]),
    ) {
        let spec = one_gap();
        let mut num = FieldElement::zero(Q);
        for (c, e) in &terms {
            num = num.add(&term(*c, e));
        }
        prop_assume!(!num.is_zero());
        let x = num.div(&FieldElement::one(Q).add(&t(&unit_exp))).unwrap()
            .shift(&GroupElement::integer(-shift));
        match normalize_to_D(&x, &spec).unwrap() {
            Membership::InD(d) => {
                prop_assert_eq!(d.to_field(), x.clone());
                prop_assert!(spec.contains(&d.value));
                for e in d.num.exponents().chain(d.den.exponents()) {
                    prop_assert!(spec.contains(e));
                }
            }
            Membership::NotCertified => {
                // only elements whose value or a term escapes M
                let min = terms.iter().map(|(_, e)| e.clone()).min().unwrap();
                prop_assert!(shift > 0 || min < GroupElement::one());
            }
        }
    }

    #[test]
    fn factorizations_in_d_are_atomic(v in positive_frac(1, 10)) {
        let spec = one_gap();
        let x = t(&v).add(&t(&(&v + &GroupElement::frac(1, 2))));
        let lengths = length_set_closed_form(&spec, &v).unwrap();
        let canon = canonical_factorization(&x, &spec).unwrap();
        for l in 1..=lengths.max + 1 {
            match factor_in_d(&x, &spec, l) {
                Ok(z) => {
                    prop_assert!(lengths.contains(l));
                    prop_assert_eq!(z.product(), x.clone());
                    prop_assert!(z.all_atoms());
                    let chain = three_chain(&x, &z, &canon, &spec).unwrap().joined();
                    for w in chain.windows(2) {
                        prop_assert!(distance(&w[0], &w[1], &spec).unwrap().value <= 3);
                    }
                }
                Err(_) => prop_assert!(!lengths.contains(l)),
            }
        }
    }

    #[test]
    fn zigzag_profiles_are_sound(
        a in 0i64..8, da in 1i64..8, e in 1i64..4, gamma in frac(), c in prop::sample::select(vec![1i64, -1, 2]),
    ) {
        let alpha = GroupElement::frac(a, 4);
        let alpha_prime = &alpha + &GroupElement::frac(da, 4);
        let eps = GroupElement::frac(e, 4);
        let z = gadget_zigzag(&alpha, &alpha_prime, &eps, &Group::Rationals, Q).unwrap();
        prop_assert!(z.check_profile_at(&gamma, &FieldElement::constant(Q.from_i64(c))).is_ok());
        let sq = z.mul(&z).unwrap();
        prop_assert_eq!(sq.profile.generic.evaluate(&gamma), z.profile.generic.evaluate(&gamma).scale_int(2));
    }

    #[test]
    fn intr_factorizations_and_chains(v in positive_frac(2, 9), pick in any::<prop::sample::Index>()) {
        let spec = one_gap();
        let d = IntRElement::t_pow(Q, v.clone(), Group::Rationals)
            .certify(&Base::Monoid(spec.clone())).unwrap();
        let lengths = length_set_intr(&d, &spec).unwrap();
        prop_assert!(lengths.to_set().is_superset(&length_set_closed_form(&spec, &v).unwrap().to_set()));
        let all: Vec<u64> = lengths.to_set().into_iter().collect();
        let l = all[pick.index(all.len())];
        let z = factorization_intr(&d, l, &spec).unwrap();
        prop_assert_eq!(z.len() as u64, l);
        let chain = chain_intr(&d, &z, &canonical_intr(&d, &spec).unwrap(), &spec).unwrap();
        prop_assert!(chain.max_step() <= 3, "steps {:?}", chain.distances);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dvr_round_trip(
        points in prop::sample::subsequence(vec!["0", "1", "u", "1+u", "-1", "u^2"], 1..4),
        exps in prop::collection::vec(0u64..3, 3),
        seed in any::<u64>(),
    ) {
        let ctx = DvrContext::new(Q, points.iter().map(|p| parse_field_element(Q, p).unwrap()).collect()).unwrap();
        let exps = &exps[..ctx.len()];
        for i in 0..ctx.len() {
            let vv = ctx.value_vector(&ctx.atom(i).func).unwrap();
            prop_assert!(vv.iter().enumerate().all(|(j, &x)| x == (i == j) as i64));
        }
        let unit = ctx.sample_unit(&mut ChaCha8Rng::seed_from_u64(seed));
        let phi = ctx.atom_product(exps).mul(&unit);
        let z = ctx.factor_into_atoms(&phi).unwrap();
        prop_assert_eq!(&z.exponents[..], exps);
        prop_assert!(ctx.value_vector(&z.unit).unwrap().iter().all(|&x| x == 0));
        // equal value vectors: the quotient is a unit both ways
        let other = ctx.atom_product(exps);
        let q = phi.div(&other).unwrap();
        prop_assert!(ctx.value_vector(&q).unwrap().iter().all(|&x| x == 0));
        prop_assert!(ctx.value_vector(&q.inv().unwrap()).unwrap().iter().all(|&x| x == 0));
    }

    #[test]
    fn tables_round_trip(k in 1i64..6, span in 0i64..4, q in prop::sample::select(vec![1u64, 2, 3])) {
        let spec = one_gap();
        let from = GroupElement::frac(k * q as i64 + k % q as i64, q as i64);
        let to = &from + &GroupElement::integer(span);
        let lt = lengths_table(&spec, Q, &from, &to, q, Mode::default()).unwrap();
        prop_assert_eq!(&Table::<LengthRow>::from_csv(&lt.to_csv().unwrap()).unwrap(), &lt);
        prop_assert_eq!(&Table::<LengthRow>::from_json(&lt.to_json().unwrap()).unwrap(), &lt);
        let ct = catenary_table(&spec, Q, &from, &to, q, Mode::Sequential).unwrap();
        prop_assert_eq!(&Table::<CatenaryRow>::from_csv(&ct.to_csv().unwrap()).unwrap(), &ct);
        prop_assert_eq!(&Table::<CatenaryRow>::from_json(&ct.to_json().unwrap()).unwrap(), &ct);
        prop_assert_eq!(ct, catenary_table(&spec, Q, &from, &to, q, Mode::Parallel).unwrap());
    }
}
