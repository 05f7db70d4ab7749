use std::collections::BTreeSet;

use num_rational::BigRational;
use proptest::prelude::*;
use stickelberger_core::arith::{self, gcd, rat, rat_int, reduce};
use stickelberger_core::bernoulli::{bernoulli_number, bernoulli_poly};
use stickelberger_core::characters::{enumerate_characters, gen_bernoulli, l_value};
use stickelberger_core::stickelberger::{multiplicativity_check, twist_factor};
use stickelberger_core::tower::{w_invariant, w_invariant_factors};
use stickelberger_core::zeta::{euler_factor_split_check, partial_zeta_q};
use stickelberger_core::{
    theta, AbelianFieldSpec, CyclotomicNumber, GroupRingElement, RationalPartialZeta,
};

fn admissible(bound: u64) -> impl Strategy<Value = u64> {
    (1..=bound).prop_filter("f ≢ 2 mod 4", |f| f % 4 != 2)
}

fn closure(m: u64, gens: &[u64]) -> Vec<u64> {
    let mut h = BTreeSet::from([reduce(1, m)]);
    loop {
        let next: BTreeSet<u64> = h
            .iter()
            .flat_map(|&x| gens.iter().map(move |&g| reduce(x * g % m.max(1), m)))
            .chain(h.iter().copied())
            .collect();
        if next == h {
            return h.into_iter().collect();
        }
        h = next;
    }
}

/// A conductor f' ≤ bound and a subfield F of Q(μ_f') fixed by a random subgroup.
fn field_pair(bound: u64) -> impl Strategy<Value = (AbelianFieldSpec, AbelianFieldSpec)> {
    admissible(bound)
        .prop_flat_map(|fp| (Just(fp), proptest::collection::vec(0usize..64, 0..3)))
        .prop_map(|(fp, picks)| {
            let units = arith::units(fp);
            let gens: Vec<u64> = picks.iter().map(|&i| units[i % units.len()]).collect();
            let top = AbelianFieldSpec::cyclotomic(fp).unwrap();
            let sub = AbelianFieldSpec::normalized(fp, &closure(fp, &gens)).unwrap();
            (top, sub)
        })
}

fn element(field: &AbelianFieldSpec, coeffs: &[(i64, i64)]) -> GroupRingElement {
    let terms = field
        .elements()
        .iter()
        .zip(coeffs.iter().cycle())
        .map(|(&a, &(n, d))| (a, rat(n, d)));
    GroupRingElement::from_terms(field, terms).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    proptest::collection::vec((-20i64..20, 1i64..6), 1..8)
}

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-50i64..50, 1i64..30).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn restriction_is_a_ring_homomorphism(
        (top, sub) in field_pair(60),
        x in coeffs(),
        y in coeffs(),
    ) {
        let x = element(&top, &x);
        let y = element(&top, &y);
        let sum = x.add(&y).unwrap().restrict(&sub).unwrap();
        prop_assert_eq!(sum, x.restrict(&sub).unwrap().add(&y.restrict(&sub).unwrap()).unwrap());
        let prod = x.mul(&y).unwrap().restrict(&sub).unwrap();
        prop_assert_eq!(prod, x.restrict(&sub).unwrap().mul(&y.restrict(&sub).unwrap()).unwrap());
    }

    #[test]
    fn multiplication_is_associative_and_commutative(
        (top, _) in field_pair(40),
        x in coeffs(),
        y in coeffs(),
        z in coeffs(),
    ) {
        let (x, y, z) = (element(&top, &x), element(&top, &y), element(&top, &z));
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(
            x.mul(&y).unwrap().mul(&z).unwrap(),
            x.mul(&y.mul(&z).unwrap()).unwrap()
        );
    }

    #[test]
    fn canonicalization_is_idempotent((_, sub) in field_pair(60), x in coeffs()) {
        let x = element(&sub, &x);
        let once = x.canonicalize();
        prop_assert_eq!(&once, &x);
        prop_assert_eq!(once.canonicalize(), once);
    }

    #[test]
    fn constructed_fields_have_minimal_conductor((_, sub) in field_pair(60)) {
        let f = sub.conductor();
        let h: BTreeSet<u64> = sub.subgroup().iter().copied().collect();
        for d in arith::divisors(f).into_iter().filter(|&d| d < f) {
            let kernel_inside = arith::units(f)
                .into_iter()
                .filter(|&x| reduce(x, d) == 1)
                .all(|x| h.contains(&x));
            prop_assert!(!kernel_inside, "divisor {} of {} passes the kernel test", d, f);
        }
    }

    #[test]
    fn json_round_trip((_, sub) in field_pair(60), x in coeffs()) {
        let x = element(&sub, &x);
        prop_assert_eq!(GroupRingElement::from_json(&x.to_json()).unwrap(), x);
    }

    #[test]
    fn bernoulli_difference(n in 1usize..=12, x in small_rational()) {
        let one = rat_int(1);
        let lhs = bernoulli_poly(n, &(&x + &one)) - bernoulli_poly(n, &x);
        let rhs = rat_int(n as i64) * arith::rat_pow(&x, n as i64 - 1);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn partial_zeta_parity(f in 3u64..=40, n in 1u32..=5, pick in 0usize..64) {
        prop_assume!(f % 4 != 2);
        let units = arith::units(f);
        let a = units[pick % units.len()];
        let s = partial_zeta_q(a, f, n).unwrap();
        let t = partial_zeta_q(f - a, f, n).unwrap();
        let sign = if n % 2 == 0 { rat_int(1) } else { rat_int(-1) };
        prop_assert_eq!(s + sign * t, rat_int(0));
    }

    #[test]
    fn distribution_relation(f in 1u64..=30, l_pick in 0usize..6, n in 0u32..=4, pick in 0usize..64) {
        let l = [2u64, 3, 5, 7, 11, 13][l_pick];
        prop_assume!(f % l != 0);
        let units = arith::units(f);
        let a = units[pick % units.len()];
        let r = euler_factor_split_check(&RationalPartialZeta, a, f, l, n).unwrap();
        prop_assert!(r.holds, "{:?}", r);
    }

    #[test]
    fn multiplicativity(f in 1u64..=30, n in 0u32..=3, b in 2u64..40, b2 in 2u64..40) {
        prop_assume!(f % 4 != 2 && gcd(b * b2, f) == 1 && gcd(b, b2) == 1);
        let field = AbelianFieldSpec::cyclotomic(f).unwrap();
        prop_assert!(multiplicativity_check(n, b, b2, &field).unwrap());
    }

    #[test]
    fn theta_matches_twisted_zeta_sum(f in 1u64..=30, n in 0u32..=3, b in 1u64..30) {
        prop_assume!(f % 4 != 2 && gcd(b, f) == 1);
        let field = AbelianFieldSpec::cyclotomic(f).unwrap();
        let zeta_sum = GroupRingElement::from_terms(
            &field,
            field.elements().iter().map(|&a| {
                let inv = arith::mod_inverse(a, f).unwrap_or(1);
                (reduce(inv, f), partial_zeta_q(a, f, n).unwrap())
            }),
        ).unwrap();
        let expected = twist_factor(&field, n, b).unwrap().mul(&zeta_sum).unwrap();
        prop_assert_eq!(theta(n, b, &field).unwrap().value, expected);
    }

    #[test]
    fn w_invariant_is_a_product_of_prime_parts(f in 1u64..=40, n in 1u32..=4) {
        prop_assume!(f % 4 != 2);
        let field = AbelianFieldSpec::cyclotomic(f).unwrap();
        let w = w_invariant(n, &field).unwrap();
        let mut factors = w_invariant_factors(n, &field);
        let forward: u64 = factors.iter().map(|&(l, e)| l.pow(e)).product();
        factors.reverse();
        let backward: u64 = factors.iter().map(|&(l, e)| l.pow(e)).product();
        prop_assert_eq!(w, forward);
        prop_assert_eq!(w, backward);
    }
}

#[test]
fn odd_bernoulli_numbers_vanish() {
    for n in (3..60).step_by(2) {
        assert_eq!(bernoulli_number(n), rat_int(0), "B_{n}");
    }
}

#[test]
fn generalized_bernoulli_parity() {
    for f in (1..=25u64).filter(|f| f % 4 != 2) {
        let field = AbelianFieldSpec::cyclotomic(f).unwrap();
        for chi in enumerate_characters(&field)
            .into_iter()
            .filter(|c| c.is_primitive())
        {
            for n in 1..=6usize {
                let wrong_parity =
                    (chi.is_even() && n % 2 == 1 && n >= 3) || (!chi.is_even() && n % 2 == 0);
                if wrong_parity {
                    assert!(
                        gen_bernoulli(n, &chi).unwrap().is_zero(),
                        "f={f} χ={} n={n}",
                        chi.label()
                    );
                }
            }
        }
    }
}

#[test]
fn zeta_sum_matches_depleted_riemann_value() {
    for f in (1..=30u64).filter(|f| f % 4 != 2) {
        let trivial = &enumerate_characters(&AbelianFieldSpec::rationals())[0];
        for n in 0..=4u32 {
            let total: BigRational = arith::units(f)
                .into_iter()
                .map(|a| partial_zeta_q(a, f, n).unwrap())
                .sum();
            let l = l_value(n, trivial, &arith::prime_divisors(f)).unwrap();
            assert_eq!(CyclotomicNumber::from_rational(1, total), l, "f={f} n={n}");
        }
    }
}

#[test]
fn character_orthogonality_up_to_60() {
    for f in (1..=60u64).filter(|f| f % 4 != 2) {
        let field = AbelianFieldSpec::cyclotomic(f).unwrap();
        let chars = enumerate_characters(&field);
        assert_eq!(chars.len(), field.degree());
        for (i, chi) in chars.iter().enumerate() {
            for (j, psi) in chars.iter().enumerate() {
                let m = arith::lcm(chi.order(), psi.order());
                let terms = field.elements().iter().map(|&a| {
                    let x = chi.exponent(a).unwrap() * (m / chi.order());
                    let y = psi.exponent(a).unwrap() * (m / psi.order());
                    ((x + m - y % m) % m, rat_int(1))
                });
                let sum = CyclotomicNumber::from_exponents(m, terms);
                let expected = if i == j { field.degree() as i64 } else { 0 };
                assert_eq!(
                    sum,
                    CyclotomicNumber::from_rational(1, rat_int(expected)),
                    "f={f}"
                );
            }
        }
    }
}

#[test]
fn provider_is_deterministic() {
    let first: Vec<String> = (1..=12u64)
        .map(|a| arith::format_rational(&partial_zeta_q(a, 13, 3).unwrap()))
        .collect();
    let second: Vec<String> = (1..=12u64)
        .map(|a| arith::format_rational(&partial_zeta_q(a, 13, 3).unwrap()))
        .collect();
    assert_eq!(first, second);
}
