use std::collections::HashMap;

use hahn::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use padic_core::{Padic, Q3, Qp, Ring, Trunc};
use proptest::prelude::*;

type H = HahnElement<Trunc<Q3>>;

fn s(n: i64, d: i64) -> Trunc<Q3> {
    Trunc::constant(Q3::new(n, d), 1)
}

fn like() -> Trunc<Q3> {
    s(1, 1)
}

fn h(terms: &[((i64, i64), (i64, i64))]) -> H {
    let t = terms.iter().map(|&((a, b), (c, d))| (rat(a, b), s(c, d))).collect();
    HahnElement::from_terms(3, 4, rat(1, 1), &like(), t).unwrap()
}

fn q_of(x: &Trunc<Q3>) -> BigRational {
    x.coeff(0).value().clone()
}

#[test]
fn arithmetic_examples() {
    let a = h(&[((1, 3), (1, 1))]);
    let b = h(&[((2, 3), (1, 1))]);
    assert_eq!(a.clone() * b, h(&[((1, 1), (1, 1))]));
    let z = h(&[]);
    assert_eq!(a.clone() + z, a);

    // Oracle: binomial expansion Σ C(3,k) u^{k/3}.
    let base = h(&[((1, 3), (1, 1)), ((0, 1), (1, 1))]);
    let cube = base.clone() * base.clone() * base;
    let mut c = BigInt::one();
    for k in 0..=3i64 {
        assert_eq!(q_of(&cube.coeff(&rat(k, 3))), BigRational::from_integer(c.clone()));
        c = c * BigInt::from(3 - k) / BigInt::from(k + 1);
    }
    assert_eq!(cube.support().len(), 4);
}

#[test]
fn denominator_bound_enforced() {
    let r = HahnElement::from_terms(3, 1, rat(1, 1), &like(), vec![(rat(1, 9), s(1, 1))]);
    assert!(matches!(r, Err(HahnError::DenominatorOverflow { .. })));
    let r = HahnElement::from_terms(3, 4, rat(1, 1), &like(), vec![(rat(1, 2), s(1, 1))]);
    assert!(matches!(r, Err(HahnError::DenominatorOverflow { .. })));
    let a = h(&[((1, 81), (1, 1))]);
    assert!(matches!(a.frob_inv(), Err(HahnError::DenominatorOverflow { .. })));
    assert_eq!(a.frob().frob_inv().unwrap(), a);
}

#[test]
fn norms() {
    let a = h(&[((-1, 1), (3, 1)), ((1, 3), (1, 9))]);
    assert_eq!(a.norm(&rat(1, 1)).unwrap(), Some(rat(-5, 3)));
    assert_eq!(a.norm(&rat(1, 2)).unwrap(), Some(rat(-11, 6)));
    assert!(a.norm(&rat(2, 1)).is_err());
    assert!(a.norm(&rat(0, 1)).is_err());
    assert_eq!(h(&[]).norm(&rat(1, 1)).unwrap(), None);
}

#[test]
fn frobenius_multiplies_exponents() {
    let a = h(&[((-1, 3), (2, 1)), ((5, 9), (1, 1))]);
    let f = a.frob();
    assert_eq!(f.support(), vec![rat(-1, 1), rat(5, 3)]);
    assert_eq!(f.radius(), &rat(1, 3));
    assert_eq!(f.norm(&rat(1, 3)).unwrap(), a.norm(&rat(1, 1)).unwrap());
}

/// Brute-force obstruction: scan m over a wide window and look exponents up.
fn oracle_obstruction(alpha: &BigRational, a: &[(BigRational, BigRational)], i: &BigRational) -> BigRational {
    let map: HashMap<BigRational, BigRational> = a.iter().cloned().collect();
    let mut acc = BigRational::zero();
    let three = BigRational::from_integer(BigInt::from(3));
    for m in -30i32..30 {
        let e = i / three.pow(m);
        if let Some(c) = map.get(&e) {
            acc += alpha.pow(-(m + 1)) * c;
        }
    }
    acc
}

#[test]
fn criterion_examples() {
    let alpha = s(1, 3);
    let pos = h(&[((1, 3), (5, 1)), ((2, 1), (1, 1))]);
    assert!(criterion_check(&alpha, &pos, 30).unwrap().obstructions.is_empty());

    let a = h(&[((-1, 1), (1, 1))]);
    let rep = criterion_check(&alpha, &a, 30).unwrap();
    assert_eq!(rep.obstructions.len(), 1);
    assert_eq!(q_of(&rep.obstructions[&rat(-1, 1)]), rat(3, 1));

    let a = h(&[((-1, 1), (1, 1)), ((-3, 1), (-9, 1))]);
    let rep = criterion_check(&alpha, &a, 30).unwrap();
    let data = vec![(rat(-1, 1), rat(1, 1)), (rat(-3, 1), rat(-9, 1))];
    for i in [rat(-1, 1), rat(-3, 1)] {
        let expect = oracle_obstruction(&rat(1, 3), &data, &i);
        assert_eq!(q_of(&rep.obstructions[&i]), expect);
    }
    assert_eq!(q_of(&rep.obstructions[&rat(-3, 1)]), rat(-18, 1));
}

#[test]
fn slope_violation() {
    let a = h(&[((1, 1), (1, 1))]);
    assert!(matches!(solve_frobenius(&s(1, 1), &a, 20), Err(HahnError::SlopeViolation { .. })));
    assert!(matches!(criterion_check(&s(3, 1), &a, 20), Err(HahnError::SlopeViolation { .. })));
}

#[test]
fn no_solution_reports_obstructions() {
    let a = h(&[((-1, 1), (1, 1))]);
    match solve_frobenius(&s(1, 3), &a, 20) {
        Err(HahnError::NoSolution { obstructions }) => assert_eq!(obstructions[0].0, "-1"),
        other => panic!("expected NoSolution, got {other:?}"),
    }
}

#[test]
fn solve_examples() {
    let alpha = s(1, 3);
    let (b, cert) = solve_frobenius(&alpha, &h(&[((0, 1), (2, 1))]), 20).unwrap();
    assert_eq!(b, h(&[((0, 1), (3, 1))]));
    assert!(cert.holds());
    assert_eq!(cert.residual_w_r, None);

    let (b, cert) = solve_frobenius(&alpha, &h(&[((1, 1), (1, 1))]), 20).unwrap();
    // b = −Σ_{m>=0} 3^{m+1} u^{3^m}, kept while the coefficient has valuation < 20 (plus the first negligible one).
    for m in 0..20u32 {
        let e = BigRational::from_integer(BigInt::from(3).pow(m));
        assert_eq!(q_of(&b.coeff(&e)), -BigRational::from_integer(BigInt::from(3).pow(m + 1)), "m = {m}");
    }
    assert_eq!(b.support().len(), 20);
    assert_eq!(b.radius(), &rat(3, 1));
    assert!(cert.holds(), "{cert:?}");
    assert_eq!(cert.c_bound, rat(-1, 1));
    assert_eq!(cert.norm_gap, Some(rat(-1, 1)));
    assert_eq!(cert.truncated_tail_val, Some(21));

    let (b, cert) = solve_frobenius(&alpha, &h(&[]), 20).unwrap();
    assert!(b.is_zero());
    assert!(cert.holds());
}

#[test]
fn constants_closed_form() {
    assert_eq!(frobenius_constants(3, &rat(1, 1), 1, -1), (rat(-2, 1), rat(-1, 1)));
    // Large radius: C_2 picks up r(1 − p^{−m}) for a few m.
    let (c1, c2) = frobenius_constants(3, &rat(9, 1), 1, -1);
    assert_eq!(c1, rat(-18, 1));
    assert_eq!(c2, rat(9, 1) * (rat(1, 1) - rat(1, 9)) - rat(3, 1));
}

#[test]
fn unramified_coefficients() {
    let one = Trunc::constant(Q3::int(1), 1);
    let x = Unramified::basis(one.clone(), 3, 2, 1);
    assert_eq!(x.frob().frob(), x);
    assert_ne!(x.frob(), x);
    let a = HahnElement::from_terms(
        3,
        2,
        rat(1, 1),
        &x,
        vec![(rat(0, 1), x.clone()), (rat(1, 1), x.clone()), (rat(-3, 1), x.frob()), (rat(-1, 1), x.scale(&s(-1, 3)))],
    )
    .unwrap();
    let alpha = s(1, 3);
    let (b, cert) = solve_frobenius(&alpha, &a, 25).unwrap();
    assert!(cert.holds(), "{cert:?}");
    // Negative part of the solution is x·u^{-1}, by construction of a.
    assert_eq!(b.coeff(&rat(-1, 1)), x);
    assert!(b.coeff(&rat(-3, 1)).vanishes());
    let residual = b.frob() - b.scale(&alpha) - a;
    for (i, c) in residual.terms() {
        assert!(*i > rat(0, 1));
        assert!(c.valuation().unwrap() >= 25);
    }
}

#[test]
fn padic_solver_matches_exact() {
    let k = Qp::new(3, 30);
    let pl = Trunc::constant(k.one(), 1);
    let ps = |n: i64, d: i64| Trunc::constant(k.ratio(n, d), 1);
    let a = HahnElement::from_terms(3, 2, rat(1, 2), &pl, vec![(rat(1, 3), ps(2, 5)), (rat(0, 1), ps(7, 1))]).unwrap();
    let (b, cert) = solve_frobenius(&ps(1, 9), &a, 30).unwrap();
    assert!(cert.holds(), "{cert:?}");
    let exact = HahnElement::from_terms(3, 2, rat(1, 2), &like(), vec![(rat(1, 3), s(2, 5)), (rat(0, 1), s(7, 1))]).unwrap();
    let (be, _) = solve_frobenius(&s(1, 9), &exact, 30).unwrap();
    for (i, c) in be.terms() {
        let approx: Padic = b.coeff(i).coeff(0).clone();
        let e = k.rational(c.coeff(0).value());
        assert!((approx - e).vanishes(), "exponent {i}");
    }
}

#[test]
fn text_roundtrip() {
    let a = HahnElement::parse(3, 2, rat(1, 1), &like(), "[(-1/3, 2), (0, 5/7), (3, -1)]").unwrap();
    assert_eq!(a, h(&[((-1, 3), (2, 1)), ((0, 1), (5, 7)), ((3, 1), (-1, 1))]));
    assert!(HahnElement::parse(3, 2, rat(1, 1), &like(), "[(1/2, 1)]").is_err());
    assert!(HahnElement::parse(3, 2, rat(1, 1), &like(), "[(x, 1)]").is_err());
}

fn arb_terms() -> impl Strategy<Value = Vec<((i64, i64), (i64, i64))>> {
    prop::collection::vec(((-27i64..28, prop::sample::select(vec![1i64, 3, 9])), (-30i64..30, prop::sample::select(vec![1i64, 2, 5, 3]))), 0..5)
}

fn arb_alpha() -> impl Strategy<Value = Trunc<Q3>> {
    (prop::sample::select(vec![3i64, 9, 27]), prop::sample::select(vec![1i64, 2, 4, 5, 7, -1]))
        .prop_map(|(d, n)| s(n, d))
}

fn with_r(x: H, r: BigRational) -> H {
    x.with_radius(r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unique_solution_recovered(bt in arb_terms(), alpha in arb_alpha()) {
        let b = h(&bt);
        let a = with_r(b.frob() - b.scale(&alpha), rat(1, 1));
        let (sol, cert) = solve_frobenius(&alpha, &a, 40).unwrap();
        prop_assert_eq!(sol, b);
        prop_assert!(cert.holds());
    }

    #[test]
    fn norm_bound_and_residual(bt in arb_terms(), pt in arb_terms(), alpha in arb_alpha(), rn in 1i64..12) {
        let r = rat(rn, 4);
        let b = h(&bt);
        let extra: Vec<_> = pt.into_iter().map(|((i, d), c)| ((i.abs() + 1, d), c)).collect();
        let a = with_r(b.frob() - b.scale(&alpha) + h(&extra), r);
        let (_, cert) = solve_frobenius(&alpha, &a, 40).unwrap();
        prop_assert!(cert.residual_ok(), "{:?}", cert);
        prop_assert!(cert.bound_ok(), "{:?}", cert);
    }

    #[test]
    fn trivial_kernel(bt in arb_terms(), alpha in arb_alpha()) {
        let b = h(&bt);
        prop_assume!(!b.is_zero());
        prop_assert!(!(b.frob() - b.scale(&alpha)).is_zero());
    }

    #[test]
    fn linearity(b1 in arb_terms(), b2 in arb_terms(), p1 in arb_terms(), alpha in arb_alpha()) {
        let pos: Vec<_> = p1.into_iter().map(|((i, d), c)| ((i.abs() + 1, d), c)).collect();
        let x = h(&b1);
        let a1 = with_r(x.frob() - x.scale(&alpha) + h(&pos), rat(1, 1));
        let y = h(&b2);
        let a2 = with_r(y.frob() - y.scale(&alpha), rat(1, 1));
        let n = 30;
        let (s1, _) = solve_frobenius(&alpha, &a1, n).unwrap();
        let (s2, _) = solve_frobenius(&alpha, &a2, n).unwrap();
        let (s12, _) = solve_frobenius(&alpha, &(a1 + a2), n).unwrap();
        let d = s12 - s1 - s2;
        for (_, c) in d.terms() {
            prop_assert!(c.valuation().unwrap() >= n);
        }
    }
}
