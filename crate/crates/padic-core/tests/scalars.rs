use num_bigint::BigInt;
use num_traits::{One, Zero};
use padic_core::*;
use proptest::prelude::*;

fn q3() -> Qp {
    Qp::new(3, 12)
}

#[test]
fn inverse_of_p_has_valuation_minus_one() {
    let k = q3();
    let x = k.int(3).checked_inv().unwrap();
    assert_eq!(x.val(), Some(-1));
    assert_eq!(x * k.int(3), k.one());
}

#[test]
fn addition_respects_absolute_precision() {
    let k = q3();
    let s = k.one() + k.p_pow(12);
    assert_eq!(s.prec(), 12);
    assert_eq!(s.to_string(), "1*p^0!12");
    assert!((s - k.one()).vanishes());
}

#[test]
fn valuation_of_45() {
    assert_eq!(q3().int(45).val(), Some(2));
}

#[test]
fn precision_exhaustion_is_reported() {
    let k = q3();
    // 3^7 + O(3^12) has five significant digits; its inverse would need
    // absolute precision 5 - 7 < 0.
    let x = Padic::from_parts(3, BigInt::from(1), 7, 12);
    assert_eq!(x.rel_prec(), 5);
    assert!(matches!(x.checked_inv(), Err(PadicError::PrecisionExhausted { .. })));
    assert!(matches!(k.zero().checked_inv(), Err(PadicError::DivisionByZero)));
}

#[test]
fn serialization_round_trip() {
    let k = q3();
    for x in [k.ratio(5, 9), k.int(-7), k.zero(), k.int(45)] {
        let s = x.to_string();
        let y = k.parse(&s).unwrap();
        assert_eq!(x, y, "{s}");
        assert_eq!(y.prec(), x.prec());
    }
    assert_eq!(k.parse("5 * 3^-2 ! 10").unwrap(), k.ratio(5, 9));
    assert!(k.parse("5*7^2!10").is_err());
    assert_eq!(k.int(-1).to_string(), "-1*p^0!12");
}

#[test]
fn log_and_exp_are_inverse_on_principal_units() {
    let k = Qp::new(5, 12);
    let x = k.int(5 * 7);
    let e = x.exp().unwrap();
    assert_eq!(e.log().unwrap(), x);
    // log kills roots of unity
    let w = k.teichmuller_generator();
    assert!(w.log().unwrap().vanishes());
    assert_eq!(w.pow_u(4), k.one());
    assert_ne!(w.pow_u(2), k.one());
}

#[test]
fn rational_oracle_agrees_with_fixed_precision() {
    let k = Qp::new(3, 20);
    let a = Q3::new(5, 9);
    let b = Q3::new(-7, 4);
    let pa = k.rational(a.value());
    let pb = k.rational(b.value());
    let prod = (a.clone() * b.clone() + a).to_rational().unwrap();
    assert_eq!(pa.clone() * pb + pa, k.rational(&prod));
}

#[test]
fn cyclotomic_reduction_examples() {
    let one = q3().one();
    let z = one.zero_like();
    let phi3 = Cyclo::reduce(&[one.clone(), one.clone(), one.clone()], &z, 3, 1);
    assert!(phi3.vanishes());
    let x3 = Cyclo::reduce(&[z.clone(), z.clone(), z.clone(), one.clone()], &z, 3, 1);
    assert!(x3.is_one());
    let c = q3().int(17);
    let r = Cyclo::reduce(&[c.clone()], &z, 3, 0);
    assert_eq!(r.coords(), &[c][..]);
}

/// Remainder of `a` modulo a monic `m` by schoolbook long division.
fn poly_rem(a: &[i64], m: &[i64]) -> Vec<i64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] -= lead * mi;
        }
        r.pop();
    }
    r
}

#[test]
fn cyclotomic_reduction_matches_long_division() {
    // Φ_9 = x^6 + x^3 + 1
    let phi9 = [1, 0, 0, 1, 0, 0, 1];
    let one = Rat::<3>::int(1);
    for e in 0..20usize {
        let mut a = vec![0i64; e + 1];
        a[e] = 1;
        a[0] += 2;
        let expect = poly_rem(&a, &phi9);
        let poly: Vec<Q3> = a.iter().map(|&x| Q3::int(x)).collect();
        let got = Cyclo::reduce(&poly, &one, 3, 2);
        let want: Vec<Q3> = (0..6).map(|i| Q3::int(*expect.get(i).unwrap_or(&0))).collect();
        assert_eq!(got.coords(), &want[..], "x^{e} + 2");
    }
}

#[test]
fn tower_embedding_sends_eps_to_eps_pth_power() {
    let one = Q3::int(1);
    let e1 = Cyclo::eps_pow(&one, 3, 1, 1);
    let e2 = Cyclo::eps_pow(&one, 3, 2, 1);
    assert_eq!(e1.embed_up(), e2.pow_u(3));
    let x = Cyclo::from_coords(vec![Q3::new(2, 5), Q3::int(7)], 3, 1);
    let y = Cyclo::from_coords(vec![Q3::int(-1), Q3::new(1, 3)], 3, 1);
    assert_eq!((x.clone() * y.clone()).embed_up(), x.embed_up() * y.embed_up());
}

#[test]
fn cyclotomic_inverse_and_galois() {
    let one = Q5::int(1);
    let x = Cyclo::from_coords(vec![Q5::int(1), Q5::int(2), Q5::new(3, 5), Q5::int(0)], 5, 1);
    let inv = x.try_inv().unwrap();
    assert!((x.clone() * inv).is_one());
    let y = Cyclo::eps_pow(&one, 5, 1, 3) + x.clone();
    for a in [2, 3, 4] {
        assert_eq!(x.galois(a) * y.galois(a), (x.clone() * y.clone()).galois(a));
    }
    assert_eq!(x.galois(2).galois(3), x.galois(6));
}

fn cofactor_det(m: &Matrix<Q5>) -> Q5 {
    let n = m.rows();
    if n == 1 {
        return m.get(0, 0).clone();
    }
    let mut acc = Q5::zero();
    for j in 0..n {
        let rows: Vec<usize> = (1..n).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
        let term = m.get(0, j).clone() * cofactor_det(&m.submatrix(&rows, &cols));
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn small_matrix(n: usize, seed: &[i64]) -> Matrix<Q5> {
    Matrix::from_fn(n, n, |i, j| Q5::new(seed[(i * n + j) % seed.len()], 1 + (i + 2 * j) as i64 % 3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_is_additive_and_ultrametric(a in -5000i64..5000, b in -5000i64..5000, ea in -3i64..4, eb in -3i64..4) {
        prop_assume!(a != 0 && b != 0);
        let k = q3();
        let x = k.int(a).shift(ea);
        let y = k.int(b).shift(eb);
        prop_assert_eq!((x.clone() * y.clone()).val().unwrap(), x.val().unwrap() + y.val().unwrap());
        let s = x.clone() + y.clone();
        let (vx, vy) = (x.val().unwrap(), y.val().unwrap());
        if let Some(vs) = s.val() {
            prop_assert!(vs >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
        }
    }

    #[test]
    fn cyclo_ring_laws(c in proptest::collection::vec(-50i64..50, 18)) {
        let mk = |s: &[i64]| Cyclo::from_coords(s.iter().map(|&x| Q3::int(x)).collect(), 3, 2);
        let (x, y, z) = (mk(&c[0..6]), mk(&c[6..12]), mk(&c[12..18]));
        prop_assert_eq!((x.clone() * y.clone()) * z.clone(), x.clone() * (y.clone() * z.clone()));
        prop_assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
        prop_assert_eq!(x.clone() * (y.clone() + z.clone()), x.clone() * y + x * z);
    }

    #[test]
    fn padic_cyclo_matches_rational_oracle(c in proptest::collection::vec(-50i64..50, 4)) {
        let k = Qp::new(3, 30);
        let x = Cyclo::from_coords(vec![Q3::int(c[0]), Q3::new(c[1], 3)], 3, 1);
        let y = Cyclo::from_coords(vec![Q3::int(c[2]), Q3::int(c[3])], 3, 1);
        let to_p = |v: &Cyclo<Q3>| v.map(|a| k.rational(a.value()));
        let exact = x.clone() * y.clone();
        prop_assert_eq!(to_p(&x) * to_p(&y), to_p(&exact));
    }

    #[test]
    fn berkowitz_matches_cofactor_expansion(seed in proptest::collection::vec(-9i64..9, 9), n in 1usize..4) {
        let m = small_matrix(n, &seed);
        prop_assert_eq!(m.det(), cofactor_det(&m));
        // Cayley–Hamilton
        let cp = m.charpoly();
        let mut acc = Matrix::zeros(n, n, &Q5::zero());
        let mut pw = Matrix::identity(n, &Q5::one());
        for c in &cp {
            acc = acc + pw.scale(c);
            pw = pw * m.clone();
        }
        prop_assert!(acc.vanishes());
    }

    #[test]
    fn compound_matrices_are_multiplicative(s1 in proptest::collection::vec(-9i64..9, 9), s2 in proptest::collection::vec(-9i64..9, 9), i in 1usize..4) {
        let a = small_matrix(3, &s1);
        let b = small_matrix(3, &s2);
        prop_assert_eq!((a.clone() * b.clone()).compound(i), a.compound(i) * b.compound(i));
    }

    #[test]
    fn character_group_laws(a in 1i64..80, b in 1i64..80, k1 in -4i64..5, k2 in -4i64..5, u in 1i64..200) {
        prop_assume!(a % 3 != 0 && b % 3 != 0 && u % 3 != 0);
        let k = q3();
        let s = |x: Padic| Trunc::constant(x, 2);
        let d1 = Character::new(s(k.int(a).shift(1)), k1);
        let d2 = Character::new(s(k.ratio(b, 9)), k2).with_nu(Trunc::new(vec![k.zero(), k.int(a)]));
        let uu = k.int(u);
        let prod = d1.mul(&d2);
        prop_assert_eq!(prod.eval(&uu, 1).unwrap(), d1.eval(&uu, 1).unwrap() * d2.eval(&uu, 1).unwrap());
        prop_assert_eq!(prod.eval(&uu, -2).unwrap(), d1.eval(&uu, -2).unwrap() * d2.eval(&uu, -2).unwrap());
        prop_assert!(d2.mul(&d2.inv()).is_trivial());
        // multiplicativity in the argument
        let v = k.int(u + 3);
        prop_assert_eq!(d2.eval(&(uu.clone() * v.clone()), 0).unwrap(), d2.eval(&uu, 0).unwrap() * d2.eval(&v, 0).unwrap());
    }
}

#[test]
fn character_examples() {
    let k = q3();
    let s = |x: Padic| Trunc::constant(x, 1);
    let d = Character::new(s(k.int(5)), 0);
    assert_eq!(d.eval(&k.one(), 1).unwrap(), s(k.int(5)));
    let d = Character::new(s(k.one()), 2);
    assert_eq!(d.eval_unit(&k.int(4)).unwrap(), s(k.int(16)));
    assert!(matches!(d.eval_unit(&k.int(3)), Err(PadicError::NonUnitArgument)));
}

#[test]
fn linear_algebra_kernel_and_inverse() {
    let m = Matrix::from_rows(vec![
        vec![Q3::int(1), Q3::int(2), Q3::int(3)],
        vec![Q3::int(2), Q3::int(4), Q3::int(6)],
        vec![Q3::int(0), Q3::int(1), Q3::new(1, 3)],
    ]);
    let ker = linalg::kernel(&m);
    assert_eq!(ker.len(), 1);
    assert!(m.apply(&ker[0]).iter().all(|x| x.is_zero()));
    assert!(linalg::inverse(&m).is_none());
    let a = Matrix::from_rows(vec![vec![Q3::int(3), Q3::int(1)], vec![Q3::int(1), Q3::int(1)]]);
    let ai = linalg::inverse(&a).unwrap();
    assert_eq!(a * ai, Matrix::identity(2, &Q3::int(1)));
}

#[test]
fn newton_polygon_of_eigenvalues() {
    // (X - 3)(X - 1/9)(X - 5) has root valuations 1, -2, 0
    let k = q3();
    let roots = [k.int(3), k.ratio(1, 9), k.int(5)];
    let mut poly = vec![k.one()];
    for r in &roots {
        let mut next = vec![k.zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = next[i + 1].clone() + c.clone();
            next[i] = next[i].clone() - c.clone() * r.clone();
        }
        poly = next;
    }
    let mut vals: Vec<i64> = newton::root_valuations(&poly).into_iter().map(|v| v.unwrap().to_integer()).collect();
    vals.sort();
    assert_eq!(vals, vec![-2, 0, 1]);
}

#[test]
fn big_exact_integers_stay_exact() {
    let x = Padic::from_bigint(5, BigInt::from(10).pow(30), padic_core::EXACT);
    assert_eq!(x.val(), Some(30));
    assert!(x.is_exact());
    assert!(!BigInt::one().is_zero());
}
