use padic_core::{Character, Matrix, Padic, Qp, Ring, Trunc};
use periods::*;
use phigamma::*;
use proptest::prelude::*;
use robba::{t_element, RobbaElement, W};

fn qp3() -> Qp {
    Qp::new(3, 30)
}

fn frame() -> Frame {
    Frame::default_for(3, 12)
}

fn pchar(n: i64, d: i64, weight: i64) -> Character<Padic> {
    Character::new(Trunc::constant(qp3().ratio(n, d), 1), weight)
}

fn r1(n: i64, d: i64, weight: i64) -> PhiGammaModule<Padic> {
    PhiGammaModule::rank1(&pchar(n, d, weight), frame()).unwrap()
}

fn eigencurve() -> PhiGammaModule<Padic> {
    r1(1, 1, 0).direct_sum(&r1(5, 9, -2)).unwrap()
}

fn like() -> Trunc<Padic> {
    Trunc::constant(qp3().one(), 1)
}

fn poly(c: &[i64]) -> RobbaElement<Padic> {
    let q = qp3();
    let f = frame();
    let terms: Vec<(i64, Trunc<Padic>)> = c.iter().enumerate().map(|(i, &x)| (i as i64, Trunc::constant(q.int(x), 1))).collect();
    RobbaElement::from_terms(&like(), f.ann, f.window, &terms)
}

/// L·U with L lower and U upper unitriangular polynomial matrices, so the
/// inverse is again polynomial.
fn unimodular(d: usize, seeds: &[i64]) -> Matrix<RobbaElement<Padic>> {
    let mut it = seeds.iter().cycle();
    let mut next = || -> Vec<i64> { (0..3).map(|_| *it.next().unwrap()).collect() };
    let mut lower = Matrix::identity(d, &poly(&[1]));
    let mut upper = Matrix::identity(d, &poly(&[1]));
    for i in 0..d {
        for j in 0..d {
            if i > j {
                lower.set(i, j, poly(&next()));
            } else if i < j {
                upper.set(i, j, poly(&next()));
            }
        }
    }
    lower * upper
}

fn residual_phi(d: &PhiGammaModule<Padic>, x: &[RobbaElement<Padic>], alpha: &Trunc<Padic>) -> Option<W> {
    let r: Vec<RobbaElement<Padic>> = d.apply_phi(x).into_iter().zip(x).map(|(a, b)| a - b.scale(alpha)).collect();
    r.iter().map(|e| e.w_true()).fold(None, robba::min_bound)
}

#[test]
fn threshold_examples() {
    let triv = r1(1, 1, 0);
    assert_eq!(slope_threshold(&pchar(5, 1, 0), &triv), 1);
    assert_eq!(slope_threshold(&pchar(1, 3, 0), &triv), 1);
    // relative to the slope -2 piece, δ(p) = 5 sits two steps up
    assert_eq!(slope_threshold(&pchar(5, 1, 0), &eigencurve()), 3);
    assert_eq!(slope_threshold(&pchar(5, 9, 0), &r1(1, 81, 0)), 3);
    let s = frobenius_slopes(&eigencurve());
    assert_eq!(s.len(), 2);
}

#[test]
fn rank_one_query() {
    let delta = pchar(2, 1, 1);
    let d = PhiGammaModule::rank1(&delta, frame()).unwrap();
    let s = solve_period(&d, &delta, 1, 1).unwrap();
    assert!(s.certified);
    assert_eq!((s.lower_bound, s.upper_bound), (1, 1));
    assert_eq!(s.t_orders, vec![0]);
    let x = &s.vectors[0][0];
    assert!(x.high_degree() <= 0 && !x.coeff(0).vanishes());
    assert_eq!(saturation_test(&d, &s.vectors[0], 1, 2).unwrap(), (true, 0));

    // t times a saturated vector
    let f = frame();
    let t = t_element(&like(), f.ann, f.window).unwrap();
    let tx = vec![t * x.clone()];
    assert_eq!(saturation_test(&d, &tx, 1, 3).unwrap(), (false, 1));
}

#[test]
fn eigencurve_pattern() {
    let d = eigencurve();
    let s = solve_period(&d, &pchar(5, 1, 0), 1, 3).unwrap();
    assert!(s.certified, "{s:?}");
    assert_eq!((s.lower_bound, s.upper_bound), (1, 1));
    // Γ-invariants see both e_1 and t^2 e_2; the Frobenius rules out e_1
    assert_eq!(s.invariants_rank, 2);
    assert_eq!(s.formal_rank, 1);
    assert_eq!(s.t_orders, vec![2]);
    assert_eq!(s.propagation, Some(true));
    let x = &s.vectors[0];
    assert!(x[0].is_zero_stored());
    assert_eq!(x[1].low_degree(), 2);
    assert_eq!(saturation_test(&d, x, 1, 3).unwrap(), (false, 2));
    assert!(s.residual_floor.unwrap() >= W::from_integer(10));

    // the other ordering: the weight-0 line is saturated
    let s1 = solve_period(&d, &pchar(1, 1, 0), 1, 3).unwrap();
    assert!(s1.certified);
    assert_eq!(s1.t_orders, vec![0]);

    let none = solve_period(&d, &pchar(7, 1, 0), 1, 3).unwrap();
    assert!(none.certified);
    assert_eq!((none.lower_bound, none.upper_bound), (0, 0));
    assert!(solve_period(&d, &pchar(5, 1, 0), 1, 2).is_err());
}

#[test]
fn level_out_of_range() {
    let d = eigencurve();
    assert!(matches!(solve_period(&d, &pchar(5, 1, 0), 5, 3), Err(PeriodError::LevelOutOfRange { .. })));
}

fn artinian_one(a0: i64, a1: i64) -> Trunc<Padic> {
    let q = qp3();
    Trunc::new(vec![q.int(a0), q.int(a1)])
}

#[test]
fn finite_slope_examples() {
    let delta = Character::new(artinian_one(1, 1), 0);
    let d = PhiGammaModule::rank1(&delta, frame()).unwrap();
    let ok = finite_slope_test(&d, &artinian_one(1, 1), 1, 1).unwrap();
    assert!(ok.isomorphism, "{ok:?}");
    assert_eq!((ok.eigenspace_dim, ok.invariants_dim), (2, 2));
    assert_eq!(ok.eigenspace_rank, 1);
    let bad = finite_slope_test(&d, &artinian_one(2, 0), 1, 1).unwrap();
    assert!(!bad.isomorphism);
    assert_eq!(bad.eigenspace_dim, 0);
    assert_eq!(bad.invariants_rank, 1);
    assert!(bad.witness.is_some());
    let triv = r1(1, 1, 0);
    for k in 1..=3 {
        assert!(finite_slope_test(&triv, &like(), 1, k).unwrap().isomorphism);
    }
}

#[test]
fn base_change_of_invariants() {
    // weights 0 and -3 over Q_3[z]/(z^2) with the second weight deformed
    let one = artinian_one(1, 0);
    let z = artinian_one(0, 1);
    let a = PhiGammaModule::rank1(&Character::new(one.clone(), 0), frame()).unwrap();
    let b = PhiGammaModule::rank1(&Character::new(artinian_one(2, 1), -3).with_nu(z), frame()).unwrap();
    let d = a.direct_sum(&b).unwrap();
    let triv = Character::trivial(&one);
    for k in 1..=3usize {
        let sen = d.sen(1).unwrap();
        let pk = sen.p_value(k).unwrap();
        if !pk.is_unit() {
            continue;
        }
        let big = d.dif_module(1, k).unwrap().gamma_invariants(&triv).unwrap();
        let small = d.reduce_base().dif_module(1, k).unwrap().gamma_invariants(&Character::trivial(&one.resize(1))).unwrap();
        assert_eq!(big.rank, small.rank, "k = {k}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn basis_change_equivariance(seeds in proptest::collection::vec(-3i64..4, 9), w in 1i64..4) {
        let d = r1(1, 1, 0).direct_sum(&r1(5, 9, -w)).unwrap();
        let u = unimodular(2, &seeds);
        let du = d.change_basis(&u).unwrap();
        let delta = pchar(5, 9, -w);
        let a = solve_period(&d, &delta, 1, 1).unwrap();
        let b = solve_period(&du, &delta, 1, 1).unwrap();
        prop_assert_eq!(a.certified, b.certified);
        prop_assert_eq!(&a.t_orders, &b.t_orders);
        prop_assert_eq!((a.lower_bound, a.upper_bound), (b.lower_bound, b.upper_bound));
        // U·x' is an eigenvector of the original presentation
        let y = u.apply(&b.vectors[0]);
        prop_assert!(residual_phi(&d, &y, &delta.p_value).map_or(true, |r| r >= W::from_integer(8)));
        prop_assert!(b.injective && b.propagation == Some(true));
    }

    #[test]
    fn twist_compatibility(n0 in prop::sample::select(vec![1i64, 2, 4, 5, 7]), e0 in -1i64..2, w0 in -2i64..3, w in 1i64..3) {
        let d = r1(1, 1, 0).direct_sum(&r1(5, 9, -w)).unwrap();
        let num = if e0 >= 0 { n0 * 3i64.pow(e0 as u32) } else { n0 };
        let den = if e0 < 0 { 3 } else { 1 };
        let d0 = pchar(num, den, w0);
        let dt = d.twist(&d0).unwrap();
        for delta in [pchar(1, 1, 0), pchar(5, 9, -w), pchar(5, 9 / 3i64.pow(w as u32).max(1), 0)] {
            let k = slope_threshold(&delta, &d).max(w as usize + 1);
            let a = solve_period(&d, &delta, 1, k).unwrap();
            let b = solve_period(&dt, &delta.mul(&d0), 1, k).unwrap();
            prop_assert_eq!(a.certified, b.certified);
            prop_assert_eq!(a.lower_bound, b.lower_bound);
            prop_assert_eq!(&a.t_orders, &b.t_orders);
        }
    }
}
