use padic_core::{Character, Matrix, Padic, Qp, Ring, Trunc};
use phigamma::{Frame, PhiGammaModule};
use proptest::prelude::*;
use robba::{t_element, RobbaElement};
use triang::*;

fn q() -> Qp {
    Qp::new(3, 30)
}

fn frame() -> Frame {
    Frame::for_t_order(3, 1, 12, 6)
}

fn same(a: &Character<Padic>, b: &Character<Padic>) -> bool {
    a.weight == b.weight && (a.p_value.clone() - b.p_value.clone()).vanishes()
}

fn chr(n: i64, d: i64, w: i64) -> Character<Padic> {
    Character::new(Trunc::constant(q().ratio(n, d), 1), w)
}

fn ints(v: &[i64]) -> Vec<Padic> {
    v.iter().map(|&x| q().int(x)).collect()
}

#[test]
fn parameters_from_refinement() {
    let m = FilteredPhiModule::split(&ints(&[2, 45]), &[0, 3]).unwrap();
    let r = m.refinement(&ints(&[2, 45])).unwrap();
    assert_eq!(r.induced_jumps, vec![0, 3]);
    let p = refinement_parameters(&r);
    assert!(same(&p[0], &chr(2, 1, 0)));
    assert!(same(&p[1], &chr(5, 3, -3)));
    // δ_1δ_2(p) = det φ · p^{-(k_1 + k_2)}
    assert!(same(&p[0].mul(&p[1]), &chr(90, 27, -3)));

    let one = FilteredPhiModule::split(&ints(&[1]), &[0]).unwrap();
    let r1 = one.refinement(&ints(&[1])).unwrap();
    assert!(refinement_parameters(&r1)[0].is_trivial());
}

#[test]
fn classification() {
    let m = FilteredPhiModule::split(&ints(&[2, 45]), &[0, 3]).unwrap();
    let good = m.refinement(&ints(&[2, 45])).unwrap();
    let bad = m.refinement(&ints(&[45, 2])).unwrap();
    assert_eq!(m.classify(&good), Classification { noncritical: true, regular: true });
    assert_eq!(m.classify(&bad), Classification { noncritical: false, regular: true });
    assert_eq!(bad.induced_jumps, vec![3, 0]);
    // critical: the family parameters differ from the true ones
    assert!(!same(&family_parameters(&bad)[0], &refinement_parameters(&bad)[0]));
    assert!(same(&family_parameters(&good)[1], &refinement_parameters(&good)[1]));

    // Fil^3 spanned by e_1 + e_2 is transverse to both eigenlines
    let one = q().one();
    let fil = vec![Matrix::identity(2, &one), Matrix::from_rows(vec![vec![one.clone()], vec![one.clone()]])];
    let gen = FilteredPhiModule::new(Matrix::diag(&ints(&[2, 45])), vec![0, 3], fil).unwrap();
    for order in [[2, 45], [45, 2]] {
        let r = gen.refinement(&ints(&order)).unwrap();
        assert!(gen.classify(&r).noncritical);
        assert!(matches!(build_trianguline(&gen, &r, frame()), Err(TriangError::NotSplit(_))));
    }

    let four = FilteredPhiModule::split(&ints(&[1, 6, 2, 3]), &[0, 1, 2, 3]).unwrap();
    let r = four.refinement(&ints(&[1, 6, 2, 3])).unwrap();
    assert!(!four.classify(&r).regular);
    let r = four.refinement(&ints(&[1, 2, 3, 6])).unwrap();
    assert!(four.classify(&r).regular);

    let rep = FilteredPhiModule::split(&ints(&[2, 2]), &[0, 1]).unwrap();
    assert!(matches!(rep.refinement(&ints(&[2, 2])), Err(TriangError::RepeatedEigenvalues)));
    assert!(matches!(m.refinement(&ints(&[2, 7])), Err(TriangError::NotEigenvalue(1))));
    assert!(FilteredPhiModule::split(&ints(&[2, 45]), &[3, 3]).is_err());
}

#[test]
fn built_module() {
    let m = FilteredPhiModule::split(&ints(&[2, 45]), &[0, 3]).unwrap();
    let r = m.refinement(&ints(&[2, 45])).unwrap();
    let (d, chain) = build_trianguline(&m, &r, frame()).unwrap();
    let a = d.phi_constant_term();
    assert!((a.get(0, 0).coeff(0).clone() - q().int(2)).vanishes());
    assert!((a.get(1, 1).coeff(0).clone() - q().ratio(5, 3)).vanishes());
    assert!(a.get(0, 1).vanishes() && a.get(1, 0).vanishes());
    let c = d.chi_gamma0().clone();
    let g = d.gamma0_matrix();
    assert!((g.get(0, 0).coeff(0).coeff(0).clone() - q().one()).vanishes());
    let expect = c.pow_u(3).try_inv().unwrap();
    assert!((g.get(1, 1).coeff(0).coeff(0).clone() - expect).valuation().map_or(true, |v| v >= 20));
    assert!(same(&chain.characters[1], &chr(10, 3, -3)));

    // Sen weights −s_i
    let sen = d.sen(1).unwrap();
    let want = [0i64, 3, 1];
    for (c, w) in sen.sen_poly.iter().zip(want) {
        assert!((c.coeff(0).clone() - q().int(w)).valuation().map_or(true, |v| v >= 8), "{:?}", sen.sen_poly);
    }

    let one = FilteredPhiModule::split(&ints(&[7]), &[2]).unwrap();
    let r1 = one.refinement(&ints(&[7])).unwrap();
    let (d1, _) = build_trianguline(&one, &r1, frame()).unwrap();
    assert_eq!(d1.rank(), 1);
    let t = extract_triangulation(&d1, &build_trianguline(&one, &r1, frame()).unwrap().1, 1, 2).unwrap();
    assert_eq!(t.parameters.len(), 1);
    assert!(same(&t.parameters[0], &chr(7, 9, -2)));
}

#[test]
fn split_chains() {
    let eig = ints(&[1, 6, 45]);
    let m = FilteredPhiModule::split(&eig, &[0, 2, 6]).unwrap();
    let r = m.refinement(&eig).unwrap();
    let (d, chain) = build_trianguline(&m, &r, frame()).unwrap();
    let rep = chain_test(&d, &chain, 1, r.default_cutoff()).unwrap();
    assert!(rep.is_chain);
    assert_eq!(rep.t_orders, vec![0, 0, 0]);
    let t = extract_triangulation(&d, &chain, 1, r.default_cutoff()).unwrap();
    assert!(t.flag_stable);
    for (a, b) in t.parameters.iter().zip(refinement_parameters(&r)) {
        assert!(same(a, &b));
    }

    // a vector that is not an eigenvector is rejected
    let mut wrong = chain.clone();
    wrong.vectors[0].swap(0, 1);
    assert!(matches!(chain_test(&d, &wrong, 1, 4), Err(TriangError::NotEigenvector { index: 1, .. })));
    assert!(chain_test(&d, &chain, 4, 4).is_err());
}

#[test]
fn eigencurve_chain() {
    // D = R(1) ⊕ R(5/9, weight −2), refined by 5 first
    let eig = ints(&[5, 1]);
    let m = FilteredPhiModule::split(&ints(&[1, 5]), &[0, 2]).unwrap();
    let r = m.refinement(&eig).unwrap();
    assert!(!m.classify(&r).noncritical);
    let (d, _) = build_trianguline(&m, &r, frame()).unwrap();
    let fam = family_parameters(&r);
    assert!(same(&fam[0], &chr(5, 1, 0)));
    let k = default_cutoff(&d, &fam).unwrap();
    let (chain, orders) = solve_chain(&d, &fam, 1, k).unwrap();
    assert_eq!(orders, vec![2, 0]);
    let rep = chain_test(&d, &chain, 1, k).unwrap();
    assert!(!rep.is_chain);
    assert_eq!(rep.failure, Some(ChainFailure::Saturation { step: 1, t_order: 2 }));

    // explicit t^2·e_1 (e_1 is the 5/9-line in this ordering)
    let f = frame();
    let t = t_element(d.like(), f.ann, f.window).unwrap();
    let zero = RobbaElement::constant(d.like().zero_like(), d.like(), f.ann, f.window);
    let mut explicit = chain.clone();
    explicit.vectors[0] = vec![t.clone() * t, zero];
    let rep = chain_test(&d, &explicit, 1, k).unwrap();
    assert!(matches!(rep.failure, Some(ChainFailure::Saturation { step: 1, t_order: 2 })));

    // the noncritical ordering on the same module
    let good = m.refinement(&ints(&[1, 5])).unwrap();
    let (chain, orders) = solve_chain(&d, &refinement_parameters(&good), 1, k).unwrap();
    assert_eq!(orders, vec![0, 0]);
    let t = extract_triangulation(&d, &chain, 1, k).unwrap();
    assert!(same(&t.parameters[0], &chr(1, 1, 0)));
    assert!(same(&t.parameters[1], &chr(5, 9, -2)));
}

fn point(label: &str, eig: [i64; 2], weights: [i64; 2], order: [i64; 2]) -> ScanPoint<Padic> {
    let m = FilteredPhiModule::split(&ints(&eig), &weights).unwrap();
    let r = m.refinement(&ints(&order)).unwrap();
    let (d, _) = build_trianguline(&m, &r, frame()).unwrap();
    ScanPoint { label: label.into(), module: d, deltas: family_parameters(&r) }
}

#[test]
fn locus_partition() {
    // weight gap 4, eigenvalue α refined first; the critical point has the
    // α-line in Fil^4
    let pts = vec![
        point("v0", [2, 81 * 5], [0, 4], [2, 405]),
        point("v1", [6, 27 * 2], [0, 4], [6, 54]),
        point("v3", [27, 3 * 2], [0, 4], [27, 6]),
        point("critical", [2 * 81, 5], [4, 0], [162, 5]),
    ];
    let reps = locus_scan(&pts, 1, None);
    let labels: Vec<&str> = reps.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, ["v0", "v1", "v3", "critical"]);
    for r in &reps[..3] {
        assert_eq!(r.saturated, Some(true), "{r:?}");
        assert_eq!(r.chain, Some(true));
        assert!(r.parameters.is_some());
    }
    // slope 0 < 4: the criterion alone already decides
    assert_eq!(reps[0].criteria[0], Criterion::Unit);
    let c = &reps[3];
    assert_eq!(c.saturated, Some(false));
    assert_eq!(c.t_orders[0], 4);
    assert!(matches!(c.failure, Some(ChainFailure::Saturation { step: 1, .. })));
    assert!(!c.criteria[0].conclusive());

    // criterion silent, direct test saturated
    let silent = locus_scan(&[point("slope 3", [27, 6], [0, 4], [27, 6])], 1, None);
    assert_eq!(silent[0].saturated, Some(true));

    let triv = PhiGammaModule::rank1(&chr(1, 1, 0), frame()).unwrap();
    let pts: Vec<ScanPoint<Padic>> =
        (0..3).map(|i| ScanPoint { label: format!("p{i}"), module: triv.clone(), deltas: vec![chr(1, 1, 0)] }).collect();
    for r in locus_scan(&pts, 1, None) {
        assert_eq!((r.saturated, r.chain), (Some(true), Some(true)));
    }
}

fn refinement_case(eig_seed: &[(i64, u32)], weights: &[i64], perm: usize) -> Option<(FilteredPhiModule<Padic>, Refinement<Padic>)> {
    let d = weights.len();
    let eig: Vec<Padic> = eig_seed[..d].iter().map(|&(u, v)| q().int(u * 3i64.pow(v))).collect();
    let mut w = weights.to_vec();
    w.sort();
    w.dedup();
    if w.len() != d {
        return None;
    }
    let m = FilteredPhiModule::split(&eig, weights).ok()?;
    let ps = permutations(d);
    let order: Vec<Padic> = ps[perm % ps.len()].iter().map(|&i| eig[i].clone()).collect();
    let r = m.refinement(&order).ok()?;
    if !m.classify(&r).regular {
        return None;
    }
    Some((m, r))
}

fn units() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![1i64, 2, 4, 5, 7, 8, 10, 11, 13])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn round_trip(
        eig in proptest::collection::vec((units(), 0u32..5), 3),
        weights in proptest::collection::vec(0i64..7, 2..4),
        perm in 0usize..6,
        polys in proptest::collection::vec(proptest::collection::vec(-2i64..3, 1..3), 3),
    ) {
        let Some((m, r)) = refinement_case(&eig, &weights, perm) else { return Ok(()) };
        let (d, chain) = build_trianguline(&m, &r, frame()).unwrap();
        let k = r.default_cutoff();
        let coeffs: Vec<Vec<Padic>> = polys.iter().map(|v| ints(v)).collect();
        let s = unimodular(d.like(), frame(), d.rank(), &coeffs);
        let du = d.change_basis(&s.u).unwrap();
        let cu = transport(&chain, &s.u_inv);
        let want = refinement_parameters(&r);
        for (dd, cc) in [(&d, &chain), (&du, &cu)] {
            let t = extract_triangulation(dd, cc, 1, k).unwrap();
            prop_assert!(t.flag_stable);
            for (a, b) in t.parameters.iter().zip(&want) {
                prop_assert!(same(a, b));
            }
        }
        // scaling by units of S keeps the verdict
        let scaled = cu.scaled(&ints(&[2, 5, 7]).into_iter().map(|x| Trunc::constant(x, 1)).collect::<Vec<_>>());
        prop_assert!(chain_test(&du, &scaled, 1, k).unwrap().is_chain);
    }

    #[test]
    fn family_chains(
        eig in proptest::collection::vec((units(), 0u32..5), 3),
        weights in proptest::collection::vec(0i64..7, 2..4),
        perm in 0usize..6,
    ) {
        let Some((m, r)) = refinement_case(&eig, &weights, perm) else { return Ok(()) };
        let (d, _) = build_trianguline(&m, &r, frame()).unwrap();
        let fam = family_parameters(&r);
        let k = default_cutoff(&d, &fam).unwrap();
        let (chain, orders) = solve_chain(&d, &fam, 1, k).unwrap();
        let rep = chain_test(&d, &chain, 1, k).unwrap();
        let noncritical = m.classify(&r).noncritical;
        prop_assert_eq!(rep.is_chain, noncritical);
        if !noncritical {
            prop_assert!(rep.failure.as_ref().unwrap().is_saturation());
        }
        // t-order of the first generator is the jump mismatch s_1 − k_1
        prop_assert_eq!(orders[0] as i64, r.induced_jumps[0] - r.jumps[0]);
    }
}
