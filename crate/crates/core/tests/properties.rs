use binmat::catalog::build;
use binmat::detect::{canonical_form, find_induced, find_induced_by_flats, find_isomorphism, is_affine, is_isomorphic, odd_circuit_free, Detector};
use binmat::gf2::{closure, cosets, enumerate_flats, enumerate_flats_avoiding, gaussian_binomial, rank_of, stabilizer, Flat};
use binmat::search::{satisfies, Forcing, Generator, SearchSpec};
use binmat::verify::{run_claim, ClaimId, ClaimParams};
use binmat::{LinearMap, Matroid, PatternId, Point, PointSet};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn point_set() -> impl Strategy<Value = PointSet> {
    (1usize..=6).prop_flat_map(|n| {
        proptest::collection::vec(1u32..(1 << n), 0..20).prop_map(move |pts| PointSet::from_points(n, pts).unwrap())
    })
}

fn matroid_upto(max_n: usize) -> impl Strategy<Value = Matroid> {
    (1usize..=max_n).prop_flat_map(|n| proptest::collection::vec(1u32..(1 << n), 0..24).prop_map(move |pts| Matroid::new(n, pts).unwrap()))
}

fn matroid_with_flat(max_n: usize) -> impl Strategy<Value = (Matroid, Flat)> {
    (2usize..=max_n).prop_flat_map(|n| {
        (
            proptest::collection::vec(1u32..(1 << n), 0..24),
            proptest::collection::vec(1u32..(1 << n), 0..n),
        )
            .prop_map(move |(pts, gens)| (Matroid::new(n, pts).unwrap(), Flat::span(n, gens)))
    })
}

fn xor_closed(s: &PointSet) -> bool {
    s.iter().all(|x| s.iter().all(|y| x == y || s.contains(x ^ y)))
}

#[test]
fn closure_laws_exhaustive_up_to_three() {
    for n in 1..=3usize {
        let np = (1u32 << n) - 1;
        let sets: Vec<PointSet> = (0u32..1 << np).map(|m| PointSet::from_points(n, (1..=np).filter(|&q| m >> (q - 1) & 1 == 1)).unwrap()).collect();
        for s in &sets {
            let c = closure(s);
            assert!(s.is_subset(c.members()));
            assert_eq!(&closure(c.members()), &c);
            for t in &sets {
                if s.is_subset(t) {
                    assert!(c.members().is_subset(closure(t).members()));
                }
            }
        }
    }
}

#[test]
fn flat_counts_exhaustive() {
    for n in 1..=6usize {
        for k in 0..=n {
            assert_eq!(BigUint::from(enumerate_flats(n, k).count()), gaussian_binomial(n, k), "n={n} k={k}");
        }
        for dk in 0..=3.min(n) {
            for d in enumerate_flats(n, dk).step_by(7).take(3) {
                for l in 0..=n - dk {
                    let expected = gaussian_binomial(n - dk, l) * (BigUint::from(1u8) << (dk * l));
                    assert_eq!(BigUint::from(enumerate_flats_avoiding(n, l, &d).count()), expected, "n={n} D={d:?} l={l}");
                }
            }
        }
    }
}

#[test]
fn catalog_predicates() {
    for k in 0..=1 {
        let dk = build(PatternId::DoubledKite(k)).unwrap();
        let claw = build(PatternId::I(3)).unwrap().double_k(k + 1);
        let c6 = build(PatternId::C(6)).unwrap().double_k(k);
        assert!(Detector::from_matroid(&claw).find(&dk).is_some(), "dkite{k} lacks D^{}(I3)", k + 1);
        assert!(Detector::from_matroid(&c6).find(&dk).is_some(), "dkite{k} lacks D^{k}(C6)");
    }
    for r in 1..=6 {
        for t in 1..=3.min(r) {
            let m = build(PatternId::Mrt(r, t)).unwrap();
            assert!(find_induced(&m, PatternId::I(t + 1)).unwrap().is_none(), "M{r},{t} has I{}", t + 1);
        }
    }
    for d in 1..=5 {
        assert!(is_affine(&build(PatternId::AG(d)).unwrap()));
    }
    for k in 3..=7 {
        let c = build(PatternId::C(k)).unwrap();
        assert_eq!(c.points().iter().fold(0, |a, &x| a ^ x), 0);
        assert_eq!(c.rank(), k - 1);
    }
    for k in 1..=6 {
        let i = build(PatternId::I(k)).unwrap();
        assert_eq!(i.rank(), k);
        assert_eq!(i.len(), k);
        assert_eq!(closure(i.ground()).members().intersection_len(i.ground()), k);
    }
    let tri = build(PatternId::Triangle).unwrap();
    assert_eq!(build(PatternId::TwoT).unwrap(), tri.direct_sum(&tri));
}

#[test]
fn detectors_agree_on_random_matroids_n5_n6() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pats = [PatternId::Triangle, PatternId::I(3), PatternId::C(4), PatternId::C(5), PatternId::AG(3), PatternId::I(4)];
    for n in [5usize, 6] {
        let dets: Vec<(Detector, Matroid)> = pats.iter().map(|&p| (Detector::new(p).unwrap(), build(p).unwrap())).collect();
        for _ in 0..10_000 {
            let density = rng.gen_range(0.05..0.4);
            let m = Matroid::new(n, (1..1u32 << n).filter(|_| rng.gen_bool(density))).unwrap();
            for (d, pm) in &dets {
                assert_eq!(d.find(&m).is_some(), find_induced_by_flats(&m, pm).is_some(), "{} on {:?}", d.label(), m.points());
            }
        }
    }
}

#[test]
fn odd_circuits_of_i5_triangle_free_matroids_have_length_five() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for n in [6usize, 7] {
        let mut spec = SearchSpec::new(n, vec![PatternId::I(5), PatternId::Triangle]);
        spec.max_dim = n;
        let gen = Generator::new(&spec).unwrap();
        for _ in 0..40 {
            let target = rng.gen_range(n..=3 * n);
            let Some(m) = gen.generate(&mut rng, target, None).unwrap() else { continue };
            assert!(satisfies(&m, &[PatternId::I(5), PatternId::Triangle], false).unwrap());
            for k in (7..=n + 1).step_by(2) {
                assert!(find_induced(&m, PatternId::C(k)).unwrap().is_none(), "C{k} in {:?}", m.points());
            }
            checked += 1;
        }
    }
    assert!(checked >= 20, "only {checked} samples");
}

#[test]
fn generator_outputs_meet_hypotheses() {
    let c5 = build(PatternId::C(5)).unwrap();
    let forb = vec![PatternId::I(5), PatternId::Triangle];
    let mut spec = SearchSpec::new(7, forb.clone()).full_rank();
    spec.max_dim = 7;
    let gen = Generator::new(&spec).unwrap();
    let forcing = Forcing::on_leading_coordinates(c5.clone(), 7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut hits = 0;
    for _ in 0..30 {
        let target = rng.gen_range(15..=24);
        if let Some(m) = gen.generate(&mut rng, target, Some(&forcing)).unwrap() {
            assert_eq!(m.len(), target);
            assert!(satisfies(&m, &forb, true).unwrap());
            assert!(is_isomorphic(&m.restrict(&forcing.flat).unwrap(), &c5));
            hits += 1;
        }
    }
    assert!(hits > 0);
}

#[test]
fn sampled_claims_are_reproducible() {
    let p = ClaimParams::default().trials(40).seed(9);
    let a = run_claim(ClaimId::C5Contr, &p).unwrap();
    let b = run_claim(ClaimId::C5Contr, &p).unwrap();
    assert_eq!((a.status, a.samples, a.hypothesis_hits, a.trials), (b.status, b.samples, b.hypothesis_hits, b.trials));
    assert_eq!(a.detail, b.detail);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closure_is_extensive_idempotent_monotone(s in point_set(), extra in proptest::collection::vec(1u32..64, 0..6)) {
        let n = s.dim();
        let c = closure(&s);
        prop_assert!(s.is_subset(c.members()));
        prop_assert_eq!(&closure(c.members()), &c);
        let mut t = s.clone();
        for x in extra {
            if x < 1 << n {
                t.insert(x);
            }
        }
        prop_assert!(c.members().is_subset(closure(&t).members()));
        prop_assert_eq!(rank_of(&s), c.dim());
    }

    #[test]
    fn flats_are_xor_closed(s in point_set()) {
        let f = closure(&s);
        prop_assert_eq!(f.members().len(), (1usize << f.dim()) - 1);
        prop_assert!(xor_closed(f.members()));
    }

    #[test]
    fn cosets_partition_with_the_flat(s in point_set()) {
        let f = closure(&s);
        let n = f.ambient_dim();
        let mut seen = f.members().clone();
        for c in cosets(&f) {
            prop_assert_eq!(c.len(), 1usize << f.dim());
            prop_assert!(seen.is_disjoint(&c));
            seen = seen.union(&c);
        }
        prop_assert_eq!(seen.len(), (1usize << n) - 1);
    }

    #[test]
    fn stabilizer_is_a_flat(s in point_set(), gens in proptest::collection::vec(1u32..64, 0..4)) {
        let n = s.dim();
        let w = Flat::span(n, gens.into_iter().filter(|&g| g < 1 << n));
        let st = stabilizer(&s, &w);
        prop_assert!(xor_closed(st.flat.members()));
        prop_assert!(st.flat.members().is_subset(w.members()));
        if !s.is_empty() {
            for t in st.flat.members().iter() {
                prop_assert_eq!(s.translate(t), Some(s.clone()));
            }
        }
    }

    #[test]
    fn contraction_laws((m, f) in matroid_with_flat(6)) {
        prop_assume!(f.dim() < m.dim());
        let c = m.contract(&f).unwrap();
        prop_assert_eq!(c.dim(), m.dim() - f.dim());
        let meeting = cosets(&f).iter().filter(|a| !a.is_disjoint(m.ground())).count();
        prop_assert_eq!(c.len(), meeting);
    }

    #[test]
    fn doubling_laws(m in matroid_upto(5), k in 1usize..=2) {
        let d = m.double_k(k);
        prop_assert_eq!(d.len(), m.len() << k);
        let n = m.dim();
        let apex = Flat::span(n + k, (n..n + k).map(|i| 1u32 << i));
        prop_assert!(is_isomorphic(&d.contract(&apex).unwrap(), &m));
    }

    #[test]
    fn direct_sum_laws(a in matroid_upto(4), b in matroid_upto(4)) {
        let s = a.direct_sum(&b);
        prop_assert_eq!(s.len(), a.len() + b.len());
        prop_assert_eq!(s.rank(), a.rank() + b.rank());
    }

    #[test]
    fn restriction_to_the_span_is_full_rank(m in matroid_upto(6)) {
        prop_assume!(!m.is_empty());
        let r = m.restrict(&closure(m.ground())).unwrap();
        prop_assert!(r.is_full_rank());
        prop_assert_eq!(r.len(), m.len());
    }

    #[test]
    fn spanning_sets_normalize_to_contain_the_unit_basis(m in matroid_upto(6)) {
        prop_assume!(m.is_full_rank());
        // a basis inside E, sent to the unit vectors
        let mut basis: Vec<Point> = Vec::new();
        for p in m.points() {
            if rank_of(&PointSet::from_points(m.dim(), basis.iter().copied().chain([p])).unwrap()) > basis.len() {
                basis.push(p);
            }
        }
        let phi = LinearMap::new(basis, m.dim()).unwrap().inverse().unwrap();
        let img = m.map(&phi);
        for i in 0..m.dim() {
            prop_assert!(img.contains(1 << i));
        }
        prop_assert_eq!(canonical_form(&img), canonical_form(&m));
    }

    #[test]
    fn isomorphism_is_an_equivalence_matching_canonical_forms(a in matroid_upto(5), b in matroid_upto(5), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = LinearMap::random_invertible(a.dim(), &mut rng);
        let a2 = a.map(&phi);
        prop_assert!(is_isomorphic(&a, &a));
        prop_assert!(is_isomorphic(&a, &a2) && is_isomorphic(&a2, &a));
        let iso = is_isomorphic(&a, &b);
        prop_assert_eq!(iso, is_isomorphic(&b, &a));
        prop_assert_eq!(iso, canonical_form(&a) == canonical_form(&b));
        if let Some(psi) = find_isomorphism(&a, &b) {
            prop_assert_eq!(a.map(&psi), b.clone());
        }
    }

    #[test]
    fn affine_iff_odd_circuit_free(m in matroid_upto(5)) {
        prop_assert_eq!(is_affine(&m), odd_circuit_free(&m));
    }
}
