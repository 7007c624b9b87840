use std::sync::Arc;

use geomext::cellposet::build::{self, simplex, sphere};
use geomext::cellposet::{CellComplex, OpenSet};
use geomext::ksengine::{
    decompose, decompose_with, dense_part, end_algebra, iso_test, lift_iso_on_dense, split_idempotent, Algebra,
    IsoResult, KsRing, LocalCertificate, SplitSearch,
};
use geomext::shcomplex::{ChainMap, GradedDims, InjComplex, RepComplex};
use geomext::sixfunctors::{constant_sheaf, pushforward_constant};
use geomext::{ModRing, Rationals, Ring};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f2() -> ModRing {
    ModRing::prime_field(2).unwrap()
}

fn f5() -> ModRing {
    ModRing::prime_field(5).unwrap()
}

fn z4() -> ModRing {
    ModRing::new(2, 2).unwrap()
}

/// The algebra spanned by the given matrix units `E_ij` of `M_n`.
fn matrix_unit_algebra<K: geomext::ksengine::SplitField>(k: &K, n: usize, units: &[(usize, usize)]) -> Algebra<K> {
    let idx = |p: (usize, usize)| units.iter().position(|&u| u == p);
    let m = units.len();
    let table = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    let (i, j) = units[a];
                    let (j2, l) = units[b];
                    let mut v = vec![k.zero(); m];
                    if j == j2 {
                        v[idx((i, l)).expect("closed")] = k.one();
                    }
                    v
                })
                .collect()
        })
        .collect();
    let mut one = vec![k.zero(); m];
    for i in 0..n {
        one[idx((i, i)).unwrap()] = k.one();
    }
    Algebra::new(k, table, one).unwrap()
}

#[test]
fn radicals_of_small_algebras() {
    let full = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let m2 = matrix_unit_algebra(&f2(), 2, &full);
    assert!(m2.is_associative());
    assert!(m2.radical().unwrap().is_empty());
    let upper = [(0, 0), (0, 1), (1, 1)];
    for_upper(&matrix_unit_algebra(&f2(), 2, &upper));
    for_upper(&matrix_unit_algebra(&f5(), 2, &upper));
    for_upper(&matrix_unit_algebra(&Rationals, 2, &upper));
    // char 2 trace form degenerates on M_2 but the radical is still zero
    let m3 = matrix_unit_algebra(&f2(), 3, &[(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)]);
    assert!(m3.radical().unwrap().is_empty());
}

fn for_upper<K: geomext::ksengine::SplitField>(a: &Algebra<K>) {
    let j = a.radical().unwrap();
    assert_eq!(j.len(), 1);
    // spanned by E_01
    assert!(!a.ring().is_zero(&j[0][1]) && a.ring().is_zero(&j[0][0]) && a.ring().is_zero(&j[0][2]));
    assert!(a.is_zero(&a.mul(&j[0], &j[0])));
    let q = a.quotient(&j).unwrap();
    assert_eq!(q.algebra.dim(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    match q.algebra.find_split(&mut rng, 32).unwrap() {
        SplitSearch::Split(u) => assert!(q.algebra.is_idempotent(&u)),
        other => panic!("expected a split, got {other:?}"),
    }
}

#[test]
fn field_extensions_are_certified_local() {
    // F_2[x]/(x^2+x+1) with basis 1, x
    let k = f2();
    let table = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 1]]];
    let a = Algebra::new(&k, table, vec![1, 0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    assert!(a.radical().unwrap().is_empty());
    assert!(matches!(a.find_split(&mut rng, 32).unwrap(), SplitSearch::Division { degree: 2 }));
    // Q[x]/(x^2+1)
    let q = Rationals;
    let one = q.one();
    let z = q.zero();
    let m1 = q.from_i64(-1);
    let table = vec![vec![vec![one.clone(), z.clone()], vec![z.clone(), one.clone()]], vec![vec![z.clone(), one.clone()], vec![m1, z.clone()]]];
    let a = Algebra::new(&q, table, vec![one, z]).unwrap();
    assert!(matches!(a.find_split(&mut rng, 32).unwrap(), SplitSearch::Division { degree: 2 }));
}

#[test]
fn endomorphism_algebras() {
    let k = Arc::new(simplex(2));
    let one = constant_sheaf(&f2(), &k);
    assert_eq!(end_algebra(&one).unwrap().algebra.dim(), 1);
    let two = InjComplex::direct_sum(&[&one, &one]).unwrap();
    let e = end_algebra(&two).unwrap();
    assert_eq!(e.algebra.dim(), 4);
    assert!(e.algebra.is_associative());
    assert!(e.algebra.radical().unwrap().is_empty());
    // identity maps to the unit
    let s2 = Arc::new(sphere(2));
    let e = end_algebra(&constant_sheaf(&Rationals, &s2)).unwrap();
    assert_eq!(e.algebra.dim(), 1);
}

fn assert_certified<R: KsRing>(d: &geomext::ksengine::Decomposition<R>) {
    assert!(d.sum_is_identity && d.orthogonal && !d.undecided);
    for s in &d.summands {
        assert!(matches!(s.certificate, LocalCertificate::Field { .. }));
        s.inclusion.validate().unwrap();
        s.projection.validate().unwrap();
    }
}

#[test]
fn constant_sheaves_are_indecomposable() {
    let t = Arc::new(build::torus());
    let d = decompose(&constant_sheaf(&f2(), &t)).unwrap();
    assert_certified(&d);
    assert_eq!(d.len(), 1);
    let d = decompose(&constant_sheaf(&Rationals, &t)).unwrap();
    assert_certified(&d);
    assert_eq!(d.len(), 1);
    let d = decompose(&constant_sheaf(&z4(), &t)).unwrap();
    assert_certified(&d);
    assert_eq!(d.len(), 1);
}

#[test]
fn sums_with_shifts_split() {
    let k = Arc::new(build::rp2());
    let one = constant_sheaf(&f5(), &k);
    let c = InjComplex::direct_sum(&[&one, &one.shift(1), &one]).unwrap();
    let d = decompose(&c).unwrap();
    assert_certified(&d);
    assert_eq!(d.len(), 3);
    for s in &d.summands {
        assert_eq!(iso_test(&s.complex, &one).unwrap().is_iso(), s.complex.degrees() == one.degrees());
    }
}

fn product_projection<R: KsRing>(ring: &R) -> Vec<GradedDims> {
    let s2 = Arc::new(sphere(2));
    let b = Arc::new(simplex(1));
    let (_, _, pr) = build::product_with_maps(&s2, &b).unwrap();
    let push = pushforward_constant(ring, &pr).unwrap();
    let d = decompose(&push).unwrap();
    assert_certified(&d);
    let mut out: Vec<GradedDims> = d.summands.iter().map(|s| s.complex.stalk(0)).collect();
    out.sort_by_key(|g| g.degrees());
    for s in &d.summands {
        // each summand is a shifted constant sheaf on the base
        let stalk0 = s.complex.stalk(0);
        assert!((0..b.len()).all(|c| s.complex.stalk(c) == stalk0));
    }
    out
}

#[test]
fn trivial_family_splits_into_shifted_constants() {
    let want = vec![GradedDims::from_dims([(0, 1)]), GradedDims::from_dims([(2, 1)])];
    assert_eq!(product_projection(&f2()), want);
    assert_eq!(product_projection(&Rationals), want);
    let free_z4 = |n: i32| GradedDims { structure: [(n, vec![2])].into_iter().collect() };
    assert_eq!(product_projection(&z4()), vec![free_z4(0), free_z4(2)]);
}

#[test]
fn split_identity_and_zero() {
    let k = Arc::new(simplex(1));
    let one = constant_sheaf(&f2(), &k);
    let (a, b) = split_idempotent(&one, &ChainMap::identity(&one)).unwrap();
    assert_eq!(a.complex.len(), one.len());
    assert!(b.complex.is_empty());
}

fn shuffled<R: Ring, G: Rng>(c: &InjComplex<R>, rng: &mut G) -> InjComplex<R> {
    let mut perm: Vec<usize> = (0..c.len()).collect();
    perm.shuffle(rng);
    let r = c.ring();
    let scales: Vec<R::Elem> = (0..c.len())
        .map(|_| loop {
            let x = r.random(rng);
            if r.is_unit(&x) {
                break x;
            }
        })
        .collect();
    c.permuted(&perm, &scales)
}

fn krull_schmidt_round<R: KsRing>(ring: &R, k: &Arc<CellComplex>, rng: &mut ChaCha8Rng) {
    let c = RepComplex::random(ring, k.clone(), rng.gen_range(2..5), rng).unwrap().injective_model();
    let d1 = decompose_with(&c, rng.gen()).unwrap();
    let d2 = decompose_with(&shuffled(&c, rng), rng.gen()).unwrap();
    assert_certified(&d1);
    assert_certified(&d2);
    assert_eq!(d1.len(), d2.len());
    let mut used = vec![false; d2.len()];
    for s in &d1.summands {
        let j = (0..d2.len())
            .find(|&j| !used[j] && iso_test(&s.complex, &d2.summands[j].complex).unwrap().is_iso())
            .expect("summand without partner");
        used[j] = true;
    }
}

#[test]
fn krull_schmidt_uniqueness_on_random_complexes() {
    let k = Arc::new(build::rp2());
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..4 {
        krull_schmidt_round(&f2(), &k, &mut rng);
        krull_schmidt_round(&f5(), &k, &mut rng);
    }
}

#[test]
fn iso_test_examples() {
    let k = Arc::new(build::torus());
    let one = constant_sheaf(&f2(), &k);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    match iso_test(&one, &shuffled(&one, &mut rng)).unwrap() {
        IsoResult::Isomorphic { forward, backward } => {
            forward.validate().unwrap();
            backward.validate().unwrap();
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(iso_test(&one, &one.shift(1)).unwrap(), IsoResult::Distinct(_)));
    // skyscrapers at different vertices
    let rp = Arc::new(build::rp2());
    let a = RepComplex::constant_on(&f2(), rp.clone(), &[0]).unwrap().injective_model();
    let b = RepComplex::constant_on(&f2(), rp.clone(), &[1]).unwrap().injective_model();
    assert!(matches!(iso_test(&a, &b).unwrap(), IsoResult::Distinct(_)));
}

#[test]
fn dense_parts_and_lifting() {
    let k = Arc::new(simplex(1));
    let apex = 0;
    let e = constant_sheaf(&Rationals, &k);
    let sky = RepComplex::constant_on(&Rationals, k.clone(), &[apex]).unwrap().injective_model();
    let a = InjComplex::direct_sum(&[&e, &sky]).unwrap();
    let u = OpenSet::new(&k, k.cofaces(1).iter().copied()).unwrap();
    let d = decompose(&a).unwrap();
    assert_eq!(d.len(), 2);
    let dp = dense_part(&d, &u).unwrap();
    assert_eq!(dp.kept.len(), 1);
    assert!(dp.maximal);
    assert!(iso_test(&dp.part.complex, &e).unwrap().is_iso());
    // f: E ⊕ S → E the projection, g: E → E ⊕ S the inclusion
    let n = e.len();
    let f = ChainMap::from_columns(&a, &e, (0..a.len()).map(|g| if g < n { vec![(g, Rationals.one())] } else { vec![] }).collect());
    let g = ChainMap::from_columns(&e, &a, (0..n).map(|g| vec![(g, Rationals.one())]).collect());
    f.validate().unwrap();
    g.validate().unwrap();
    let iso = lift_iso_on_dense(&f, &g, &u).unwrap();
    assert_eq!(iso.forward.then(&iso.backward).unwrap().cols, ChainMap::identity(&iso.source_dense.complex).cols);
    // not an inverse pair over the whole space
    let all = OpenSet::all(&k);
    assert!(lift_iso_on_dense(&f, &g, &all).is_err());
}

