use std::collections::BTreeMap;
use std::sync::Arc;

use geomext::cellposet::build::{self, circle, cone, simplex, sphere};
use geomext::cellposet::homology::cohomology_dims;
use geomext::cellposet::{CellComplex, OpenSet};
use geomext::shcomplex::{ChainMap, GradedDims, InjComplex, RepComplex};
use geomext::{ModRing, Rationals, Ring};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f2() -> ModRing {
    ModRing::prime_field(2).unwrap()
}

fn as_dims(v: &[usize]) -> GradedDims {
    GradedDims::from_dims(v.iter().enumerate().map(|(i, &n)| (i as i32, n)))
}

fn random_open<G: Rng>(k: &CellComplex, rng: &mut G) -> OpenSet {
    let gens: Vec<usize> = (0..k.len()).filter(|_| rng.gen_bool(0.2)).collect();
    OpenSet::generated(k, gens)
}

#[test]
fn dual_of_constant_is_dualizing_complex() {
    let k = Arc::new(sphere(2));
    let one = RepComplex::constant(&Rationals, k.clone());
    let w = one.dual();
    w.validate().unwrap();
    assert_eq!(w.len(), k.len());
    // global sections compute Borel-Moore homology in negative degrees
    assert_eq!(
        w.hypercohomology(),
        GradedDims::from_dims([(-2, 1), (0, 1)])
    );
    // stalks of ω on a surface: rank one in degree -2
    for rho in 0..k.len() {
        assert_eq!(w.stalk(rho), GradedDims::from_dims([(-2, 1)]));
    }
}

#[test]
fn injective_model_of_constant_sheaf() {
    for k in [sphere(2), build::rp2(), build::torus()] {
        let k = Arc::new(k);
        for spec in [0u64, 2, 3] {
            let check = |stalks: Vec<GradedDims>, h: GradedDims, expected: Vec<usize>| {
                assert!(stalks.iter().all(|s| *s == GradedDims::from_dims([(0, 1)])));
                assert_eq!(h, as_dims(&expected));
            };
            if spec == 0 {
                let i = RepComplex::constant(&Rationals, k.clone()).injective_model();
                assert!(i.is_minimal());
                check(
                    (0..k.len()).map(|r| i.stalk(r)).collect(),
                    i.hypercohomology(),
                    cohomology_dims(&k, &Rationals),
                );
            } else {
                let r = ModRing::prime_field(spec).unwrap();
                let i = RepComplex::constant(&r, k.clone()).injective_model();
                check(
                    (0..k.len()).map(|x| i.stalk(x)).collect(),
                    i.hypercohomology(),
                    cohomology_dims(&k, &r),
                );
            }
        }
    }
}

#[test]
fn double_dual_on_random_complexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let k = Arc::new(sphere(2));
    for _ in 0..10 {
        let f = RepComplex::random(&f2(), k.clone(), 3, &mut rng).unwrap();
        f.validate().unwrap();
        let d = f.dual();
        d.validate().unwrap();
        let dd = d.minimize().dual();
        dd.validate().unwrap();
        for rho in 0..k.len() {
            assert_eq!(dd.stalk(rho), f.stalk(rho));
        }
    }
}

#[test]
fn sections_agree_with_chain_resolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let k = Arc::new(circle(4).unwrap());
    let r = ModRing::prime_field(3).unwrap();
    for _ in 0..10 {
        let f = RepComplex::random(&r, k.clone(), 3, &mut rng).unwrap();
        let inj = f.injective_model();
        for rho in 0..k.len() {
            assert_eq!(inj.stalk(rho), f.stalk(rho));
        }
        let u = random_open(&k, &mut rng);
        let a = GradedDims::from_structure(&inj.sections(&u).cohomology());
        let b = GradedDims::from_structure(&f.sections_by_chains(&u).cohomology());
        assert_eq!(a, b);
    }
}

#[test]
fn compact_sections_agree_with_extension_by_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let k = Arc::new(sphere(2));
    for _ in 0..6 {
        let f = RepComplex::random(&f2(), k.clone(), 2, &mut rng).unwrap();
        let u = random_open(&k, &mut rng);
        let a = GradedDims::from_structure(&f.compact_sections(&u).cohomology());
        let b = f
            .extend_by_zero(u.cells())
            .injective_model()
            .hypercohomology();
        assert_eq!(a, b);
    }
}

#[test]
fn compactly_supported_cohomology_of_open_cone() {
    // punctured open star of the apex: an open annulus
    let c = Arc::new(circle(3).unwrap());
    let (k, _, apex) = cone(&c).unwrap();
    let u = OpenSet::new(&k, k.cofaces(apex).iter().copied().filter(|&x| x != apex)).unwrap();
    let one = RepComplex::constant(&Rationals, k.clone());
    let h = GradedDims::from_structure(&one.compact_sections(&u).cohomology());
    assert_eq!(h, GradedDims::from_dims([(1, 1), (2, 1)]));
}

#[test]
fn truncation_keeps_low_stalks() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let k = Arc::new(simplex(2));
    for _ in 0..6 {
        let f = RepComplex::random(&Rationals, k.clone(), 4, &mut rng).unwrap();
        let t = f.truncate_le(0).unwrap();
        t.validate().unwrap();
        for rho in 0..k.len() {
            let full: BTreeMap<i32, usize> = f
                .stalk(rho)
                .dims()
                .into_iter()
                .filter(|(d, _)| *d <= 0)
                .collect();
            assert_eq!(t.stalk(rho).dims(), full);
        }
    }
}

#[test]
fn minimal_model_maps_are_inverse_equivalences() {
    let k = Arc::new(sphere(2));
    let w = RepComplex::constant(&f2(), k.clone()).dual();
    let big = InjComplex::direct_sum(&[&w, &w.shift(1).cone_of_identity()]).unwrap();
    let (m, iota, pi) = big.minimize_with_maps();
    iota.validate().unwrap();
    pi.validate().unwrap();
    assert_eq!(m.len(), w.len());
    let id = iota.then(&pi).unwrap();
    assert!(id.is_quasi_iso_on(&(0..k.len()).collect::<Vec<_>>()));
    let _ = ChainMap::identity(&m);
}

trait ConeOfIdentity {
    fn cone_of_identity(&self) -> Self;
}

impl<R: Ring> ConeOfIdentity for InjComplex<R> {
    fn cone_of_identity(&self) -> Self {
        ChainMap::identity(self).cone()
    }
}

mod homs {
    use super::*;
    use geomext::shcomplex::{hom_complex, hom_dims, hom_from_projective, projective_resolution};

    #[test]
    fn hom_examples() {
        let tri = Arc::new(simplex(2));
        let one = RepComplex::constant(&Rationals, tri.clone()).injective_model();
        assert_eq!(hom_dims(&one, &one), GradedDims::from_dims([(0, 1)]));

        let s2 = Arc::new(sphere(2));
        let one = RepComplex::constant(&f2(), s2.clone()).injective_model();
        let h = hom_dims(&one, &one);
        assert_eq!(h.dim(2), 1);
        let w = RepComplex::constant(&f2(), s2.clone()).dual();
        assert_eq!(hom_dims(&one, &w), GradedDims::from_dims([(-2, 1), (0, 1)]));
    }

    #[test]
    fn hom_from_unit_is_sections() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = Arc::new(circle(3).unwrap());
        let r = ModRing::prime_field(5).unwrap();
        let one = RepComplex::constant(&r, k.clone()).injective_model();
        for _ in 0..8 {
            let g = RepComplex::random(&r, k.clone(), 3, &mut rng)
                .unwrap()
                .injective_model();
            assert_eq!(hom_dims(&one, &g), g.hypercohomology());
        }
    }

    #[test]
    fn hom_representatives_are_chain_maps() {
        let k = Arc::new(sphere(2));
        let one = RepComplex::constant(&Rationals, k.clone()).injective_model();
        let w = RepComplex::constant(&Rationals, k.clone()).dual();
        let h = hom_complex(&one, &w);
        let maps = h.cohomology_maps(-2).unwrap();
        assert_eq!(maps.len(), 1);
        maps[0].validate().unwrap();
        // the fundamental class is an isomorphism 1 -> ω[-2]
        assert!(maps[0].is_quasi_iso_on(&(0..k.len()).collect::<Vec<_>>()));
    }

    #[test]
    fn projective_resolution_examples() {
        let edge = Arc::new(simplex(1));
        let v = edge.find_simplex(&[0]).unwrap();
        let p = RepComplex::constant_on(&f2(), edge.clone(), edge.cofaces(v)).unwrap();
        let res = projective_resolution(&p).unwrap();
        assert_eq!(res.resolution.len(), 1);

        let sky = RepComplex::constant_on(&f2(), edge.clone(), &[v]).unwrap();
        let res = projective_resolution(&sky).unwrap();
        assert!(res.resolution.is_minimal());
        assert_eq!(res.resolution.length(), 2);
        assert_eq!(res.resolution.len(), 2);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let tri = Arc::new(simplex(2));
        for _ in 0..5 {
            let c = rng.gen_range(0..tri.len());
            let f = RepComplex::constant_on(&f2(), tri.clone(), tri.faces(c)).unwrap();
            let res = projective_resolution(&f).unwrap();
            assert!(res.resolution.length() <= tri.poset().height());
        }
    }

    #[test]
    fn projective_and_injective_homs_agree() {
        let k = Arc::new(build::rp2());
        for p in [2u64, 3] {
            let r = ModRing::prime_field(p).unwrap();
            let one = RepComplex::constant(&r, k.clone());
            let w = one.dual();
            let a = hom_dims(&one.injective_model(), &w);
            let res = projective_resolution(&one).unwrap();
            let b = GradedDims::from_structure(
                &hom_from_projective(&res.resolution, &w.to_rep()).cohomology(),
            );
            assert_eq!(a, b);
        }
    }

    #[test]
    fn minimal_forms_do_not_depend_on_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let k = Arc::new(sphere(2));
        for _ in 0..5 {
            let f = RepComplex::random(&f2(), k.clone(), 3, &mut rng)
                .unwrap()
                .dual();
            let mut perm: Vec<usize> = (0..f.len()).collect();
            for i in (1..perm.len()).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let g = f.permuted(&perm, &vec![f2().one(); perm.len()]);
            assert_eq!(f.minimize().multiplicities(), g.minimize().multiplicities());
        }
    }
}
