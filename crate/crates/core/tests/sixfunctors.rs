use std::sync::Arc;

use geomext::cellposet::build::{self, circle, simplex, sphere};
use geomext::cellposet::homology::{cohomology_dims, homology_dims};
use geomext::cellposet::{CellComplex, CellularMap, OpenSet};
use geomext::shcomplex::{GradedDims, RepComplex};
use geomext::sixfunctors::{
    base_change_holds, borel_moore_dims, constant_sheaf, convolution_dimension_check,
    derived_pushforward, dualizing_complex, extend_by_zero, orientation_search, push_class,
    pushforward_constant, restrict_to_closed, upper_shriek, BmContext,
};
use geomext::{ModRing, Rationals, Ring};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn f2() -> ModRing {
    ModRing::prime_field(2).unwrap()
}

fn f3() -> ModRing {
    ModRing::prime_field(3).unwrap()
}

fn as_dims(v: &[usize]) -> GradedDims {
    GradedDims::from_dims(v.iter().enumerate().map(|(i, &n)| (i as i32, n)))
}

#[test]
fn borel_moore_is_cellular_homology() {
    for k in [sphere(2), build::rp2(), build::torus()] {
        let k = Arc::new(k);
        let bm = borel_moore_dims(&Rationals, &k);
        for (i, &n) in homology_dims(&k, &Rationals).iter().enumerate() {
            assert_eq!(bm.get(&(i as i32)).copied().unwrap_or(0), n);
        }
        let bm = borel_moore_dims(&f2(), &k);
        for (i, &n) in homology_dims(&k, &f2()).iter().enumerate() {
            assert_eq!(bm.get(&(i as i32)).copied().unwrap_or(0), n);
        }
    }
}

#[test]
fn pushforward_to_a_point_is_cohomology() {
    for k in [sphere(2), build::rp2(), build::torus()] {
        let k = Arc::new(k);
        let p = CellularMap::to_point(k.clone());
        assert_eq!(
            pushforward_constant(&f2(), &p).unwrap().stalk(0),
            as_dims(&cohomology_dims(&k, &f2()))
        );
        assert_eq!(
            pushforward_constant(&f3(), &p).unwrap().stalk(0),
            as_dims(&cohomology_dims(&k, &f3()))
        );
    }
}

#[test]
fn proper_base_change_on_a_projection() {
    let s1 = Arc::new(circle(3).unwrap());
    let i = Arc::new(simplex(1));
    let (p, _, pr) = build::product_with_maps(&s1, &i).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3 {
        let f = RepComplex::random(&f2(), p.clone(), 3, &mut rng)
            .unwrap()
            .injective_model();
        for tau in 0..i.len() {
            assert!(base_change_holds(&pr, &f, tau).unwrap());
        }
    }
    let one = constant_sheaf(&Rationals, &p);
    let push = derived_pushforward(&pr, &one).unwrap();
    for tau in 0..i.len() {
        assert_eq!(push.stalk(tau), GradedDims::from_dims([(0, 1), (1, 1)]));
    }
}

#[test]
fn recollement_stalks_split() {
    let k = Arc::new(build::torus());
    let u = OpenSet::generated(&k, k.cells_of_dim(2).into_iter().take(5));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = RepComplex::random(&f3(), k.clone(), 4, &mut rng)
        .unwrap()
        .injective_model();
    let a = extend_by_zero(&u, &f);
    let c = restrict_to_closed(&u, &f);
    for rho in 0..k.len() {
        let (s, sa, sc) = (f.stalk(rho), a.stalk(rho), c.stalk(rho));
        if u.contains(rho) {
            assert_eq!((sa, sc.is_zero()), (s, true));
        } else {
            assert_eq!((sc, sa.is_zero()), (s, true));
        }
    }
    // Euler characteristics add along the triangle
    let chi = |g: GradedDims| {
        g.dims()
            .iter()
            .map(|(n, d)| if n % 2 == 0 { *d as i64 } else { -(*d as i64) })
            .sum::<i64>()
    };
    assert_eq!(
        chi(f.hypercohomology()),
        chi(a.hypercohomology()) + chi(c.hypercohomology())
    );
}

#[test]
fn duality_exchanges_stalks_and_costalks() {
    let k = Arc::new(build::rp2());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let f = RepComplex::random(&f3(), k.clone(), 4, &mut rng)
            .unwrap()
            .injective_model();
        let d = f.dual();
        for rho in 0..k.len() {
            let dim = k.dim(rho) as i32;
            let s = f.stalk(rho);
            let c = d.costalk(rho);
            let flipped = GradedDims::from_dims(s.dims().iter().map(|(n, m)| (-n - dim, *m)));
            assert_eq!(c, flipped);
        }
    }
}

#[test]
fn upper_shriek_of_a_point_is_dualizing() {
    let k = Arc::new(sphere(2));
    let p = CellularMap::to_point(k.clone());
    let pt = p.target().clone();
    let got = upper_shriek(&p, &constant_sheaf(&f2(), &pt)).unwrap();
    let w = dualizing_complex(&f2(), &k);
    for rho in 0..k.len() {
        assert_eq!(got.stalk(rho), w.stalk(rho));
    }
}

#[test]
fn orientations() {
    let s2 = Arc::new(sphere(2));
    let all = OpenSet::all(&s2);
    let o = orientation_search(&Rationals, &s2, &all, 2)
        .unwrap()
        .expect("S2 is Q-orientable");
    assert!(o.certify());
    assert!(orientation_search(&f2(), &s2, &all, 2)
        .unwrap()
        .unwrap()
        .certify());
    assert!(orientation_search(&f3(), &s2, &all, 2)
        .unwrap()
        .unwrap()
        .certify());
    let rp2 = Arc::new(build::rp2());
    let all = OpenSet::all(&rp2);
    assert!(orientation_search(&f2(), &rp2, &all, 2)
        .unwrap()
        .unwrap()
        .certify());
    assert!(orientation_search(&f3(), &rp2, &all, 2).unwrap().is_none());
    assert!(orientation_search(&Rationals, &rp2, &all, 2)
        .unwrap()
        .is_none());
    // wrong degree
    assert!(orientation_search(&f2(), &rp2, &all, 1).unwrap().is_none());
}

#[test]
fn fundamental_class_pushes_along_subdivision() {
    let s2 = Arc::new(sphere(2));
    let (sd, approx) = build::barycentric_with_approximation(&s2).unwrap();
    let src = BmContext::new(&f3(), &sd);
    let dst = BmContext::new(&f3(), &s2);
    let all = OpenSet::all(&sd);
    let o = geomext::sixfunctors::orientation_search_in(&src, &all, 2)
        .unwrap()
        .unwrap();
    let pushed = push_class(&approx, &dst, &o.class).unwrap();
    // the image is an orientation again
    let open = OpenSet::all(&s2);
    let or = geomext::sixfunctors::Orientation {
        class: pushed,
        open,
    };
    assert!(or.certify());
}

#[test]
fn cycle_round_trip() {
    let k: Arc<CellComplex> = Arc::new(build::torus());
    let ctx = BmContext::new(&f2(), &k);
    let basis = ctx.basis(1).unwrap();
    assert_eq!(basis.len(), 2);
    for b in &basis {
        let c = ctx.class_of_cycle(1, &b.cycle).unwrap();
        let co = ctx
            .coordinates(1, &basis, &ctx.cycle_of(&c.map))
            .unwrap()
            .unwrap();
        let want = ctx.coordinates(1, &basis, &b.cycle).unwrap().unwrap();
        assert_eq!(co, want);
    }
    let r = f2();
    assert!(basis
        .iter()
        .all(|b| !b.cycle.is_empty() && b.cycle.iter().all(|(_, x)| !r.is_zero(x))));
}

#[test]
fn convolution_identity_on_a_surface() {
    let s2 = Arc::new(sphere(2));
    let id = CellularMap::identity(s2.clone());
    let rep = convolution_dimension_check(&Rationals, &id, &id, &s2, 2, (0, 2)).unwrap();
    assert!(rep.holds, "{:?}", rep.rows);
    let rp2 = Arc::new(build::rp2());
    let id = CellularMap::identity(rp2.clone());
    // fails without an orientation
    assert!(
        !convolution_dimension_check(&Rationals, &id, &id, &rp2, 2, (0, 2))
            .unwrap()
            .holds
    );
}
