use std::sync::Arc;

use geomext::cellposet::build::{
    self, barycentric, circle, cone, mapping_cylinder, product, simplex, simplex_boundary, sphere,
};
use geomext::cellposet::homology::{cohomology_dims, homology_dims, order_complex_homology};
use geomext::cellposet::{CellComplex, CellularMap, OpenSet, Stratification, Stratum};
use geomext::{ModRing, Rationals};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f2() -> ModRing {
    ModRing::prime_field(2).unwrap()
}

#[test]
fn face_poset_examples() {
    let pt = build::point();
    assert_eq!(pt.poset().len(), 1);

    let tri = simplex(2);
    assert_eq!(tri.f_vector(), vec![3, 3, 1]);
    assert_eq!(tri.poset().height(), 3);

    let s2 = simplex_boundary(2);
    assert_eq!(s2.f_vector(), vec![4, 6, 4]);
    assert_eq!(order_complex_homology(&s2, &Rationals), vec![1, 0, 1]);
}

#[test]
fn cone_examples() {
    let empty = Arc::new(CellComplex::from_simplices(&[]).unwrap());
    let (c, _, _) = cone(&empty).unwrap();
    assert_eq!(c.len(), 1);

    let two = Arc::new(CellComplex::from_simplices(&[vec![0], vec![1]]).unwrap());
    let (c, _, _) = cone(&two).unwrap();
    assert_eq!(homology_dims(&c, &Rationals), vec![1, 0]);

    let s2 = Arc::new(simplex_boundary(2));
    let (c, _, apex) = cone(&s2).unwrap();
    assert_eq!(homology_dims(&c, &Rationals), vec![1, 0, 0, 0]);
    // the link of the apex is the base
    let star = c.poset().open_star(apex);
    assert_eq!(star.len(), 1 + 4 + 6 + 4);
}

#[test]
fn mapping_cylinder_examples() {
    let k = Arc::new(circle(4).unwrap());
    let cyl = mapping_cylinder(&CellularMap::identity(k.clone())).unwrap();
    let mut a = homology_dims(&cyl.complex, &Rationals);
    a.truncate(2);
    assert_eq!(a, homology_dims(&k, &Rationals));

    let two = Arc::new(CellComplex::from_simplices(&[vec![0], vec![1]]).unwrap());
    let pt = Arc::new(build::point());
    let phi = CellularMap::from_vertex_map(two, pt, vec![0, 0]).unwrap();
    let v = mapping_cylinder(&phi).unwrap();
    assert_eq!(v.complex.f_vector(), vec![3, 2]);
    assert_eq!(homology_dims(&v.complex, &Rationals), vec![1, 0]);
}

#[test]
fn product_examples() {
    let pt = Arc::new(build::point());
    let k = Arc::new(circle(5).unwrap());
    let (p, _, _) = product(&pt, &k).unwrap();
    assert_eq!(p.f_vector(), k.f_vector());

    let i = Arc::new(simplex(1));
    let (sq, _, _) = product(&i, &i).unwrap();
    assert_eq!(sq.f_vector(), vec![4, 5, 2]);

    let c3 = Arc::new(circle(3).unwrap());
    let (t, _, _) = product(&c3, &c3).unwrap();
    assert_eq!(t.f_vector()[2], 18);
    assert_eq!(homology_dims(&t, &Rationals), vec![1, 2, 1]);
}

#[test]
fn kunneth_for_products() {
    let s2 = Arc::new(sphere(2));
    let c = Arc::new(circle(3).unwrap());
    let (p, _, _) = product(&s2, &c).unwrap();
    assert_eq!(homology_dims(&p, &f2()), vec![1, 1, 1, 1]);
}

#[test]
fn barycentric_examples() {
    let (sd, _) = barycentric(&simplex(1)).unwrap();
    assert_eq!(sd.f_vector(), vec![3, 2]);
    let (sd, _) = barycentric(&simplex_boundary(1)).unwrap();
    assert_eq!(sd.f_vector(), vec![6, 6]);
}

#[test]
fn homology_invariant_under_subdivision() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..8 {
        let n: usize = rng.gen_range(5..8);
        let simplices: Vec<Vec<usize>> = (0..6)
            .map(|_| {
                let mut s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
                if s.is_empty() {
                    s.push(rng.gen_range(0..n));
                }
                s.truncate(4);
                s
            })
            .collect();
        let k = CellComplex::from_simplices(&simplices).unwrap();
        let (sd, _) = barycentric(&k).unwrap();
        let mut a = homology_dims(&k, &Rationals);
        let mut b = homology_dims(&sd, &Rationals);
        a.resize(5, 0);
        b.resize(5, 0);
        assert_eq!(a, b);
        assert_eq!(k.euler_characteristic(), sd.euler_characteristic());
    }
}

#[test]
fn open_star_examples() {
    let tri = simplex(2);
    let top = tri.len() - 1;
    assert_eq!(tri.poset().open_star(top).cells(), &[top]);
    let v = tri.find_simplex(&[0]).unwrap();
    let star = tri.poset().open_star(v);
    assert_eq!(star.len(), 4);
    let z = star.complement_closed(&tri);
    assert!(tri.restrict_closed(&z).is_ok());
    assert!(OpenSet::new(&tri, [v]).is_err());
}

#[test]
fn euler_characteristic_matches_homology() {
    for k in [
        sphere(2),
        sphere(3),
        build::rp2(),
        build::torus(),
        simplex(3),
    ] {
        let h = homology_dims(&k, &Rationals);
        let chi: i64 = h
            .iter()
            .enumerate()
            .map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum();
        assert_eq!(chi, k.euler_characteristic());
    }
}

#[test]
fn rp2_homology_depends_on_characteristic() {
    let k = build::rp2();
    assert_eq!(homology_dims(&k, &f2()), vec![1, 1, 1]);
    assert_eq!(homology_dims(&k, &Rationals), vec![1, 0, 0]);
    assert_eq!(cohomology_dims(&k, &f2()), vec![1, 1, 1]);
}

#[test]
fn cw_regularity_is_checked() {
    // a 2-cell glued along one edge loop with two vertices: regular disk
    let dims = vec![0, 0, 1, 1, 2];
    let facets = vec![
        vec![],
        vec![],
        vec![(0, -1), (1, 1)],
        vec![(0, -1), (1, 1)],
        vec![(2, 1), (3, -1)],
    ];
    assert!(CellComplex::from_cells(dims, facets).is_ok());
    // an edge with both ends on one vertex is not regular
    let bad = CellComplex::from_cells(vec![0, 1], vec![vec![], vec![(0, 1), (0, -1)]]);
    assert!(bad.is_err());
}

#[test]
fn stratification_checks_openness_and_dimension() {
    let s2 = Arc::new(simplex_boundary(2));
    let (c, _, apex) = cone(&s2).unwrap();
    let u = OpenSet::new(&c, (0..c.len()).filter(|&x| x != apex)).unwrap();
    let st = Stratification::open_closed(&c, &u, 0);
    // the open part has top dimension 3, which is odd
    assert!(st.is_err());
    let ok = Stratification::new(
        &c,
        vec![Stratum {
            cells: (0..c.len()).collect(),
            complex_dim: 0,
        }],
    );
    assert!(ok.is_err());
}

#[test]
fn subdivide_map_respects_bound() {
    let k = Arc::new(simplex(2));
    let t = Arc::new(simplex(2));
    let f = CellularMap::new(k.clone(), t.clone(), (0..k.len()).collect()).unwrap();
    assert!(build::subdivide_map(&f, 0).is_err());
    let g = build::subdivide_map(&f, 1).unwrap();
    assert!(g.vertex_map().is_some());
    let j = k.to_json().unwrap();
    assert_eq!(CellComplex::from_json(&j).unwrap().f_vector(), k.f_vector());
}
