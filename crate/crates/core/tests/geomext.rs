use geomext::fixtures::i2::boundary_cycle;
use geomext::fixtures::{fixture, Fixture};
use geomext::geomext::{
    canonical_form, compare_resolutions, condition_d_check, deligne_ic, geometric_extension, gp_gnp, interpolation,
    monodromy, perversity_report, semismall_obstruction, stalk_bound_check, CanonicalMethod, ResolutionSpec,
};
use geomext::cellposet::build::circle;
use geomext::cellposet::{CellularMap, Stratification};
use geomext::geomext::{geom_cohomology, parity_report, Parity, StalkTable};
use geomext::ksengine::IsoResult;
use geomext::shcomplex::InjComplex;
use geomext::sixfunctors::{constant_sheaf, pushforward_constant};
use std::sync::Arc;
use geomext::linalg::Matrix;
use geomext::{ModRing, Rationals};

fn f2() -> ModRing {
    ModRing::new(2, 1).unwrap()
}

fn spec(f: &Fixture, i: usize) -> ResolutionSpec {
    ResolutionSpec::from_fixture(&f.resolutions[i])
}

#[test]
fn cone_on_rp3_mod_two_is_indecomposable() {
    let f = fixture("cone(rp3)").unwrap();
    let apex = f.marked("apex").unwrap();
    let e = geometric_extension(&spec(&f, 0), &f2(), 1).unwrap();
    assert_eq!(e.decomposition.len(), 1);
    assert_eq!(e.complex().stalk(apex).dims_range(0, 3), vec![1, 0, 1, 0]);
    assert!(e.certificates.all_hold(), "{:?}", e.certificates);
    assert_eq!(e.certificates.indecomposable, Some(true));
}

#[test]
fn cone_on_rp3_rationally_is_the_intersection_complex() {
    let f = fixture("cone(rp3)").unwrap();
    let apex = f.marked("apex").unwrap();
    let e = geometric_extension(&spec(&f, 0), &Rationals, 1).unwrap();
    assert_eq!(e.decomposition.len(), 2);
    assert_eq!(e.complex().stalk(apex).dims_range(0, 3), vec![1, 0, 0, 0]);
    let ic = deligne_ic(&Rationals, &f.complex, &f.strat).unwrap();
    assert!(iso(&ic, e.complex()));
    let p = perversity_report(e.complex(), &f.strat);
    assert_eq!(p.shift, Some(2));
}

fn iso<R: geomext::ksengine::KsRing>(a: &geomext::shcomplex::InjComplex<R>, b: &geomext::shcomplex::InjComplex<R>) -> bool {
    matches!(geomext::ksengine::iso_test(a, b).unwrap(), IsoResult::Isomorphic { .. })
}

#[test]
fn blowup_and_identity_agree() {
    let f = fixture("cone(s3)").unwrap();
    let names: Vec<&str> = f.resolutions.iter().map(|r| r.name.as_str()).collect();
    let a = names.iter().position(|n| *n == "identity").unwrap();
    let b = 1 - a;
    let c = compare_resolutions(&spec(&f, a), &spec(&f, b), &f2(), 3).unwrap();
    assert!(c.verdict.is_iso());
    assert_eq!(c.triangle_commutes, Some(true));
}

#[test]
fn resolution_check_rejects_a_non_isomorphism() {
    let f = fixture("cone(rp3)").unwrap();
    let mut s = spec(&f, 0);
    s.open = geomext::cellposet::OpenSet::all(&f.complex);
    assert!(geometric_extension(&s, &f2(), 0).is_err());
}

#[test]
fn torus_family_monodromy() {
    let f = fixture("i2_local_model").unwrap();
    let cycle = boundary_cycle(&f.complex);
    let z4 = ModRing::new(2, 2).unwrap();
    let push = geomext::sixfunctors::pushforward_constant(&z4, &f.resolutions[0].map).unwrap();
    let m = monodromy(&push, &cycle, 1).unwrap();
    assert_eq!(m.canonical.method, CanonicalMethod::ExhaustiveSearch);
    let shear = Matrix::from_i64_rows(&z4, &[vec![1, 2], vec![0, 1]]).unwrap();
    assert_eq!(m.canonical, canonical_form(&shear).unwrap());
    assert!(!m.is_trivial());

    let push = geomext::sixfunctors::pushforward_constant(&f2(), &f.resolutions[0].map).unwrap();
    let m = monodromy(&push, &cycle, 1).unwrap();
    assert!(m.is_trivial());
    assert_eq!(m.canonical.invariant_factors, vec!["x + 1", "x + 1"]);
}

#[test]
fn families_satisfy_the_density_condition() {
    for name in ["i2_local_model", "trivial_family"] {
        let f = fixture(name).unwrap();
        let r = &f.resolutions[0];
        let d = condition_d_check(&r.map, &r.open, &f2(), 0).unwrap();
        assert!(d.holds, "{name}: {:?}", d.violations);
    }
    let f = fixture("cone(rp3)").unwrap();
    let r = &f.resolutions[0];
    let d = condition_d_check(&r.map, &r.open, &Rationals, 0).unwrap();
    assert!(!d.holds);
    assert_eq!(d.summands, 2);
}

#[test]
fn suspension_pure_and_non_pure_parts() {
    let f = fixture("suspension(rp3)").unwrap();
    let specs: Vec<ResolutionSpec> = (0..f.resolutions.len()).map(|i| spec(&f, i)).collect();
    let g = gp_gnp(&specs, &f2(), 0).unwrap();
    assert!(g.independent);
    let nz = |m: &std::collections::BTreeMap<i32, usize>| m.iter().filter(|e| *e.1 > 0).map(|(k, v)| (*k, *v)).collect::<Vec<_>>();
    assert_eq!(nz(g.non_pure()), vec![(3, 1)]);
    assert_eq!(nz(g.pure()), vec![(0, 1), (2, 1), (4, 1)]);
    let g = gp_gnp(&specs, &Rationals, 0).unwrap();
    assert!(nz(g.non_pure()).is_empty());
}

#[test]
fn identity_resolution_gives_the_constant_sheaf() {
    let f = fixture("cone(s3)").unwrap();
    let a = f.resolutions.iter().position(|r| r.name == "identity").unwrap();
    let e = geometric_extension(&spec(&f, a), &f2(), 0).unwrap();
    assert!(iso(e.complex(), &constant_sheaf(&f2(), &f.complex)));
    assert_eq!(geom_cohomology(&e).dims_range(0, 4), vec![1, 0, 0, 0, 0]);
}

#[test]
fn cone_cohomology_of_the_extension() {
    let f = fixture("cone(rp3)").unwrap();
    let e = geometric_extension(&spec(&f, 0), &f2(), 0).unwrap();
    assert_eq!(geom_cohomology(&e).dims_range(0, 4), vec![1, 0, 1, 0, 0]);
    let e = geometric_extension(&spec(&f, 0), &Rationals, 0).unwrap();
    assert_eq!(geom_cohomology(&e).dims_range(0, 4), vec![1, 0, 0, 0, 0]);
}

#[test]
fn deligne_ic_differs_from_the_extension_in_characteristic_two() {
    let f = fixture("cone(rp3)").unwrap();
    let apex = f.marked("apex").unwrap();
    let ic = deligne_ic(&f2(), &f.complex, &f.strat).unwrap();
    assert_eq!(ic.stalk(apex).dims_range(0, 2), vec![1, 1, 0]);
    let e = geometric_extension(&spec(&f, 0), &f2(), 0).unwrap();
    assert!(!iso(&ic, e.complex()));
    let smooth = fixture("sphere(2)").unwrap();
    let ic = deligne_ic(&f2(), &smooth.complex, &smooth.strat).unwrap();
    assert!(iso(&ic, &constant_sheaf(&f2(), &smooth.complex)));
}

#[test]
fn parity_and_perversity() {
    let f = fixture("cone(rp3)").unwrap();
    let apex = f.marked("apex").unwrap();
    let e = geometric_extension(&spec(&f, 0), &f2(), 0).unwrap();
    let p = parity_report(e.complex(), &f.strat);
    assert!(p.even, "{:?}", p.strata);
    assert_eq!(perversity_report(e.complex(), &f.strat).shift, Some(2));
    assert!(!semismall_obstruction(e.complex(), &f.strat));

    // a point stalk in degree 2d - 1 admits no shift
    let sky = InjComplex::new(&f2(), f.complex.clone(), vec![apex], vec![3], vec![vec![]]).unwrap();
    let bad = InjComplex::direct_sum(&[e.complex(), &sky]).unwrap();
    assert!(semismall_obstruction(&bad, &f.strat));

    let s = fixture("sphere(2)").unwrap();
    let one = constant_sheaf(&f2(), &s.complex);
    assert!(parity_report(&one, &s.strat).even);
    assert_eq!(perversity_report(&one, &s.strat).shift, Some(1));
    let mixed = InjComplex::direct_sum(&[&one, &one.shift(1)]).unwrap();
    assert!(!parity_report(&mixed, &s.strat).is_parity());
    assert_eq!(parity_report(&mixed, &s.strat).strata[0].stalk, Parity::Mixed);
}

#[test]
fn stalk_bounds() {
    let f = fixture("cone(rp3)").unwrap();
    let e = geometric_extension(&spec(&f, 0), &f2(), 0).unwrap();
    let table = StalkTable::new(&e.pushforward, &f.strat);
    let b = stalk_bound_check(e.complex(), &table).unwrap();
    assert!(b.holds);
    assert_eq!(b.equal, vec![true, true]);
    let mut cut = table.clone();
    cut.rows[1].stalk.structure.remove(&2);
    let b = stalk_bound_check(e.complex(), &cut).unwrap();
    assert!(!b.holds);
    assert_eq!(b.violations, vec![(1, 2, 1, 0)]);
}

#[test]
fn monodromy_of_simple_local_systems() {
    let c6 = Arc::new(circle(6).unwrap());
    let c3 = Arc::new(circle(3).unwrap());
    let cover = CellularMap::from_vertex_map(c6, c3.clone(), (0..6).map(|v| v % 3).collect()).unwrap();
    let cycle: Vec<usize> = (0..3)
        .flat_map(|l| {
            let n = (l + 1) % 3;
            [c3.find_simplex(&[l]).unwrap(), c3.find_simplex(&[l.min(n), l.max(n)]).unwrap()]
        })
        .collect();
    let one = constant_sheaf(&Rationals, &c3);
    assert!(monodromy(&one, &cycle, 0).unwrap().is_trivial());
    let push = pushforward_constant(&Rationals, &cover).unwrap();
    let m = monodromy(&push, &cycle, 0).unwrap();
    assert_eq!(m.canonical.invariant_factors, vec!["x^2 + -1"]);
    // the sign summand
    let d = geomext::ksengine::decompose(&push).unwrap();
    let signs: Vec<_> = d
        .summands
        .iter()
        .map(|s| monodromy(&s.complex, &cycle, 0).unwrap().canonical.invariant_factors)
        .collect();
    assert!(signs.contains(&vec!["x + 1".to_string()]), "{signs:?}");
}

#[test]
fn hopf_circle_bundle_satisfies_the_density_condition() {
    let f = fixture("hopf_quotient").unwrap();
    let h = f.map.clone().unwrap();
    let u = geomext::cellposet::OpenSet::all(h.target());
    assert!(condition_d_check(&h, &u, &f2(), 0).unwrap().holds);
    let _ = Stratification::trivial(h.target());
}

#[test]
fn interpolation_on_the_cone() {
    let f = fixture("cone(rp3)").unwrap();
    let i = interpolation(&spec(&f, 0), &f2(), 0).unwrap();
    assert!(i.certified);
}

#[test]
fn comparisons() {
    let f = fixture("cone(rp3)").unwrap();
    let c = compare_resolutions(&spec(&f, 0), &spec(&f, 0), &f2(), 0).unwrap();
    assert!(c.verdict.is_iso());
    let c = compare_resolutions(&spec(&f, 0), &spec(&f, 1), &f2(), 0).unwrap();
    assert!(c.verdict.is_iso());
    assert_eq!(c.triangle_commutes, Some(true));
}
