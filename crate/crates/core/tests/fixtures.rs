use geomext::cellposet::homology::homology_dims;
use geomext::fixtures::{fixture, validated_fixture, FixtureExpr, Invariant};
use geomext::{Error, ModRing};

#[test]
fn expressions_round_trip() {
    for s in ["rp3", "cone(rp3)", "product(circle(3),sphere(2))", "suspension(cone(torus))"] {
        assert_eq!(FixtureExpr::parse(s).unwrap().to_string(), s);
    }
    assert!(FixtureExpr::parse("cone(rp3").is_err());
    assert!(matches!(fixture("klein_bottle"), Err(Error::UnknownFixture(_))));
}

#[test]
fn small_fixtures_validate() {
    for s in [
        "point",
        "simplex(3)",
        "sphere(2)",
        "sphere(3)",
        "circle(5)",
        "rp2",
        "torus",
        "cone(torus)",
        "suspension(rp2)",
        "product(circle(3),circle(4))",
        "product(rp2,circle(3))",
    ] {
        validated_fixture(s).unwrap_or_else(|e| panic!("{s}: {e}"));
    }
}

#[test]
fn octahedron() {
    let f = fixture("sphere(2)").unwrap();
    assert_eq!(f.complex.f_vector(), vec![6, 12, 8]);
}

#[test]
fn abstract_fixture_from_json() {
    let f = fixture(r#"abstract({"vertices": 3, "simplices": [[0, 1], [1, 2], [0, 2]]})"#).unwrap();
    assert_eq!(homology_dims(&f.complex, &ModRing::new(2, 1).unwrap()), vec![1, 1]);
}

#[test]
fn a_wrong_invariant_is_reported() {
    let mut f = fixture("torus").unwrap();
    f.manifest.invariants.push(Invariant::Homology { coeffs: "Q".into(), dims: vec![1, 1, 1] });
    match f.validate() {
        Err(Error::FixtureValidation { invariant, .. }) => assert!(invariant.contains("[1, 1, 1]")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn projective_three_space() {
    let f = validated_fixture("rp3").unwrap();
    assert_eq!(f.complex.f_vector(), vec![40, 232, 384, 192]);
}

#[test]
fn hopf_maps() {
    validated_fixture("hopf_quotient").unwrap();
    validated_fixture("hopf_quotient(1)").unwrap();
    validated_fixture("hopf_s3").unwrap();
}

#[test]
fn cylinder_retracts_to_its_target() {
    validated_fixture("cylinder(hopf_quotient)").unwrap();
}

#[test]
fn resolved_cones_and_suspension() {
    for s in ["cone(rp3)", "cone(s3)", "suspension(rp3)"] {
        let f = validated_fixture(s).unwrap_or_else(|e| panic!("{s}: {e}"));
        assert_eq!(f.resolutions.len(), 2, "{s}");
    }
}

#[test]
fn torus_families() {
    let f = validated_fixture("i2_local_model").unwrap();
    assert!(f.resolutions[0].family);
    validated_fixture("trivial_family").unwrap();
}
