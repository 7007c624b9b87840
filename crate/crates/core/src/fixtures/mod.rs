//! Programmatically built fixtures: complexes, maps and resolutions with
//! their expected invariants, addressed by small expressions such as
//! `cone(rp3)`, `sphere(2)` or `cylinder(hopf_quotient)`.

pub mod hopf;
pub mod i2;
pub mod resolution;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cellposet::build::{self, mapping_cylinder, product_with_maps};
use crate::cellposet::homology::homology_dims;
use crate::cellposet::{CellComplex, CellularMap, OpenSet, SimplicialJson, Stratification};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ring::{CoefficientSpec, ModRing, Ring};
use crate::sixfunctors::pushforward_constant;
use crate::with_ring;

pub use resolution::ResolutionFixture;

/// A parsed fixture expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixtureExpr {
    Int(usize),
    Call(String, Vec<FixtureExpr>),
    /// Verbatim argument of `abstract(...)`: inline JSON or a file path.
    Raw(String),
}

impl fmt::Display for FixtureExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureExpr::Int(n) => write!(f, "{n}"),
            FixtureExpr::Raw(s) => write!(f, "{s}"),
            FixtureExpr::Call(name, args) if args.is_empty() => write!(f, "{name}"),
            FixtureExpr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FixtureExpr {
    pub fn parse(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (e, rest) = parse_expr(&s)?;
        if !rest.is_empty() {
            return Err(Error::Format(format!("trailing input {rest:?} in fixture expression")));
        }
        Ok(e)
    }
}

fn parse_expr(s: &str) -> Result<(FixtureExpr, &str)> {
    let end = s.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(s.len());
    let (head, rest) = s.split_at(end);
    if head.is_empty() {
        return Err(Error::Format(format!("expected a fixture name at {s:?}")));
    }
    if let Ok(n) = head.parse() {
        return Ok((FixtureExpr::Int(n), rest));
    }
    let Some(rest) = rest.strip_prefix('(') else {
        return Ok((FixtureExpr::Call(head.into(), vec![]), rest));
    };
    if head == "abstract" {
        let close = rest.rfind(')').ok_or_else(|| Error::Format("unclosed abstract(".into()))?;
        return Ok((FixtureExpr::Call(head.into(), vec![FixtureExpr::Raw(rest[..close].into())]), &rest[close + 1..]));
    }
    let mut args = Vec::new();
    let mut rest = rest;
    loop {
        let (a, r) = parse_expr(rest)?;
        args.push(a);
        if let Some(r) = r.strip_prefix(',') {
            rest = r;
        } else if let Some(r) = r.strip_prefix(')') {
            return Ok((FixtureExpr::Call(head.into(), args), r));
        } else {
            return Err(Error::Format(format!("expected ',' or ')' at {r:?}")));
        }
    }
}

/// An invariant a fixture is expected to satisfy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Invariant {
    /// Cellular homology dims `b_0, b_1, …` of the complex.
    Homology { coeffs: String, dims: Vec<usize> },
    /// Homology of the source of the fixture map.
    SourceHomology { coeffs: String, dims: Vec<usize> },
    /// Cohomology of the preimage of the open star of a target vertex.
    FibreHomology { vertex: usize, coeffs: String, dims: Vec<usize> },
    /// The pulled back generator of `H²` of the target is nonzero of order
    /// `order` in `H²` of the source, over `coeffs`.
    PullbackH2 { coeffs: String, order: u64 },
    /// Every resolution pushes the constant sheaf to the constant sheaf over
    /// its open set (over `F_2`).
    IsomorphismOverOpen,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invariant::Homology { coeffs, dims } => write!(f, "homology over {coeffs} = {dims:?}"),
            Invariant::SourceHomology { coeffs, dims } => write!(f, "source homology over {coeffs} = {dims:?}"),
            Invariant::FibreHomology { vertex, coeffs, dims } => {
                write!(f, "fibre over vertex {vertex}, cohomology over {coeffs} = {dims:?}")
            }
            Invariant::PullbackH2 { coeffs, order } => write!(f, "pulled back H² class over {coeffs} has order {order}"),
            Invariant::IsomorphismOverOpen => write!(f, "resolutions are isomorphisms over their open sets"),
        }
    }
}

/// Name, builder and expected invariants of a fixture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureManifest {
    pub name: String,
    pub builder: String,
    pub params: Vec<String>,
    pub invariants: Vec<Invariant>,
    pub notes: String,
}

/// A built fixture.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub manifest: FixtureManifest,
    pub complex: Arc<CellComplex>,
    /// The fixture map, for map fixtures (its target is `complex`).
    pub map: Option<CellularMap>,
    /// Named cells of `complex`: apexes, centres, suspension points.
    pub marked: BTreeMap<String, usize>,
    pub resolutions: Vec<ResolutionFixture>,
    pub strat: Stratification,
}

impl Fixture {
    fn plain(name: &str, builder: &str, params: Vec<String>, k: CellComplex) -> Self {
        let complex = Arc::new(k);
        Fixture {
            manifest: FixtureManifest {
                name: name.into(),
                builder: builder.into(),
                params,
                invariants: vec![],
                notes: String::new(),
            },
            strat: Stratification::trivial(&complex),
            complex,
            map: None,
            marked: BTreeMap::new(),
            resolutions: vec![],
        }
    }

    fn expect(mut self, inv: Invariant) -> Self {
        self.manifest.invariants.push(inv);
        self
    }

    fn expect_homology(self, table: &[(&str, &[usize])]) -> Self {
        table.iter().fold(self, |f, (c, d)| {
            f.expect(Invariant::Homology { coeffs: (*c).into(), dims: d.to_vec() })
        })
    }

    fn homology_invariants(&self) -> Vec<(String, Vec<usize>)> {
        self.manifest
            .invariants
            .iter()
            .filter_map(|i| match i {
                Invariant::Homology { coeffs, dims } => Some((coeffs.clone(), dims.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn marked(&self, name: &str) -> Result<usize> {
        self.marked
            .get(name)
            .copied()
            .ok_or_else(|| Error::Precondition(format!("fixture {} has no marked cell {name:?}", self.manifest.name)))
    }

    /// Checks every invariant of the manifest; the first failure aborts
    /// with the failing invariant.
    pub fn validate(&self) -> Result<()> {
        for inv in &self.manifest.invariants {
            if !self.check(inv)? {
                return Err(Error::FixtureValidation { fixture: self.manifest.name.clone(), invariant: inv.to_string() });
            }
        }
        Ok(())
    }

    fn fixture_map(&self) -> Result<&CellularMap> {
        self.map
            .as_ref()
            .ok_or_else(|| Error::Precondition(format!("{} is not a map fixture", self.manifest.name)))
    }

    /// Evaluates one invariant.
    pub fn check(&self, inv: &Invariant) -> Result<bool> {
        Ok(match inv {
            Invariant::Homology { coeffs, dims } => {
                with_ring!(coeffs.parse::<CoefficientSpec>()?, |r| homology_dims(&self.complex, &r)) == *dims
            }
            Invariant::SourceHomology { coeffs, dims } => {
                let src = self.fixture_map()?.source();
                with_ring!(coeffs.parse::<CoefficientSpec>()?, |r| homology_dims(src, &r)) == *dims
            }
            Invariant::FibreHomology { vertex, coeffs, dims } => {
                let f = self.fixture_map()?;
                let cell = f
                    .target()
                    .find_simplex(&[*vertex])
                    .ok_or_else(|| Error::Precondition(format!("no vertex {vertex}")))?;
                let got = with_ring!(coeffs.parse::<CoefficientSpec>()?, |r| {
                    pushforward_constant(&r, f)?.stalk(cell).dims_range(0, dims.len() as i32 - 1)
                });
                got == *dims
            }
            Invariant::PullbackH2 { coeffs, order } => {
                let spec: CoefficientSpec = coeffs.parse()?;
                let (p, k) = match spec {
                    CoefficientSpec::LocalRing { p, k } => (p, k),
                    CoefficientSpec::PrimeField(p) => (p, 1),
                    CoefficientSpec::Rationals => return Err(Error::Precondition("torsion order over Q".into())),
                };
                pullback_h2_order(self.fixture_map()?, &ModRing::new(p, k)?)? == Some(*order)
            }
            Invariant::IsomorphismOverOpen => {
                let f2 = ModRing::new(2, 1)?;
                for r in self.resolutions.iter().filter(|r| !r.family) {
                    if !r.is_iso_over_open(&f2)? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }
}

/// Order of `f^*[t]` in `H²(source)` for the dual cochain of the first top
/// triangle `t` of the 2-dimensional target, or `None` if it is not a
/// cocycle. Order 1 means a coboundary.
pub fn pullback_h2_order(f: &CellularMap, ring: &ModRing) -> Result<Option<u64>> {
    let (src, tgt) = (f.source(), f.target());
    let t = *tgt.cells_of_dim(2).first().ok_or_else(|| Error::Precondition("target has no triangles".into()))?;
    let edges = src.cells_of_dim(1);
    let tris = src.cells_of_dim(2);
    let tets = src.cells_of_dim(3);
    let pos = |cells: &[usize]| -> BTreeMap<usize, usize> { cells.iter().enumerate().map(|(i, &c)| (c, i)).collect() };
    let ti = pos(&tris);
    let phi: Vec<<ModRing as Ring>::Elem> = tris
        .iter()
        .map(|&c| if f.apply(c) == t { ring.from_i64(f.degree_sign(c)) } else { ring.zero() })
        .collect();
    // δφ on tetrahedra
    for &s in &tets {
        let mut acc = ring.zero();
        for &(face, sign) in src.facets(s) {
            acc = ring.add(&acc, &ring.mul(&ring.from_i64(sign as i64), &phi[ti[&face]]));
        }
        if !ring.is_zero(&acc) {
            return Ok(None);
        }
    }
    let mut delta = Matrix::zeros(ring, tris.len(), edges.len());
    for (j, &e) in edges.iter().enumerate() {
        for &(c, sign) in src.cofacets(e) {
            delta.set(ti[&c], j, ring.from_i64(sign as i64));
        }
    }
    let modulus = ring.p().pow(ring.k());
    for m in 1..=modulus {
        let target: Vec<u64> = phi.iter().map(|x| ring.mul(&ring.from_i64(m as i64), x)).collect();
        if delta.solve(&target)?.is_some() {
            return Ok(Some(m));
        }
    }
    unreachable!("the zero multiple is a coboundary")
}

fn int_arg(args: &[FixtureExpr], i: usize, name: &str) -> Result<usize> {
    match args.get(i) {
        Some(FixtureExpr::Int(n)) => Ok(*n),
        _ => Err(Error::Format(format!("{name} expects an integer argument"))),
    }
}

fn reduced(dims: &[usize]) -> Vec<usize> {
    let mut d = dims.to_vec();
    if let Some(x) = d.first_mut() {
        *x = x.saturating_sub(1);
    }
    d
}

/// Builds a fixture from its expression.
pub fn fixture(expr: &str) -> Result<Fixture> {
    build_expr(&FixtureExpr::parse(expr)?)
}

/// Builds and validates a fixture.
pub fn validated_fixture(expr: &str) -> Result<Fixture> {
    let f = fixture(expr)?;
    f.validate()?;
    Ok(f)
}

/// Names accepted by [`fixture`], with parameters.
pub const REGISTRY: &[&str] = &[
    "point",
    "simplex(n)",
    "sphere(n)",
    "rp2",
    "rp3",
    "s3",
    "torus",
    "circle(k)",
    "cone(X)",
    "suspension(X)",
    "cylinder(M)",
    "product(X,Y)",
    "hopf_quotient",
    "hopf_s3",
    "i2_local_model",
    "trivial_family",
    "abstract(json or path)",
];

pub fn build_expr(e: &FixtureExpr) -> Result<Fixture> {
    let name = e.to_string();
    let FixtureExpr::Call(head, args) = e else {
        return Err(Error::UnknownFixture(name));
    };
    let params: Vec<String> = args.iter().map(|a| a.to_string()).collect();
    let plain = |k: CellComplex| Fixture::plain(&name, head, params.clone(), k);
    let f = match head.as_str() {
        "point" => plain(build::point()).expect_homology(&[("F2", &[1]), ("Q", &[1])]),
        "simplex" => {
            let n = int_arg(args, 0, "simplex")?;
            let mut d = vec![0; n + 1];
            d[0] = 1;
            plain(build::simplex(n)).expect_homology(&[("F2", &d), ("Q", &d)])
        }
        "sphere" => {
            let n = int_arg(args, 0, "sphere")?;
            let mut d = vec![0; n + 1];
            d[0] += 1;
            d[n] += 1;
            plain(build::sphere(n)).expect_homology(&[("F2", &d), ("Q", &d)])
        }
        "circle" => {
            let k = int_arg(args, 0, "circle")?;
            plain(build::circle(k)?).expect_homology(&[("F2", &[1, 1]), ("Q", &[1, 1])])
        }
        "rp2" => plain(build::rp2()).expect_homology(&[("F2", &[1, 1, 1]), ("Q", &[1, 0, 0]), ("F3", &[1, 0, 0])]),
        "torus" => plain(build::torus()).expect_homology(&[("F2", &[1, 2, 1]), ("Q", &[1, 2, 1])]),
        "rp3" => plain(hopf::rp3()).expect_homology(&[("F2", &[1, 1, 1, 1]), ("Q", &[1, 0, 0, 1])]),
        "s3" => plain(hopf::s3()).expect_homology(&[("F2", &[1, 0, 0, 1]), ("Q", &[1, 0, 0, 1])]),
        "hopf_quotient" | "hopf_s3" => {
            let variant = if args.is_empty() { 0 } else { int_arg(args, 0, head)? };
            let (m, src) = if head == "hopf_s3" {
                (hopf::hopf_s3(variant)?, [1, 0, 0, 1])
            } else {
                (hopf::hopf_quotient(variant)?, [1, 1, 1, 1])
            };
            let mut f = plain((**m.target()).clone()).expect_homology(&[("F2", &[1, 0, 1])]);
            f.manifest.notes = "simplicial model of the Hopf fibration onto the tetrahedron boundary".into();
            f.complex = m.target().clone();
            f = f.expect(Invariant::SourceHomology { coeffs: "F2".into(), dims: src.to_vec() });
            for v in 0..4 {
                f = f.expect(Invariant::FibreHomology { vertex: v, coeffs: "F2".into(), dims: vec![1, 1, 0, 0] });
            }
            if head == "hopf_quotient" {
                f = f.expect(Invariant::PullbackH2 { coeffs: "Z/4".into(), order: 2 });
            } else {
                f = f.expect(Invariant::PullbackH2 { coeffs: "Z/4".into(), order: 1 });
            }
            f.map = Some(m);
            f
        }
        "cone" => {
            let inner = build_expr(args.first().ok_or_else(|| Error::Format("cone expects an argument".into()))?)?;
            let (c, _, apex) = build::cone(&inner.complex)?;
            let dims = {
                let mut d = vec![0; c.dimension() + 1];
                d[0] = 1;
                d
            };
            let mut f = plain((*c).clone()).expect_homology(&[("F2", &dims), ("Q", &dims)]);
            f.complex = c.clone();
            f.marked.insert("apex".into(), apex);
            let u = OpenSet::new(&c, (0..c.len()).filter(|&x| x != apex))?;
            if c.dimension() % 2 == 0 {
                f.strat = Stratification::open_closed(&c, &u, 0)?;
            }
            match params[0].as_str() {
                "rp3" => {
                    f.resolutions.push(resolution::hopf_cone(&c, apex, false)?);
                    f.resolutions.push(resolution::hopf_cone(&c, apex, true)?);
                    f.manifest.notes = "cone point resolved by the cylinder of the Hopf quotient".into();
                }
                "s3" => {
                    f.resolutions.push(resolution::identity_resolution(&c));
                    f.resolutions.push(resolution::hopf_blowup(&c, apex)?);
                    f.strat = Stratification::trivial(&c);
                    f.manifest.notes = "smooth 4-ball; identity and blow-up of the cone point".into();
                }
                _ => {}
            }
            f.expect(Invariant::IsomorphismOverOpen)
        }
        "suspension" => {
            let inner = build_expr(args.first().ok_or_else(|| Error::Format("suspension expects an argument".into()))?)?;
            let n = inner.complex.vertex_bound();
            let s = Arc::new(build::suspension(&inner.complex)?);
            // reduced homology shifts up by one
            let table: Vec<(String, Vec<usize>)> = inner
                .homology_invariants()
                .into_iter()
                .map(|(c, d)| {
                    let mut out = vec![1];
                    out.extend(reduced(&d));
                    (c, out)
                })
                .collect();
            let mut f = plain((*s).clone());
            f.complex = s.clone();
            for (c, d) in table {
                f = f.expect(Invariant::Homology { coeffs: c, dims: d });
            }
            let pts = [s.find_simplex(&[n]).expect("pole"), s.find_simplex(&[n + 1]).expect("pole")];
            f.marked.insert("north".into(), pts[0]);
            f.marked.insert("south".into(), pts[1]);
            let u = OpenSet::new(&s, (0..s.len()).filter(|x| !pts.contains(x)))?;
            if s.dimension() % 2 == 0 {
                f.strat = Stratification::open_closed(&s, &u, 0)?;
            }
            if params[0] == "rp3" {
                f.resolutions.push(resolution::double_cylinder(&s, pts, [0, 0])?);
                f.resolutions.push(resolution::double_cylinder(&s, pts, [0, 1])?);
                f.manifest.notes = "both suspension points resolved by Hopf quotient cylinders".into();
            }
            f.expect(Invariant::IsomorphismOverOpen)
        }
        "cylinder" => {
            let inner = build_expr(args.first().ok_or_else(|| Error::Format("cylinder expects a map fixture".into()))?)?;
            let m = inner.fixture_map()?;
            let cyl = mapping_cylinder(m)?;
            // the cylinder retracts onto the target end
            let table = inner.homology_invariants();
            let mut f = plain((*cyl.complex).clone());
            f.complex = cyl.complex.clone();
            let top = cyl.complex.dimension() + 1;
            for (c, mut d) in table {
                d.resize(top, 0);
                f = f.expect(Invariant::Homology { coeffs: c, dims: d });
            }
            for inv in &inner.manifest.invariants {
                if let Invariant::SourceHomology { .. } = inv {
                    f = f.expect(inv.clone());
                }
            }
            f.map = Some(cyl.source_inclusion.clone());
            f.manifest.notes = "fixture map is the inclusion of the source end".into();
            f
        }
        "product" => {
            if args.len() != 2 {
                return Err(Error::Format("product expects two arguments".into()));
            }
            let (a, b) = (build_expr(&args[0])?, build_expr(&args[1])?);
            let (p, pa, _) = product_with_maps(&a.complex, &b.complex)?;
            let mut f = plain((*p).clone());
            f.complex = p.clone();
            let hb: BTreeMap<String, Vec<usize>> = b.homology_invariants().into_iter().collect();
            for (c, da) in a.homology_invariants() {
                if let Some(db) = hb.get(&c) {
                    let mut d = vec![0; da.len() + db.len() - 1];
                    for (i, x) in da.iter().enumerate() {
                        for (j, y) in db.iter().enumerate() {
                            d[i + j] += x * y;
                        }
                    }
                    d.resize(p.dimension() + 1, 0);
                    f = f.expect(Invariant::Homology { coeffs: c, dims: d });
                }
            }
            f.map = Some(pa);
            f.manifest.notes = "Künneth table; fixture map is the first projection".into();
            f
        }
        "i2_local_model" | "trivial_family" => {
            let r = if head == "i2_local_model" {
                resolution::i2_resolution()?
            } else {
                resolution::trivial_family_resolution()?
            };
            let base = r.target().clone();
            let centre = r.singular_cells()[0];
            let mut f = plain((*base).clone()).expect_homology(&[("F2", &[1, 0, 0])]);
            f.complex = base.clone();
            f.marked.insert("centre".into(), centre);
            f.strat = Stratification::open_closed(&base, &r.open, 0)?;
            let central = if head == "i2_local_model" { vec![1, 1, 2] } else { vec![1, 2, 1] };
            f = f
                .expect(Invariant::FibreHomology { vertex: 0, coeffs: "F2".into(), dims: vec![1, 2, 1] })
                .expect(Invariant::FibreHomology { vertex: 3, coeffs: "F2".into(), dims: central });
            f.map = Some(r.map.clone());
            f.resolutions.push(r);
            f.manifest.notes = "family of tori over a disk".into();
            f
        }
        "abstract" => {
            let raw = match args.first() {
                Some(FixtureExpr::Raw(s)) => s.clone(),
                _ => return Err(Error::Format("abstract expects JSON or a path".into())),
            };
            let text = if raw.trim_start().starts_with('{') { raw } else { std::fs::read_to_string(&raw)? };
            let j: SimplicialJson = serde_json::from_str(&text)?;
            plain(CellComplex::from_json(&j)?)
        }
        _ => return Err(Error::UnknownFixture(name)),
    };
    Ok(f)
}
