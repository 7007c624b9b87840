//! Geometric extensions: the dense indecomposable summand of the
//! pushforward along a resolution (or the dense part for a family), with
//! comparison, intersection complexes, diagnostics, monodromy,
//! interpolation and geometrically pure cohomology.

mod diagnostics;
mod ic;
mod monodromy;

pub use diagnostics::{
    parity_report, perversity_report, semismall_obstruction, stalk_bound_check, Parity, ParityReport,
    PerversityReport, StalkBoundReport, StalkRow, StalkTable, StratumParity,
};
pub use ic::deligne_ic;
pub use monodromy::{canonical_form, monodromy, CanonicalForm, CanonicalMethod, Monodromy};

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::cellposet::{CellComplex, CellularMap, OpenSet};
use crate::error::{Error, Result};
use crate::fixtures::ResolutionFixture;
use crate::ksengine::{
    decompose_with, dense_part, is_null_homotopic, iso_test, lift_iso_on_dense, Decomposition, DenseIso, DensePart,
    IsoResult, KsRing, LocalCertificate, Summand,
};
use crate::linalg::elim::reduce;
use crate::linalg::{FreeComplex, Matrix};
use crate::ring::Ring;
use crate::shcomplex::{hom_complex_in, ChainMap, GradedDims, InjComplex};
use crate::sixfunctors::{constant_sheaf, orientation_search_in, pushforward_constant, BmClass, BmContext, Orientation};

/// A proper map with the open set of the target over which it is an
/// isomorphism (resolution) or smooth and proper (family).
#[derive(Clone, Debug)]
pub struct ResolutionSpec {
    pub name: String,
    pub map: CellularMap,
    pub open: OpenSet,
    /// Local-system input rather than a resolution.
    pub smooth_proper: bool,
    /// Real dimension `2d` of the source.
    pub real_dim: usize,
}

impl ResolutionSpec {
    pub fn new(name: impl Into<String>, map: CellularMap, open: OpenSet, smooth_proper: bool) -> Self {
        let real_dim = map.source().dimension();
        ResolutionSpec { name: name.into(), map, open, smooth_proper, real_dim }
    }

    pub fn from_fixture(r: &ResolutionFixture) -> Self {
        Self::new(r.name.clone(), r.map.clone(), r.open.clone(), r.family)
    }

    pub fn target(&self) -> &Arc<CellComplex> {
        self.map.target()
    }

    /// A cell of the open set where the pushforward of the constant sheaf is
    /// not the constant stalk, if any.
    pub fn iso_witness<R: Ring>(&self, ring: &R, push: &InjComplex<R>) -> Option<usize> {
        let (g, _, _) = self.map.restrict_over(&self.open).ok()?;
        if g.is_poset_isomorphism() {
            return None;
        }
        let unit = constant_sheaf(ring, self.target()).stalk_structure(self.open.cells()[0]);
        self.open.cells().iter().copied().find(|&c| push.stalk_structure(c) != unit)
    }
}

/// Conditions certified for an extension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionCertificates {
    /// Over the open set the extension is the pushforward there (and, for
    /// resolutions, the constant sheaf).
    pub restricts_over_open: bool,
    /// Every summand of the extension has cohomology on the open set.
    pub no_summand_off_open: bool,
    /// The extension is a split summand of the pushforward.
    pub summand_of_pushforward: bool,
    /// For resolutions: the extension is certified indecomposable.
    pub indecomposable: Option<bool>,
    /// Some summand of the decomposition is undecided (rationals).
    pub undecided: bool,
}

impl ExtensionCertificates {
    pub fn all_hold(&self) -> bool {
        self.restricts_over_open
            && self.no_summand_off_open
            && self.summand_of_pushforward
            && self.indecomposable != Some(false)
            && !self.undecided
    }
}

#[derive(Clone, Debug)]
pub struct GeometricExtension<R: Ring> {
    pub provenance: String,
    /// Minimal model of the pushforward of the constant sheaf.
    pub pushforward: InjComplex<R>,
    pub decomposition: Decomposition<R>,
    pub dense: DensePart<R>,
    pub certificates: ExtensionCertificates,
}

impl<R: Ring> GeometricExtension<R> {
    /// The extension as a summand of the pushforward.
    pub fn summand(&self) -> &Summand<R> {
        &self.dense.part
    }

    pub fn complex(&self) -> &InjComplex<R> {
        &self.dense.part.complex
    }
}

/// Pushforward, decomposition and dense part of a resolution or family.
pub fn geometric_extension<R: KsRing>(spec: &ResolutionSpec, ring: &R, seed: u64) -> Result<GeometricExtension<R>> {
    let push = pushforward_constant(ring, &spec.map)?;
    if !spec.smooth_proper {
        if let Some(c) = spec.iso_witness(ring, &push) {
            return Err(Error::Precondition(format!(
                "{} is not an isomorphism over the open set: stalk {} at cell {c}",
                spec.name,
                push.stalk(c)
            )));
        }
    }
    let decomposition = decompose_with(&push, seed)?;
    let dense = dense_part(&decomposition, &spec.open)?;
    if !spec.smooth_proper && dense.kept.len() > 1 {
        return Err(Error::Precondition(format!(
            "{}: several dense indecomposable summands {:?}; refusing to pick one",
            spec.name, dense.kept
        )));
    }
    let part = &dense.part;
    let splits = part.inclusion.then(&part.projection)?.cols == ChainMap::identity(&part.complex).cols;
    let undecided = dense
        .kept
        .iter()
        .any(|&i| decomposition.summands[i].certificate == LocalCertificate::Undecided);
    let certificates = ExtensionCertificates {
        restricts_over_open: dense.maximal,
        no_summand_off_open: dense.kept.iter().all(|&i| decomposition.summands[i].meets(&spec.open)),
        summand_of_pushforward: splits && decomposition.is_certified(),
        indecomposable: (!spec.smooth_proper).then(|| {
            dense.kept.len() == 1
                && matches!(decomposition.summands[dense.kept[0]].certificate, LocalCertificate::Field { .. })
        }),
        undecided,
    };
    Ok(GeometricExtension { provenance: spec.name.clone(), pushforward: push, decomposition, dense, certificates })
}

/// The unit `1 → P` of a pushforward along a map with connected source:
/// the generator of `Hom(1, P)` in degree 0 (fields only).
pub fn unit_map<R: Ring>(one: &InjComplex<R>, p: &InjComplex<R>) -> Result<ChainMap<R>> {
    if !one.ring().is_field() {
        return Err(Error::NotAField(one.ring().spec().to_string()));
    }
    let mut maps = hom_complex_in(one, p, Some((-1, 1))).cohomology_maps(0)?;
    if maps.len() != 1 {
        return Err(Error::Precondition(format!(
            "degree-0 sections of the pushforward have rank {}; the source is not connected",
            maps.len()
        )));
    }
    Ok(maps.remove(0))
}

/// Verdict of a comparison of two resolutions.
#[derive(Clone, Debug)]
pub struct Comparison<R: Ring> {
    pub first: GeometricExtension<R>,
    pub second: GeometricExtension<R>,
    pub verdict: IsoResult<R>,
    /// `β ∘ (1 → E₁) = unit · (1 → E₂)`: both composites are nonzero in a
    /// rank-one `Hom(1, E₂)`. `None` when not checkable (non-fields).
    pub triangle_commutes: Option<bool>,
}

/// Computes both extensions independently and an isomorphism between them;
/// the pushforwards must agree over the common open set.
pub fn compare_resolutions<R: KsRing>(
    a: &ResolutionSpec,
    b: &ResolutionSpec,
    ring: &R,
    seed: u64,
) -> Result<Comparison<R>> {
    if a.target().len() != b.target().len() || a.target().dims() != b.target().dims() {
        return Err(Error::Precondition("resolutions have different targets".into()));
    }
    let common = a.open.intersect(&b.open);
    let first = geometric_extension(a, ring, seed)?;
    let second = geometric_extension(b, ring, seed)?;
    // agreement over the open set
    let (sub, cells) = a.target().restrict_open(&common)?;
    let sub = Arc::new(sub);
    let (pa, pb) = (first.pushforward.restrict_open(sub.clone(), &cells), second.pushforward.restrict_open(sub, &cells));
    if let IsoResult::Distinct(why) = iso_test(&pa, &pb)? {
        return Err(Error::Precondition(format!("resolutions disagree over the open set: {why}")));
    }
    let verdict = iso_test(first.complex(), second.complex())?;
    let triangle_commutes = match &verdict {
        IsoResult::Isomorphic { forward, .. } if ring.is_field() => {
            let one = constant_sheaf(ring, a.target());
            let u1 = unit_map(&one, &first.pushforward)?.then(&first.summand().projection)?;
            let u2 = unit_map(&one, &second.pushforward)?.then(&second.summand().projection)?;
            let e2 = second.complex().minimize();
            let rank = hom_complex_in(&one, &e2, Some((-1, 1))).cohomology().dim(0);
            // forward runs between minimal forms
            let (m1, _, pi1) = first.complex().minimize_with_maps();
            let (_, iota2, _) = second.complex().minimize_with_maps();
            let _ = m1;
            let beta_u1 = u1.then(&pi1)?.then(forward)?.then(&iota2)?;
            Some(rank == 1 && !is_null_homotopic(&beta_u1)? && !is_null_homotopic(&u2)?)
        }
        _ => None,
    };
    Ok(Comparison { first, second, verdict, triangle_commutes })
}

/// Isomorphism of dense parts from supplied comparison maps between two
/// pushforwards which are inverse up to homotopy over `U`.
pub fn compare_via_maps<R: KsRing>(f: &ChainMap<R>, g: &ChainMap<R>, u: &OpenSet) -> Result<DenseIso<R>> {
    lift_iso_on_dense(f, g, u)
}

/// `Hom(1, E[i])` for all `i`: hypercohomology of the extension.
pub fn geom_cohomology<R: Ring>(e: &GeometricExtension<R>) -> GradedDims {
    e.complex().hypercohomology()
}

/// Ranks of the map induced on cohomology of global sections, per degree
/// (fields only).
pub fn induced_ranks<R: Ring>(f: &ChainMap<R>) -> Result<BTreeMap<i32, usize>> {
    let r = f.ring();
    if !r.is_field() {
        return Err(Error::NotAField(r.spec().to_string()));
    }
    let (s, t): (FreeComplex<R>, FreeComplex<R>) = (f.source.global_sections(), f.target.global_sections());
    let rs = reduce(&s, false, true);
    let rt = reduce(&t, false, true);
    let iota = rs.iota.as_ref().expect("tracked");
    let pi = rt.pi.as_ref().expect("tracked");
    let mut out = BTreeMap::new();
    let degrees: std::collections::BTreeSet<i32> = rs.kept.iter().map(|&g| s.degrees[g]).collect();
    for n in degrees {
        let src: Vec<usize> = (0..rs.kept.len()).filter(|&i| s.degrees[rs.kept[i]] == n).collect();
        let tgt: Vec<usize> = (0..rt.kept.len()).filter(|&i| t.degrees[rt.kept[i]] == n).collect();
        let mut m = Matrix::zeros(r, tgt.len(), src.len());
        for (j, &i) in src.iter().enumerate() {
            // image of the cycle in the target generators
            let mut img: BTreeMap<usize, R::Elem> = BTreeMap::new();
            for (g, c) in &iota[i] {
                for (h, x) in &f.cols[*g] {
                    let e = img.entry(*h).or_insert_with(|| r.zero());
                    r.add_mul(e, c, x);
                }
            }
            for (row, &k) in tgt.iter().enumerate() {
                let mut acc = r.zero();
                for (h, x) in &pi[k] {
                    if let Some(y) = img.get(h) {
                        r.add_mul(&mut acc, x, y);
                    }
                }
                m.set(row, j, acc);
            }
        }
        out.insert(n, m.rank());
    }
    Ok(out)
}

/// Geometrically pure and non-pure cohomology of a compact space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GpGnpReport {
    pub cohomology: BTreeMap<i32, usize>,
    /// Per resolution: `(name, pure dims, non-pure dims)`.
    pub rows: Vec<(String, BTreeMap<i32, usize>, BTreeMap<i32, usize>)>,
    /// The non-pure kernels agree across all resolutions.
    pub independent: bool,
}

impl GpGnpReport {
    pub fn non_pure(&self) -> &BTreeMap<i32, usize> {
        &self.rows[0].2
    }

    pub fn pure(&self) -> &BTreeMap<i32, usize> {
        &self.rows[0].1
    }
}

/// Kernel and image of `H^*(Y) → H^*(E)` induced by `1 → E`, for each
/// resolution (fields only).
pub fn gp_gnp<R: KsRing>(specs: &[ResolutionSpec], ring: &R, seed: u64) -> Result<GpGnpReport> {
    let first = specs.first().ok_or_else(|| Error::Precondition("no resolution given".into()))?;
    let one = constant_sheaf(ring, first.target());
    let cohomology = one.hypercohomology().dims();
    let mut rows = Vec::new();
    for spec in specs {
        let e = geometric_extension(spec, ring, seed)?;
        let u = unit_map(&one, &e.pushforward)?.then(&e.summand().projection)?;
        let ranks = induced_ranks(&u)?;
        let pure: BTreeMap<i32, usize> = cohomology.keys().map(|&n| (n, ranks.get(&n).copied().unwrap_or(0))).collect();
        let non_pure = cohomology.iter().map(|(&n, &h)| (n, h - pure[&n])).collect();
        rows.push((spec.name.clone(), pure, non_pure));
    }
    let independent = rows.windows(2).all(|w| w[0].2 == w[1].2);
    Ok(GpGnpReport { cohomology, rows, independent })
}

/// Outcome of the dense-support condition for a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionD {
    pub holds: bool,
    /// `(summand, maximal cells of U outside its support)`.
    pub violations: Vec<(usize, Vec<usize>)>,
    pub summands: usize,
}

/// Whether every summand of the pushforward along a smooth proper map has
/// support dense in `U`.
pub fn condition_d_check<R: KsRing>(map: &CellularMap, u: &OpenSet, ring: &R, seed: u64) -> Result<ConditionD> {
    let push = pushforward_constant(ring, map)?;
    let d = decompose_with(&push, seed)?;
    let k = map.target();
    let maximal: Vec<usize> = u.cells().iter().copied().filter(|&c| k.cofaces(c).len() == 1).collect();
    let mut violations = Vec::new();
    for (i, s) in d.summands.iter().enumerate() {
        let missing: Vec<usize> = maximal.iter().copied().filter(|c| !s.support.contains(c)).collect();
        if !missing.is_empty() {
            violations.push((i, missing));
        }
    }
    Ok(ConditionD { holds: violations.is_empty(), violations, summands: d.len() })
}

/// The maps `1 → E → ω[-2d]` and their composite on the interior of the
/// target, where both ends are manifolds with nonzero dualizing stalks.
#[derive(Clone, Debug)]
pub struct Interpolation<R: Ring> {
    /// The interior (an open subcomplex) and its cells in the target.
    pub interior: Arc<CellComplex>,
    pub interior_cells: Vec<usize>,
    pub unit: ChainMap<R>,
    pub trace: ChainMap<R>,
    pub composite: Orientation<R>,
    pub certified: bool,
}

/// Largest open set of cells with nonzero dualizing stalk.
pub fn interior<R: Ring>(ring: &R, k: &Arc<CellComplex>) -> Result<OpenSet> {
    let w = crate::sixfunctors::dualizing_complex(ring, k).minimize();
    let good: Vec<bool> = (0..k.len()).map(|c| !w.stalk(c).is_zero()).collect();
    // drop cells with a bad coface
    let cells = (0..k.len()).filter(|&c| good[c] && k.cofaces(c).iter().all(|&t| good[t]));
    OpenSet::new(k, cells)
}

/// Composes the unit, projection, inclusion, an orientation of the source
/// and the trace into a map `1 → ω[-2d]` on the interior, and certifies it
/// is an orientation over the open set (fields only).
pub fn interpolation<R: KsRing>(spec: &ResolutionSpec, ring: &R, seed: u64) -> Result<Interpolation<R>> {
    let y = spec.target();
    let y_in = interior(ring, y)?;
    let (f, _, _) = spec.map.restrict_over(&y_in)?;
    let (yo, ycells) = (f.target().clone(), y_in.cells().to_vec());
    let xo = f.source().clone();
    let n = spec.real_dim as i32;
    let open_cells: Vec<usize> = (0..yo.len()).filter(|&c| spec.open.contains(ycells[c])).collect();
    let u = OpenSet::new(&yo, open_cells)?;
    let sub = ResolutionSpec { name: spec.name.clone(), map: f.clone(), open: u.clone(), smooth_proper: spec.smooth_proper, real_dim: spec.real_dim };
    let e = geometric_extension(&sub, ring, seed)?;

    let cx = BmContext::new(ring, &xo);
    let o = orientation_search_in(&cx, &OpenSet::all(&xo), n)?
        .ok_or_else(|| Error::Precondition(format!("{}: no orientation of the source", spec.name)))?;
    let cy = BmContext::new(ring, &yo);

    // f_* 1 as relabelled model, with comparison maps to the minimal one
    let a = cx.one.relabel(yo.clone(), f.cells());
    let (p, iota_m, pi_m) = a.minimize_with_maps();
    // the extension was computed on an independently minimized model
    let bridge = match iso_test(&p, &e.pushforward)? {
        IsoResult::Isomorphic { forward, backward } => (forward, backward),
        _ => return Err(Error::Precondition("pushforward models disagree".into())),
    };
    let into_e = bridge.0.then(&e.summand().projection)?;
    let out_of_e = e.summand().inclusion.then(&bridge.1)?;
    let unit = unit_map(&cy.one, &p)?.then(&into_e)?;

    let pushed_o = o.class.map.relabel(yo.clone(), f.cells());
    let counit = counit(&f, &cx.omega, &cy.omega, n)?;
    let trace = out_of_e.then(&iota_m)?.then(&pushed_o)?.then(&counit)?;
    let _ = pi_m;
    let map = unit.then(&trace)?;
    let cycle = cy.cycle_of(&map);
    let composite = Orientation { class: BmClass { degree: n, map, cycle }, open: u };
    let certified = composite.certify();
    Ok(Interpolation { interior: yo, interior_cells: ycells, unit, trace, composite, certified })
}

/// The trace `φ_* ω_X[-n] → ω_Y[-n]`: a cell goes to its image with the
/// orientation sign when the dimension is kept.
fn counit<R: Ring>(f: &CellularMap, wx: &InjComplex<R>, wy: &InjComplex<R>, n: i32) -> Result<ChainMap<R>> {
    let r = wx.ring();
    let mut gen_of = vec![usize::MAX; wy.space().len()];
    for g in 0..wy.len() {
        gen_of[wy.label(g)] = g;
    }
    let cols = (0..wx.len())
        .map(|g| {
            let s = f.degree_sign(wx.label(g));
            if s == 0 {
                vec![]
            } else {
                vec![(gen_of[f.apply(wx.label(g))], r.from_i64(s))]
            }
        })
        .collect();
    let src = wx.relabel(f.target().clone(), f.cells()).shift(-n);
    let m = ChainMap::from_columns(&src, &wy.shift(-n), cols);
    m.validate()?;
    Ok(m)
}
