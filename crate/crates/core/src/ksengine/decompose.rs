use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cellposet::OpenSet;
use crate::error::{Error, Result};
use crate::ksengine::endo::{hom0_generators, is_null_homotopic, StrictEnd};
use crate::ksengine::split::{invert_chain_map, split_idempotent};
use crate::ksengine::{internal, KsRing, SplitSearch};
use crate::linalg::sparse::SparseVec;
use crate::ring::Ring;
use crate::shcomplex::{ChainMap, GradedDims, InjComplex};

/// Evidence that a summand is indecomposable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LocalCertificate {
    /// The semisimple quotient of the endomorphism ring is a field of this
    /// degree over the residue field.
    Field { residue_degree: usize },
    /// No splitting found and no field certificate (rational coefficients).
    Undecided,
    Unchecked,
}

/// A direct summand with its inclusion into and projection from the
/// decomposed complex.
#[derive(Clone, Debug)]
pub struct Summand<R: Ring> {
    pub complex: InjComplex<R>,
    pub inclusion: ChainMap<R>,
    pub projection: ChainMap<R>,
    /// Cells with nonzero stalk cohomology.
    pub support: Vec<usize>,
    /// Whether the support is closed under passing to faces (reported only).
    pub support_closed: bool,
    pub certificate: LocalCertificate,
}

impl<R: Ring> Summand<R> {
    pub(crate) fn new(
        complex: InjComplex<R>,
        inclusion: ChainMap<R>,
        projection: ChainMap<R>,
        certificate: LocalCertificate,
    ) -> Result<Self> {
        let support = complex.support();
        let k = complex.space();
        let mut mask = vec![false; k.len()];
        for &c in &support {
            mask[c] = true;
        }
        let support_closed = support.iter().all(|&c| k.faces(c).iter().all(|&f| mask[f]));
        Ok(Summand { complex, inclusion, projection, support, support_closed, certificate })
    }

    fn whole(c: &InjComplex<R>) -> Result<Self> {
        Self::new(c.clone(), ChainMap::identity(c), ChainMap::identity(c), LocalCertificate::Unchecked)
    }

    /// Re-minimizes the summand, composing the comparison maps.
    pub(crate) fn minimized(self) -> Result<Self> {
        if self.complex.is_minimal() {
            return Ok(self);
        }
        let (m, iota, pi) = self.complex.minimize_with_maps();
        let inclusion = iota.then(&self.inclusion)?;
        let projection = self.projection.then(&pi)?;
        Self::new(m, inclusion, projection, self.certificate)
    }

    pub fn stalks(&self) -> Vec<GradedDims> {
        (0..self.complex.space().len()).map(|c| self.complex.stalk(c)).collect()
    }

    /// Whether the summand has nonzero cohomology somewhere on `U`.
    pub fn meets(&self, u: &OpenSet) -> bool {
        self.support.iter().any(|&c| u.contains(c))
    }
}

/// A decomposition of a minimal complex into summands with strict
/// completeness certificates.
#[derive(Clone, Debug)]
pub struct Decomposition<R: Ring> {
    pub source: InjComplex<R>,
    pub summands: Vec<Summand<R>>,
    /// `Σ ι_k π_k = 1`.
    pub sum_is_identity: bool,
    /// `π_j ι_k = δ_jk`.
    pub orthogonal: bool,
    /// Some summand could not be certified indecomposable.
    pub undecided: bool,
}

impl<R: Ring> Decomposition<R> {
    fn certify(source: InjComplex<R>, summands: Vec<Summand<R>>) -> Result<Self> {
        let mut total = ChainMap::zero(&source, &source);
        for s in &summands {
            total = total.add(&s.projection.then(&s.inclusion)?)?;
        }
        let sum_is_identity = total.cols == ChainMap::identity(&source).cols;
        let mut orthogonal = true;
        for (j, a) in summands.iter().enumerate() {
            for (k, b) in summands.iter().enumerate() {
                let m = b.inclusion.then(&a.projection)?;
                let ok = if j == k { m.cols == ChainMap::identity(&b.complex).cols } else { m.is_zero() };
                orthogonal &= ok;
            }
        }
        let undecided = summands.iter().any(|s| s.certificate != LocalCertificate::Unchecked && matches!(s.certificate, LocalCertificate::Undecided));
        Ok(Decomposition { source, summands, sum_is_identity, orthogonal, undecided })
    }

    pub fn is_certified(&self) -> bool {
        self.sum_is_identity && self.orthogonal
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// The direct sum of the chosen summands with its inclusion into and
    /// projection from the source.
    pub fn assemble(&self, which: &[usize]) -> Result<Summand<R>> {
        let src = &self.source;
        let parts: Vec<&InjComplex<R>> = which.iter().map(|&i| &self.summands[i].complex).collect();
        let sum = if parts.is_empty() {
            InjComplex::zero(src.ring(), src.space().clone())
        } else {
            InjComplex::direct_sum(&parts)?
        };
        let mut inc: Vec<SparseVec<R::Elem>> = Vec::with_capacity(sum.len());
        let mut proj: Vec<Vec<(usize, R::Elem)>> = vec![Vec::new(); src.len()];
        let mut off = 0;
        for &i in which {
            let s = &self.summands[i];
            inc.extend(s.inclusion.cols.iter().cloned());
            for (g, col) in s.projection.cols.iter().enumerate() {
                proj[g].extend(col.iter().map(|(h, x)| (h + off, x.clone())));
            }
            off += s.complex.len();
        }
        let inclusion = ChainMap::from_columns(&sum, src, inc);
        let projection = ChainMap::from_columns(src, &sum, proj);
        let cert = if which.len() == 1 { self.summands[which[0]].certificate.clone() } else { LocalCertificate::Unchecked };
        Summand::new(sum, inclusion, projection, cert)
    }
}

/// Full decomposition with the default seed.
pub fn decompose<R: KsRing>(c: &InjComplex<R>) -> Result<Decomposition<R>> {
    decompose_with(c, 0)
}

/// Recursive splitting: the semisimple quotient of the strict endomorphism
/// image is searched for an idempotent, which is lifted by Newton iteration
/// and split off; leaves carry a field certificate or an undecided flag.
pub fn decompose_with<R: KsRing>(c: &InjComplex<R>, seed: u64) -> Result<Decomposition<R>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = c.minimize();
    let mut stack = vec![Summand::whole(&m)?];
    let mut leaves = Vec::new();
    while let Some(s) = stack.pop() {
        if s.complex.is_empty() {
            continue;
        }
        let end = StrictEnd::new(&s.complex)?;
        let rad = end.algebra.radical()?;
        let q = end.algebra.quotient(&rad)?;
        match q.algebra.find_split(&mut rng, 64)? {
            SplitSearch::Division { degree } => {
                leaves.push(Summand { certificate: LocalCertificate::Field { residue_degree: degree }, ..s });
            }
            SplitSearch::Undecided => leaves.push(Summand { certificate: LocalCertificate::Undecided, ..s }),
            SplitSearch::Split(u) => {
                let k = end.algebra.ring();
                let mut x = end.algebra.zero_vec();
                for (ui, sec) in u.iter().zip(&q.section) {
                    for (xi, si) in x.iter_mut().zip(sec) {
                        k.add_mul(xi, ui, si);
                    }
                }
                let e = end.lift(&x)?;
                let (a, b) = split_idempotent(&s.complex, &e)?;
                for part in [b, a] {
                    let inclusion = part.inclusion.then(&s.inclusion)?;
                    let projection = s.projection.then(&part.projection)?;
                    stack.push(Summand::new(part.complex, inclusion, projection, LocalCertificate::Unchecked)?);
                }
            }
        }
    }
    // deterministic order: by smallest (degree, label) of the generators
    leaves.sort_by_key(|s| {
        let c = &s.complex;
        (0..c.len()).map(|g| (c.degree(g), c.label(g))).min()
    });
    Decomposition::certify(m, leaves)
}

/// Summands with nonzero cohomology on `U`, and whether every discarded
/// summand restricts to an acyclic complex there.
#[derive(Clone, Debug)]
pub struct DensePart<R: Ring> {
    pub kept: Vec<usize>,
    pub discarded: Vec<usize>,
    pub part: Summand<R>,
    pub maximal: bool,
}

pub fn dense_part<R: Ring>(d: &Decomposition<R>, u: &OpenSet) -> Result<DensePart<R>> {
    let (kept, discarded): (Vec<usize>, Vec<usize>) = (0..d.len()).partition(|&i| d.summands[i].meets(u));
    let maximal = discarded.iter().all(|&i| u.cells().iter().all(|&c| d.summands[i].complex.stalk(c).is_zero()));
    Ok(DensePart { part: d.assemble(&kept)?, kept, discarded, maximal })
}

/// Outcome of an isomorphism test.
#[derive(Clone, Debug)]
pub enum IsoResult<R: Ring> {
    /// Mutually inverse maps between the minimal forms.
    Isomorphic { forward: ChainMap<R>, backward: ChainMap<R> },
    Distinct(String),
    Undecided(String),
}

impl<R: Ring> IsoResult<R> {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoResult::Isomorphic { .. })
    }
}

/// Maps `f: X → Y`, `g: Y → X` with `g f = 1` for indecomposables, found by
/// searching generator pairs for a composite outside the radical.
fn match_indecomposables<R: KsRing>(
    x: &Summand<R>,
    y: &Summand<R>,
    end_x: &StrictEnd<R>,
    q: &crate::ksengine::Quotient<R::Field>,
) -> Result<Option<(ChainMap<R>, ChainMap<R>)>> {
    if x.complex.multiplicities() != y.complex.multiplicities() {
        return Ok(None);
    }
    let fs = hom0_generators(&x.complex, &y.complex)?;
    let gs = hom0_generators(&y.complex, &x.complex)?;
    let k = end_x.algebra.ring();
    for f in &fs {
        for g in &gs {
            let u = f.then(g)?;
            let b = end_x.project(&u)?;
            let s = q.projection.mul_vec(&b)?;
            if s.iter().all(|v| k.is_zero(v)) {
                continue;
            }
            let Some(ui) = invert_chain_map(&u)? else { continue };
            let g2 = g.then(&ui)?;
            if f.then(&g2)?.cols == ChainMap::identity(&x.complex).cols
                && g2.then(f)?.cols == ChainMap::identity(&y.complex).cols
            {
                return Ok(Some((f.clone(), g2)));
            }
        }
    }
    Ok(None)
}

/// Decides whether two complexes are isomorphic by matching indecomposable
/// summands; returns explicit inverse maps between the minimal forms or a
/// distinguishing invariant.
pub fn iso_test<R: KsRing>(c: &InjComplex<R>, d: &InjComplex<R>) -> Result<IsoResult<R>> {
    let (a, b) = (c.minimize(), d.minimize());
    if a.multiplicities() != b.multiplicities() {
        for cell in 0..a.space().len() {
            if a.stalk(cell) != b.stalk(cell) {
                return Ok(IsoResult::Distinct(format!(
                    "stalks differ at cell {cell}: {} vs {}",
                    a.stalk(cell),
                    b.stalk(cell)
                )));
            }
        }
        return Ok(IsoResult::Distinct("minimal generator multiplicities differ".into()));
    }
    let da = decompose(&a)?;
    let db = decompose(&b)?;
    let mut used = vec![false; db.len()];
    let mut forward = ChainMap::zero(&da.source, &db.source);
    let mut backward = ChainMap::zero(&db.source, &da.source);
    for (i, x) in da.summands.iter().enumerate() {
        let end = StrictEnd::new(&x.complex)?;
        let rad = end.algebra.radical()?;
        let q = end.algebra.quotient(&rad)?;
        let mut found = false;
        for (j, y) in db.summands.iter().enumerate() {
            if used[j] {
                continue;
            }
            if let Some((f, g)) = match_indecomposables(x, y, &end, &q)? {
                used[j] = true;
                found = true;
                forward = forward.add(&x.projection.then(&f)?.then(&y.inclusion)?)?;
                backward = backward.add(&y.projection.then(&g)?.then(&x.inclusion)?)?;
                break;
            }
        }
        if !found {
            let msg = format!("summand {i} of the first complex has no isomorphic partner");
            return Ok(if da.undecided || db.undecided { IsoResult::Undecided(msg) } else { IsoResult::Distinct(msg) });
        }
    }
    let ida = ChainMap::identity(&da.source).cols;
    let idb = ChainMap::identity(&db.source).cols;
    if forward.then(&backward)?.cols != ida || backward.then(&forward)?.cols != idb {
        return Err(internal("assembled isomorphism is not invertible"));
    }
    Ok(IsoResult::Isomorphic { forward, backward })
}

/// The part of a complex with labels in `U` (a quotient complex) and the
/// kept generators.
fn restrict_to<R: Ring>(c: &InjComplex<R>, u: &OpenSet) -> Result<(InjComplex<R>, Vec<usize>)> {
    let keep: Vec<usize> = (0..c.len()).filter(|&g| u.contains(c.label(g))).collect();
    let fc = c.restrict_generators(&keep);
    Ok((InjComplex::new(c.ring(), c.space().clone(), fc.labels, fc.degrees, fc.d)?, keep))
}

fn restrict_map<R: Ring>(f: &ChainMap<R>, u: &OpenSet) -> Result<ChainMap<R>> {
    let (s, ks) = restrict_to(&f.source, u)?;
    let (t, kt) = restrict_to(&f.target, u)?;
    Ok(ChainMap::from_columns(&s, &t, f.restrict_to_labels(&ks, &kt)))
}

/// Mutually inverse isomorphisms between dense parts.
#[derive(Clone, Debug)]
pub struct DenseIso<R: Ring> {
    pub source_dense: Summand<R>,
    pub target_dense: Summand<R>,
    pub forward: ChainMap<R>,
    pub backward: ChainMap<R>,
}

/// Given `f: A → B`, `g: B → A` inverse to each other up to homotopy over
/// `U`, the composites `π f ι` between the `U`-dense parts are inverse
/// isomorphisms.
pub fn lift_iso_on_dense<R: KsRing>(f: &ChainMap<R>, g: &ChainMap<R>, u: &OpenSet) -> Result<DenseIso<R>> {
    let (a, b) = (&f.source, &f.target);
    let r = a.ring();
    let minus = r.neg(&r.one());
    let ra = restrict_map(&f.then(g)?.axpy(&minus, &ChainMap::identity(a))?, u)?;
    if !is_null_homotopic(&ra)? {
        return Err(Error::Precondition("g∘f - 1 is not null-homotopic over the open set".into()));
    }
    let rb = restrict_map(&g.then(f)?.axpy(&minus, &ChainMap::identity(b))?, u)?;
    if !is_null_homotopic(&rb)? {
        return Err(Error::Precondition("f∘g - 1 is not null-homotopic over the open set".into()));
    }
    // work on minimal forms
    let (am, ia, pa) = a.minimize_with_maps();
    let (bm, ib, pb) = b.minimize_with_maps();
    let fm = ia.then(f)?.then(&pb)?;
    let gm = ib.then(g)?.then(&pa)?;
    let da = dense_part(&decompose(&am)?, u)?;
    let db = dense_part(&decompose(&bm)?, u)?;
    let mu = da.part.inclusion.then(&fm)?.then(&db.part.projection)?;
    let nu = db.part.inclusion.then(&gm)?.then(&da.part.projection)?;
    let back = invert_chain_map(&mu)?.ok_or_else(|| internal("dense comparison map is not invertible"))?;
    if invert_chain_map(&mu.then(&nu)?)?.is_none() || invert_chain_map(&nu.then(&mu)?)?.is_none() {
        return Err(internal("dense composites are not isomorphisms"));
    }
    Ok(DenseIso { source_dense: da.part, target_dense: db.part, forward: mu, backward: back })
}
