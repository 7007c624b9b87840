use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cellposet::{CellComplex, OpenSet};
use crate::error::{Error, Result};
use crate::linalg::elim::{reduce, residual_cohomology, FreeComplex};
use crate::linalg::sparse::{axpy, collect_sparse, SparseVec};
use crate::ring::Ring;
use crate::shcomplex::GradedDims;

/// A bounded complex of direct sums of indecomposable injective
/// representations `I_σ` (with `I_σ(ρ) = Λ` for `ρ ≤ σ`).
///
/// Each generator carries a cell label and a degree. A differential
/// component `g -> h` is a scalar and requires `label(h) ≤ label(g)`, since
/// `Hom(I_σ, I_τ) = Λ` exactly when `τ ≤ σ`. Evaluation at `ρ` keeps the
/// generators with label `≥ ρ`; sections over an open set keep the labels
/// inside it.
#[derive(Clone, Debug)]
pub struct InjComplex<R: Ring> {
    ring: R,
    space: Arc<CellComplex>,
    labels: Vec<usize>,
    degrees: Vec<i32>,
    d: Vec<SparseVec<R::Elem>>,
}

impl<R: Ring> InjComplex<R> {
    /// Validates labels, degrees and `d∘d = 0`.
    pub fn new(
        ring: &R,
        space: Arc<CellComplex>,
        labels: Vec<usize>,
        degrees: Vec<i32>,
        d: Vec<SparseVec<R::Elem>>,
    ) -> Result<Self> {
        let c = Self::new_unchecked(ring, space, labels, degrees, d);
        c.validate()?;
        Ok(c)
    }

    pub(crate) fn new_unchecked(
        ring: &R,
        space: Arc<CellComplex>,
        labels: Vec<usize>,
        degrees: Vec<i32>,
        mut d: Vec<SparseVec<R::Elem>>,
    ) -> Self {
        for v in d.iter_mut() {
            v.retain(|e| !ring.is_zero(&e.1));
            v.sort_by_key(|e| e.0);
        }
        InjComplex {
            ring: ring.clone(),
            space,
            labels,
            degrees,
            d,
        }
    }

    pub fn zero(ring: &R, space: Arc<CellComplex>) -> Self {
        Self::new_unchecked(ring, space, vec![], vec![], vec![])
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if self.degrees.len() != n || self.d.len() != n {
            return Err(Error::InvalidRep(
                "labels, degrees and differential differ in length".into(),
            ));
        }
        for g in 0..n {
            if self.labels[g] >= self.space.len() {
                return Err(Error::InvalidRep(format!(
                    "generator {g} has label out of range"
                )));
            }
            for (h, _) in &self.d[g] {
                if *h >= n || self.degrees[*h] != self.degrees[g] + 1 {
                    return Err(Error::InvalidRep(format!(
                        "component {g} -> {h} does not raise degree by one"
                    )));
                }
                if !self.space.le(self.labels[*h], self.labels[g]) {
                    return Err(Error::InvalidRep(format!(
                        "component {g} -> {h} goes from label {} to label {} which is not below it",
                        self.labels[g], self.labels[*h]
                    )));
                }
            }
        }
        if !self.as_free().check() {
            return Err(Error::InvalidRep("d∘d ≠ 0".into()));
        }
        Ok(())
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn space(&self) -> &Arc<CellComplex> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn differential(&self) -> &[SparseVec<R::Elem>] {
        &self.d
    }

    pub fn label(&self, g: usize) -> usize {
        self.labels[g]
    }

    pub fn degree(&self, g: usize) -> i32 {
        self.degrees[g]
    }

    /// The underlying labelled complex of free modules.
    pub fn as_free(&self) -> FreeComplex<R> {
        FreeComplex::new(
            &self.ring,
            self.degrees.clone(),
            self.labels.clone(),
            self.d.clone(),
        )
    }

    /// Generators grouped by label.
    pub fn by_label(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.space.len()];
        for (g, &l) in self.labels.iter().enumerate() {
            out[l].push(g);
        }
        out
    }

    /// Subcomplex spanned by the given generators (which must be closed
    /// under the differential restricted to them, e.g. an up-set of labels).
    pub fn restrict_generators(&self, keep: &[usize]) -> FreeComplex<R> {
        let mut idx = vec![usize::MAX; self.len()];
        for (i, &g) in keep.iter().enumerate() {
            idx[g] = i;
        }
        let d = keep
            .iter()
            .map(|&g| {
                self.d[g]
                    .iter()
                    .filter(|e| idx[e.0] != usize::MAX)
                    .map(|(h, c)| (idx[*h], c.clone()))
                    .collect()
            })
            .collect();
        FreeComplex::new(
            &self.ring,
            keep.iter().map(|&g| self.degrees[g]).collect(),
            keep.iter().map(|&g| self.labels[g]).collect(),
            d,
        )
    }

    /// Generators whose label lies in the open star of `ρ`.
    pub fn star_generators(&self, rho: usize) -> Vec<usize> {
        let by = self.by_label();
        let mut out: Vec<usize> = self
            .space
            .cofaces(rho)
            .iter()
            .flat_map(|&c| by[c].iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    /// The complex of the representation evaluated at `ρ`.
    pub fn evaluation(&self, rho: usize) -> FreeComplex<R> {
        self.restrict_generators(&self.star_generators(rho))
    }

    /// Derived sections over an open set: the labels inside it.
    pub fn sections(&self, u: &OpenSet) -> FreeComplex<R> {
        let m = u.mask(self.space.len());
        let keep: Vec<usize> = (0..self.len()).filter(|&g| m[self.labels[g]]).collect();
        self.restrict_generators(&keep)
    }

    /// Global sections.
    pub fn global_sections(&self) -> FreeComplex<R> {
        FreeComplex::new(
            &self.ring,
            self.degrees.clone(),
            self.labels.clone(),
            self.d.clone(),
        )
    }

    /// Graded stalk (cohomology of the evaluation at `ρ`).
    pub fn stalk(&self, rho: usize) -> GradedDims {
        GradedDims::from_structure(&self.evaluation(rho).cohomology())
    }

    /// Full module structure of the stalk (over `Z/p^k`).
    pub fn stalk_structure(&self, rho: usize) -> BTreeMap<i32, Vec<u32>> {
        self.evaluation(rho).cohomology()
    }

    /// Graded costalk `i_ρ^!`: the subcomplex of generators labelled `ρ`.
    pub fn costalk(&self, rho: usize) -> GradedDims {
        let keep: Vec<usize> = (0..self.len()).filter(|&g| self.labels[g] == rho).collect();
        GradedDims::from_structure(&self.restrict_generators(&keep).cohomology())
    }

    pub fn costalk_structure(&self, rho: usize) -> BTreeMap<i32, Vec<u32>> {
        let keep: Vec<usize> = (0..self.len()).filter(|&g| self.labels[g] == rho).collect();
        self.restrict_generators(&keep).cohomology()
    }

    /// Cohomology of global sections.
    pub fn hypercohomology(&self) -> GradedDims {
        GradedDims::from_structure(&self.global_sections().cohomology())
    }

    /// Cells at which the stalk is nonzero.
    pub fn support(&self) -> Vec<usize> {
        let mut cand: Vec<bool> = vec![false; self.space.len()];
        // the stalk at ρ can only be nonzero if some generator sits in its star
        for &l in &self.labels {
            for &f in self.space.faces(l) {
                cand[f] = true;
            }
        }
        (0..self.space.len())
            .filter(|&rho| cand[rho] && !self.stalk(rho).is_zero())
            .collect()
    }

    /// Whether every stalk vanishes.
    pub fn is_acyclic(&self) -> bool {
        self.support().is_empty()
    }

    /// Minimal model (no unit component between equal labels).
    pub fn minimize(&self) -> InjComplex<R> {
        let red = reduce(&self.as_free(), true, false);
        self.from_reduction(&red)
    }

    /// Minimal model with comparison maps `ι: min -> self`, `π: self -> min`.
    pub fn minimize_with_maps(&self) -> (InjComplex<R>, ChainMap<R>, ChainMap<R>) {
        let red = reduce(&self.as_free(), true, true);
        let m = self.from_reduction(&red);
        let iota = ChainMap::from_columns(&m, self, red.iota.clone().expect("tracked"));
        // transpose pi rows into columns over original generators
        let rows = red.pi.as_ref().expect("tracked");
        let mut cols: Vec<Vec<(usize, R::Elem)>> = vec![Vec::new(); self.len()];
        for (i, row) in rows.iter().enumerate() {
            for (o, c) in row {
                cols[*o].push((i, c.clone()));
            }
        }
        let pi = ChainMap::from_columns(self, &m, cols);
        (m, iota, pi)
    }

    pub(crate) fn from_reduction(&self, red: &crate::linalg::Reduction<R>) -> InjComplex<R> {
        InjComplex::new_unchecked(
            &self.ring,
            self.space.clone(),
            red.kept.iter().map(|&g| self.labels[g]).collect(),
            red.kept.iter().map(|&g| self.degrees[g]).collect(),
            red.d.clone(),
        )
    }

    /// Whether no unit component joins two generators of equal label.
    pub fn is_minimal(&self) -> bool {
        (0..self.len()).all(|g| {
            self.d[g]
                .iter()
                .all(|(h, c)| self.labels[*h] != self.labels[g] || !self.ring.is_unit(c))
        })
    }

    /// `C[n]`: degrees decrease by `n`, differential negated for odd `n`.
    pub fn shift(&self, n: i32) -> InjComplex<R> {
        let r = &self.ring;
        let d = if n % 2 == 0 {
            self.d.clone()
        } else {
            self.d
                .iter()
                .map(|v| v.iter().map(|(h, c)| (*h, r.neg(c))).collect())
                .collect()
        };
        InjComplex::new_unchecked(
            r,
            self.space.clone(),
            self.labels.clone(),
            self.degrees.iter().map(|x| x - n).collect(),
            d,
        )
    }

    pub fn direct_sum(parts: &[&InjComplex<R>]) -> Result<InjComplex<R>> {
        let first = parts
            .first()
            .ok_or_else(|| Error::ShapeMismatch("empty direct sum".into()))?;
        let mut labels = Vec::new();
        let mut degrees = Vec::new();
        let mut d = Vec::new();
        for p in parts {
            if !Arc::ptr_eq(&p.space, &first.space) && p.space.len() != first.space.len() {
                return Err(Error::ShapeMismatch(
                    "direct sum over different spaces".into(),
                ));
            }
            let off = labels.len();
            labels.extend_from_slice(&p.labels);
            degrees.extend_from_slice(&p.degrees);
            d.extend(p.d.iter().map(|v| {
                v.iter()
                    .map(|(h, c)| (h + off, c.clone()))
                    .collect::<Vec<_>>()
            }));
        }
        Ok(InjComplex::new_unchecked(
            &first.ring,
            first.space.clone(),
            labels,
            degrees,
            d,
        ))
    }

    /// Pushforward along a map sending each label to a new cell of `target`;
    /// for injectives this is relabelling.
    pub fn relabel(&self, target: Arc<CellComplex>, cell_map: &[usize]) -> InjComplex<R> {
        InjComplex::new_unchecked(
            &self.ring,
            target,
            self.labels.iter().map(|&l| cell_map[l]).collect(),
            self.degrees.clone(),
            self.d.clone(),
        )
    }

    /// Restriction to an open subcomplex `U` (given with its cell list as
    /// produced by `restrict_open`).
    pub fn restrict_open(&self, sub: Arc<CellComplex>, sub_cells: &[usize]) -> InjComplex<R> {
        let mut idx = vec![usize::MAX; self.space.len()];
        for (i, &c) in sub_cells.iter().enumerate() {
            idx[c] = i;
        }
        let keep: Vec<usize> = (0..self.len())
            .filter(|&g| idx[self.labels[g]] != usize::MAX)
            .collect();
        let f = self.restrict_generators(&keep);
        InjComplex::new_unchecked(
            &self.ring,
            sub,
            f.labels.iter().map(|&l| idx[l]).collect(),
            f.degrees,
            f.d,
        )
    }

    /// Generator count per (label, degree).
    pub fn multiplicities(&self) -> BTreeMap<(usize, i32), usize> {
        let mut m = BTreeMap::new();
        for g in 0..self.len() {
            *m.entry((self.labels[g], self.degrees[g])).or_default() += 1;
        }
        m
    }

    /// Reorders generators by a permutation (`perm[new] = old`) and rescales
    /// each by a unit, giving an isomorphic presentation.
    pub fn permuted(&self, perm: &[usize], scales: &[R::Elem]) -> InjComplex<R> {
        let r = &self.ring;
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let d = perm
            .iter()
            .enumerate()
            .map(|(new, &old)| {
                let s = &scales[new];
                collect_sparse(
                    r,
                    self.d[old].iter().map(|(h, c)| {
                        let t = inv[*h];
                        (
                            t,
                            r.mul(&r.mul(c, s), &r.inv(&scales[t]).expect("unit scale")),
                        )
                    }),
                )
            })
            .collect();
        InjComplex::new_unchecked(
            r,
            self.space.clone(),
            perm.iter().map(|&o| self.labels[o]).collect(),
            perm.iter().map(|&o| self.degrees[o]).collect(),
            d,
        )
    }
}

/// A degree-preserving map of injective complexes over one space: `cols[g]`
/// is the image of source generator `g` on target generators.
#[derive(Clone, Debug)]
pub struct ChainMap<R: Ring> {
    pub source: InjComplex<R>,
    pub target: InjComplex<R>,
    pub cols: Vec<SparseVec<R::Elem>>,
}

impl<R: Ring> ChainMap<R> {
    pub fn from_columns(
        source: &InjComplex<R>,
        target: &InjComplex<R>,
        mut cols: Vec<SparseVec<R::Elem>>,
    ) -> Self {
        for c in cols.iter_mut() {
            c.sort_by_key(|e| e.0);
            c.retain(|e| !source.ring.is_zero(&e.1));
        }
        ChainMap {
            source: source.clone(),
            target: target.clone(),
            cols,
        }
    }

    pub fn identity(c: &InjComplex<R>) -> Self {
        let one = c.ring.one();
        Self::from_columns(c, c, (0..c.len()).map(|i| vec![(i, one.clone())]).collect())
    }

    pub fn zero(source: &InjComplex<R>, target: &InjComplex<R>) -> Self {
        Self::from_columns(source, target, vec![Vec::new(); source.len()])
    }

    pub fn ring(&self) -> &R {
        &self.source.ring
    }

    /// Checks labels, degrees and commutation with the differentials.
    pub fn validate(&self) -> Result<()> {
        let (s, t) = (&self.source, &self.target);
        for g in 0..s.len() {
            for (h, _) in &self.cols[g] {
                if s.degrees[g] != t.degrees[*h] {
                    return Err(Error::InvalidRep(format!(
                        "map component {g} -> {h} changes degree"
                    )));
                }
                if !s.space.le(t.labels[*h], s.labels[g]) {
                    return Err(Error::InvalidRep(format!(
                        "map component {g} -> {h} violates the label order"
                    )));
                }
            }
        }
        if !self.commutes() {
            return Err(Error::InvalidRep(
                "map does not commute with the differentials".into(),
            ));
        }
        Ok(())
    }

    fn apply_target_d(&self, v: &SparseVec<R::Elem>) -> SparseVec<R::Elem> {
        let r = self.ring();
        let mut acc = Vec::new();
        for (h, c) in v {
            acc = axpy(r, &acc, c, &self.target.d[*h]);
        }
        acc
    }

    /// Image of a sparse vector of source generators.
    pub fn apply(&self, v: &SparseVec<R::Elem>) -> SparseVec<R::Elem> {
        let r = self.ring();
        let mut acc = Vec::new();
        for (g, c) in v {
            acc = axpy(r, &acc, c, &self.cols[*g]);
        }
        acc
    }

    pub fn commutes(&self) -> bool {
        (0..self.source.len())
            .all(|g| self.apply_target_d(&self.cols[g]) == self.apply(&self.source.d[g]))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap<R>) -> Result<ChainMap<R>> {
        if self.target.len() != other.source.len() {
            return Err(Error::ShapeMismatch(
                "composition of non-composable chain maps".into(),
            ));
        }
        let cols = self.cols.iter().map(|c| other.apply(c)).collect();
        Ok(ChainMap {
            source: self.source.clone(),
            target: other.target.clone(),
            cols,
        })
    }

    pub fn add(&self, other: &ChainMap<R>) -> Result<ChainMap<R>> {
        self.axpy(&self.ring().one(), other)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: &R::Elem, other: &ChainMap<R>) -> Result<ChainMap<R>> {
        if self.cols.len() != other.cols.len() {
            return Err(Error::ShapeMismatch(
                "adding chain maps of different shapes".into(),
            ));
        }
        let r = self.ring();
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| axpy(r, a, c, b))
            .collect();
        Ok(ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            cols,
        })
    }

    pub fn scale(&self, c: &R::Elem) -> ChainMap<R> {
        let r = self.ring();
        let cols = self
            .cols
            .iter()
            .map(|v| {
                v.iter()
                    .map(|(h, x)| (*h, r.mul(x, c)))
                    .filter(|e| !r.is_zero(&e.1))
                    .collect()
            })
            .collect();
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            cols,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// Mapping cone: `cone(f)^n = source^{n+1} ⊕ target^n` with
    /// `d(x, y) = (-d x, f x + d y)`.
    pub fn cone(&self) -> InjComplex<R> {
        let r = self.ring();
        let (s, t) = (&self.source, &self.target);
        let off = s.len();
        let mut labels = s.labels.clone();
        labels.extend_from_slice(&t.labels);
        let mut degrees: Vec<i32> = s.degrees.iter().map(|d| d - 1).collect();
        degrees.extend_from_slice(&t.degrees);
        let mut d: Vec<SparseVec<R::Elem>> = Vec::with_capacity(off + t.len());
        for g in 0..off {
            let mut v: Vec<(usize, R::Elem)> = s.d[g].iter().map(|(h, c)| (*h, r.neg(c))).collect();
            v.extend(self.cols[g].iter().map(|(h, c)| (h + off, c.clone())));
            d.push(v);
        }
        for h in 0..t.len() {
            d.push(t.d[h].iter().map(|(x, c)| (x + off, c.clone())).collect());
        }
        InjComplex::new_unchecked(r, s.space.clone(), labels, degrees, d)
    }

    /// Whether the map is a quasi-isomorphism at every cell of `cells`
    /// (the cone has vanishing stalks there).
    pub fn is_quasi_iso_on(&self, cells: &[usize]) -> bool {
        let c = self.cone().minimize();
        cells.iter().all(|&rho| c.stalk(rho).is_zero())
    }

    /// `φ_*` of a chain map: both ends relabelled along `cell_map`.
    pub fn relabel(&self, target: Arc<CellComplex>, cell_map: &[usize]) -> ChainMap<R> {
        ChainMap {
            source: self.source.relabel(target.clone(), cell_map),
            target: self.target.relabel(target, cell_map),
            cols: self.cols.clone(),
        }
    }

    /// `j^*` of a chain map for an open subcomplex, as for
    /// [`InjComplex::restrict_open`].
    pub fn restrict_open(&self, sub: Arc<CellComplex>, sub_cells: &[usize]) -> ChainMap<R> {
        let mut inside = vec![false; self.source.space.len()];
        for &c in sub_cells {
            inside[c] = true;
        }
        let keep = |c: &InjComplex<R>| -> Vec<usize> { (0..c.len()).filter(|&g| inside[c.labels[g]]).collect() };
        let (ks, kt) = (keep(&self.source), keep(&self.target));
        ChainMap {
            source: self.source.restrict_open(sub.clone(), sub_cells),
            target: self.target.restrict_open(sub, sub_cells),
            cols: self.restrict_to_labels(&ks, &kt),
        }
    }

    /// Restriction of the map to generators with labels in an open set,
    /// as a map of the sections complexes (source gens, target gens).
    pub fn restrict_to_labels(
        &self,
        keep_src: &[usize],
        keep_tgt: &[usize],
    ) -> Vec<SparseVec<R::Elem>> {
        let mut idx = vec![usize::MAX; self.target.len()];
        for (i, &h) in keep_tgt.iter().enumerate() {
            idx[h] = i;
        }
        keep_src
            .iter()
            .map(|&g| {
                self.cols[g]
                    .iter()
                    .filter(|e| idx[e.0] != usize::MAX)
                    .map(|(h, c)| (idx[*h], c.clone()))
                    .collect()
            })
            .collect()
    }
}

/// Cohomology of the target of a reduction helper, re-exported for callers
/// that build their own free complexes.
pub fn free_cohomology<R: Ring>(fc: &FreeComplex<R>) -> BTreeMap<i32, Vec<u32>> {
    let red = reduce(fc, false, false);
    residual_cohomology(&fc.ring, &red, &fc.degrees)
}
