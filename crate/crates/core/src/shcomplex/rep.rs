use std::sync::Arc;

use rand::Rng;

use crate::cellposet::{CellComplex, CellularMap, OpenSet};
use crate::error::{Error, Result};
use crate::linalg::elim::FreeComplex;
use crate::linalg::sparse::{collect_sparse, SparseMat, SparseVec};
use crate::linalg::Matrix;
use crate::ring::Ring;
use crate::shcomplex::{GradedDims, InjComplex};

/// A bounded complex of representations of the face poset, given
/// explicitly: a module `F^n(σ)` per degree and cell, generization maps
/// `F^n(σ) -> F^n(τ)` along each facet `σ` of `τ`, and cellwise
/// differentials.
#[derive(Clone, Debug)]
pub struct RepComplex<R: Ring> {
    ring: R,
    space: Arc<CellComplex>,
    lo: i32,
    /// `dims[i][σ]` for degree `lo + i`.
    dims: Vec<Vec<usize>>,
    /// `gen[i][τ][k]`: from the `k`-th facet of `τ` to `τ`.
    gen: Vec<Vec<Vec<SparseMat<R>>>>,
    /// `diff[i][σ]`: degree `lo + i` to `lo + i + 1`.
    diff: Vec<Vec<SparseMat<R>>>,
}

impl<R: Ring> RepComplex<R> {
    pub fn new(
        ring: &R,
        space: Arc<CellComplex>,
        lo: i32,
        dims: Vec<Vec<usize>>,
        gen: Vec<Vec<Vec<SparseMat<R>>>>,
        diff: Vec<Vec<SparseMat<R>>>,
    ) -> Result<Self> {
        let c = RepComplex {
            ring: ring.clone(),
            space,
            lo,
            dims,
            gen,
            diff,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn zero(ring: &R, space: Arc<CellComplex>) -> Self {
        RepComplex {
            ring: ring.clone(),
            space,
            lo: 0,
            dims: vec![],
            gen: vec![],
            diff: vec![],
        }
    }

    /// The constant sheaf in degree 0.
    pub fn constant(ring: &R, space: Arc<CellComplex>) -> Self {
        let n = space.len();
        let gen = vec![(0..n)
            .map(|t| {
                space
                    .facets(t)
                    .iter()
                    .map(|_| SparseMat::identity(ring, 1))
                    .collect()
            })
            .collect()];
        RepComplex {
            ring: ring.clone(),
            lo: 0,
            dims: vec![vec![1; n]],
            gen,
            diff: vec![],
            space,
        }
    }

    /// The constant sheaf on a locally closed union of cells, extended by zero.
    pub fn constant_on(ring: &R, space: Arc<CellComplex>, cells: &[usize]) -> Result<Self> {
        Ok(Self::constant(ring, space).extend_by_zero(cells))
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn space(&self) -> &Arc<CellComplex> {
        &self.space
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Number of stored degrees.
    pub fn width(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self, n: i32, sigma: usize) -> usize {
        let i = n - self.lo;
        if i < 0 || i as usize >= self.dims.len() {
            0
        } else {
            self.dims[i as usize][sigma]
        }
    }

    /// `dim F^{lo+i}(σ)`.
    pub fn dims_at(&self, i: usize, sigma: usize) -> usize {
        self.dims[i][sigma]
    }

    /// Generization along the `k`-th facet of `τ` in degree `lo + i`.
    pub fn gen_facet(&self, i: usize, tau: usize, k: usize) -> &SparseMat<R> {
        &self.gen[i][tau][k]
    }

    pub fn diff_at(&self, i: usize, sigma: usize) -> &SparseMat<R> {
        &self.diff[i][sigma]
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.ring;
        let k = &self.space;
        let w = self.dims.len();
        if self.gen.len() != w || self.diff.len() + 1 != w.max(1) {
            return Err(Error::InvalidRep("inconsistent number of degrees".into()));
        }
        for i in 0..w {
            let dm = &self.dims[i];
            if dm.len() != k.len() || self.gen[i].len() != k.len() {
                return Err(Error::InvalidRep(
                    "dimension vector has the wrong length".into(),
                ));
            }
            for t in 0..k.len() {
                if self.gen[i][t].len() != k.facets(t).len() {
                    return Err(Error::InvalidRep(format!(
                        "cell {t} needs one map per facet"
                    )));
                }
                for (j, &(s, _)) in k.facets(t).iter().enumerate() {
                    let g = &self.gen[i][t][j];
                    if g.rows != dm[t] || g.ncols() != dm[s] {
                        return Err(Error::InvalidRep(format!(
                            "map {s} -> {t} has the wrong shape"
                        )));
                    }
                }
                // commutativity on each interval of length two
                for &(s, _) in k.facets(t) {
                    for &(u, _) in k.facets(s) {
                        let paths: Vec<SparseMat<R>> = k
                            .facets(t)
                            .iter()
                            .enumerate()
                            .filter(|(_, (m, _))| k.facets(*m).iter().any(|e| e.0 == u))
                            .map(|(j, (m, _))| {
                                let jm = k.facets(*m).iter().position(|e| e.0 == u).unwrap();
                                self.gen[i][t][j]
                                    .mul(r, &self.gen[i][*m][jm])
                                    .expect("shapes")
                            })
                            .collect();
                        if paths.windows(2).any(|p| p[0] != p[1]) {
                            return Err(Error::InvalidRep(format!(
                                "generization maps do not commute between {u} and {t}"
                            )));
                        }
                    }
                }
            }
        }
        for i in 0..self.diff.len() {
            for s in 0..k.len() {
                let d = &self.diff[i][s];
                if d.rows != self.dims[i + 1][s] || d.ncols() != self.dims[i][s] {
                    return Err(Error::InvalidRep(format!(
                        "differential at {s} has the wrong shape"
                    )));
                }
                if i + 1 < self.diff.len()
                    && !self.diff[i + 1][s].mul(r, d).expect("shapes").is_zero()
                {
                    return Err(Error::InvalidRep(format!("d∘d ≠ 0 at cell {s}")));
                }
            }
            for t in 0..k.len() {
                for (j, &(s, _)) in k.facets(t).iter().enumerate() {
                    let a = self.diff[i][t].mul(r, &self.gen[i][t][j]).expect("shapes");
                    let b = self.gen[i + 1][t][j]
                        .mul(r, &self.diff[i][s])
                        .expect("shapes");
                    if a != b {
                        return Err(Error::InvalidRep(format!(
                            "differential does not commute with {s} -> {t}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Generization `F(σ) -> F(τ)` for `σ ≤ τ` in degree `lo + i`.
    pub fn gen_between(&self, i: usize, sigma: usize, tau: usize) -> SparseMat<R> {
        let k = &self.space;
        if sigma == tau {
            return SparseMat::identity(&self.ring, self.dims[i][sigma]);
        }
        let (j, &(m, _)) = k
            .facets(tau)
            .iter()
            .enumerate()
            .find(|(_, (m, _))| k.le(sigma, *m))
            .expect("σ ≤ τ");
        self.gen[i][tau][j]
            .mul(&self.ring, &self.gen_between(i, sigma, m))
            .expect("shapes")
    }

    /// The stalk complex at `σ` as a complex of free modules.
    pub fn stalk_complex(&self, sigma: usize) -> FreeComplex<R> {
        let mut degrees = Vec::new();
        let mut off = Vec::new();
        for i in 0..self.dims.len() {
            off.push(degrees.len());
            degrees.extend(std::iter::repeat(self.lo + i as i32).take(self.dims[i][sigma]));
        }
        let mut d = vec![Vec::new(); degrees.len()];
        for i in 0..self.diff.len() {
            for (a, col) in self.diff[i][sigma].cols.iter().enumerate() {
                d[off[i] + a] = col
                    .iter()
                    .map(|(b, c)| (off[i + 1] + b, c.clone()))
                    .collect();
            }
        }
        FreeComplex::plain(&self.ring, degrees, d)
    }

    pub fn stalk(&self, sigma: usize) -> GradedDims {
        GradedDims::from_structure(&self.stalk_complex(sigma).cohomology())
    }

    /// Verdier dual `Hom(F, ω)`, as a complex of injectives. The generator
    /// `(ρ, n, i)` is dual to the `i`-th basis vector of `F^n(ρ)` and sits in
    /// degree `-n - dim ρ` with label `ρ`.
    pub fn dual(&self) -> InjComplex<R> {
        let r = &self.ring;
        let k = &self.space;
        let w = self.dims.len();
        let mut base = vec![vec![0usize; k.len()]; w];
        let mut labels = Vec::new();
        let mut degrees = Vec::new();
        for i in 0..w {
            for rho in 0..k.len() {
                base[i][rho] = labels.len();
                let deg = -(self.lo + i as i32) - k.dim(rho) as i32;
                for _ in 0..self.dims[i][rho] {
                    labels.push(rho);
                    degrees.push(deg);
                }
            }
        }
        let mut d: Vec<Vec<(usize, R::Elem)>> = vec![Vec::new(); labels.len()];
        for i in 0..w {
            for rho in 0..k.len() {
                // generization part: transpose of F(τ) -> F(ρ) along facets τ of ρ
                for (j, &(tau, sgn)) in k.facets(rho).iter().enumerate() {
                    let inc = r.from_i64(sgn as i64);
                    for (a, col) in self.gen[i][rho][j].cols.iter().enumerate() {
                        for (b, c) in col {
                            d[base[i][rho] + b].push((base[i][tau] + a, r.mul(&inc, c)));
                        }
                    }
                }
                // differential part: transpose of d^{n-1}, with sign -(-1)^{n + dim ρ}
                if i > 0 {
                    let n = self.lo + i as i32;
                    let s = if (n + k.dim(rho) as i32).rem_euclid(2) == 0 {
                        r.from_i64(-1)
                    } else {
                        r.one()
                    };
                    for (a, col) in self.diff[i - 1][rho].cols.iter().enumerate() {
                        for (b, c) in col {
                            d[base[i][rho] + b].push((base[i - 1][rho] + a, r.mul(&s, c)));
                        }
                    }
                }
            }
        }
        let d = d.into_iter().map(|v| collect_sparse(r, v)).collect();
        InjComplex::new_unchecked(r, k.clone(), labels, degrees, d)
    }

    /// A minimal complex of injectives quasi-isomorphic to this complex.
    pub fn injective_model(&self) -> InjComplex<R> {
        let dd = self.dual().minimize();
        dd.to_rep().dual().minimize()
    }

    /// Derived sections over an open set by the chain (Roos) resolution:
    /// `C^k = ⊕ F(σ_k)` over chains `σ_0 < … < σ_k` in `U`.
    pub fn sections_by_chains(&self, u: &OpenSet) -> FreeComplex<R> {
        let r = &self.ring;
        let k = &self.space;
        let cells = u.cells();
        let m = u.mask(k.len());
        let mut chains: Vec<Vec<usize>> = cells.iter().map(|&c| vec![c]).collect();
        let mut all = chains.clone();
        while !chains.is_empty() {
            let mut next = Vec::new();
            for ch in &chains {
                let last = *ch.last().unwrap();
                for &c in k.cofaces(last) {
                    if c != last && m[c] {
                        let mut e = ch.clone();
                        e.push(c);
                        next.push(e);
                    }
                }
            }
            all.extend(next.iter().cloned());
            chains = next;
        }
        let index: std::collections::HashMap<Vec<usize>, usize> = all
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        // generators (chain, i, basis vector)
        let w = self.dims.len();
        let mut off = vec![vec![0usize; all.len()]; w];
        let mut degrees = Vec::new();
        for i in 0..w {
            for (ci, ch) in all.iter().enumerate() {
                off[i][ci] = degrees.len();
                let top = *ch.last().unwrap();
                let deg = self.lo + i as i32 + ch.len() as i32 - 1;
                degrees.extend(std::iter::repeat(deg).take(self.dims[i][top]));
            }
        }
        let mut d: Vec<Vec<(usize, R::Elem)>> = vec![Vec::new(); degrees.len()];
        for i in 0..w {
            for (ci, ch) in all.iter().enumerate() {
                let top = *ch.last().unwrap();
                let len = ch.len();
                // δ: insert a cell at each position
                for pos in 0..=len {
                    let lo_c = if pos == 0 { None } else { Some(ch[pos - 1]) };
                    let hi_c = ch.get(pos).copied();
                    let sign = if pos % 2 == 0 {
                        r.one()
                    } else {
                        r.from_i64(-1)
                    };
                    let cand: Vec<usize> = match (lo_c, hi_c) {
                        (None, Some(h)) => k
                            .faces(h)
                            .iter()
                            .copied()
                            .filter(|&c| c != h && m[c])
                            .collect(),
                        (Some(l), Some(h)) => k
                            .cofaces(l)
                            .iter()
                            .copied()
                            .filter(|&c| c != l && c != h && k.le(c, h))
                            .collect(),
                        (Some(l), None) => {
                            k.cofaces(l).iter().copied().filter(|&c| c != l).collect()
                        }
                        (None, None) => vec![],
                    };
                    for c in cand {
                        let mut e = ch.clone();
                        e.insert(pos, c);
                        let ti = index[&e];
                        if pos == len {
                            let g = self.gen_between(i, top, c);
                            for (a, col) in g.cols.iter().enumerate() {
                                for (b, x) in col {
                                    d[off[i][ci] + a].push((off[i][ti] + b, r.mul(&sign, x)));
                                }
                            }
                        } else {
                            for a in 0..self.dims[i][top] {
                                d[off[i][ci] + a].push((off[i][ti] + a, sign.clone()));
                            }
                        }
                    }
                }
                // (-1)^k d_F
                if i + 1 < w {
                    let s = if len % 2 == 1 {
                        r.one()
                    } else {
                        r.from_i64(-1)
                    };
                    for (a, col) in self.diff[i][top].cols.iter().enumerate() {
                        for (b, x) in col {
                            d[off[i][ci] + a].push((off[i + 1][ci] + b, r.mul(&s, x)));
                        }
                    }
                }
            }
        }
        let d = d.into_iter().map(|v| collect_sparse(r, v)).collect();
        FreeComplex::plain(r, degrees, d)
    }

    /// Compactly supported sections over an open set by the cellular
    /// formula `⊕_{σ ∈ U} F(σ) ⊗ or(σ)` in degree `dim σ`.
    pub fn compact_sections(&self, u: &OpenSet) -> FreeComplex<R> {
        let r = &self.ring;
        let k = &self.space;
        let m = u.mask(k.len());
        let w = self.dims.len();
        let mut off = vec![vec![usize::MAX; k.len()]; w];
        let mut degrees = Vec::new();
        for i in 0..w {
            for &s in u.cells() {
                off[i][s] = degrees.len();
                degrees.extend(
                    std::iter::repeat(self.lo + i as i32 + k.dim(s) as i32).take(self.dims[i][s]),
                );
            }
        }
        let mut d: Vec<Vec<(usize, R::Elem)>> = vec![Vec::new(); degrees.len()];
        for i in 0..w {
            for &t in u.cells() {
                for (j, &(s, sgn)) in k.facets(t).iter().enumerate() {
                    if !m[s] {
                        continue;
                    }
                    let inc = r.from_i64(sgn as i64);
                    for (a, col) in self.gen[i][t][j].cols.iter().enumerate() {
                        for (b, x) in col {
                            d[off[i][s] + a].push((off[i][t] + b, r.mul(&inc, x)));
                        }
                    }
                }
                if i + 1 < w {
                    let sg = if k.dim(t) % 2 == 0 {
                        r.one()
                    } else {
                        r.from_i64(-1)
                    };
                    for (a, col) in self.diff[i][t].cols.iter().enumerate() {
                        for (b, x) in col {
                            d[off[i][t] + a].push((off[i + 1][t] + b, r.mul(&sg, x)));
                        }
                    }
                }
            }
        }
        let d = d.into_iter().map(|v| collect_sparse(r, v)).collect();
        FreeComplex::plain(r, degrees, d)
    }

    /// Zero outside the given cells; valid when they form a locally closed set.
    pub fn extend_by_zero(&self, cells: &[usize]) -> Self {
        let k = &self.space;
        let mut keep = vec![false; k.len()];
        for &c in cells {
            keep[c] = true;
        }
        let dims: Vec<Vec<usize>> = self
            .dims
            .iter()
            .map(|dm| {
                dm.iter()
                    .enumerate()
                    .map(|(s, &x)| if keep[s] { x } else { 0 })
                    .collect()
            })
            .collect();
        let gen = (0..self.dims.len())
            .map(|i| {
                (0..k.len())
                    .map(|t| {
                        k.facets(t)
                            .iter()
                            .enumerate()
                            .map(|(j, &(s, _))| {
                                if keep[s] && keep[t] {
                                    self.gen[i][t][j].clone()
                                } else {
                                    SparseMat::zeros(dims[i][t], dims[i][s])
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let diff = (0..self.diff.len())
            .map(|i| {
                (0..k.len())
                    .map(|s| {
                        if keep[s] {
                            self.diff[i][s].clone()
                        } else {
                            SparseMat::zeros(0, 0)
                        }
                    })
                    .collect()
            })
            .collect();
        RepComplex {
            ring: self.ring.clone(),
            space: k.clone(),
            lo: self.lo,
            dims,
            gen,
            diff,
        }
    }

    /// Pullback along a cellular map: `(f^*F)(σ) = F(f(σ))`.
    pub fn pullback(&self, f: &CellularMap) -> Result<Self> {
        if !Arc::ptr_eq(f.target(), &self.space) && f.target().len() != self.space.len() {
            return Err(Error::InvalidMap(
                "pullback along a map to a different space".into(),
            ));
        }
        let src = f.source();
        let w = self.dims.len();
        let dims: Vec<Vec<usize>> = (0..w)
            .map(|i| (0..src.len()).map(|s| self.dims[i][f.apply(s)]).collect())
            .collect();
        let gen = (0..w)
            .map(|i| {
                (0..src.len())
                    .map(|t| {
                        src.facets(t)
                            .iter()
                            .map(|&(s, _)| self.gen_between(i, f.apply(s), f.apply(t)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let diff = (0..self.diff.len())
            .map(|i| {
                (0..src.len())
                    .map(|s| self.diff[i][f.apply(s)].clone())
                    .collect()
            })
            .collect();
        Ok(RepComplex {
            ring: self.ring.clone(),
            space: src.clone(),
            lo: self.lo,
            dims,
            gen,
            diff,
        })
    }

    /// Restriction to a subcomplex given by the cells it keeps
    /// (as produced by `restrict_open`/`restrict_closed`).
    pub fn restrict(&self, sub: Arc<CellComplex>, sub_cells: &[usize]) -> Self {
        let w = self.dims.len();
        let dims: Vec<Vec<usize>> = (0..w)
            .map(|i| sub_cells.iter().map(|&c| self.dims[i][c]).collect())
            .collect();
        let gen = (0..w)
            .map(|i| {
                (0..sub.len())
                    .map(|t| {
                        sub.facets(t)
                            .iter()
                            .map(|&(s, _)| self.gen_between(i, sub_cells[s], sub_cells[t]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let diff = (0..self.diff.len())
            .map(|i| sub_cells.iter().map(|&c| self.diff[i][c].clone()).collect())
            .collect();
        RepComplex {
            ring: self.ring.clone(),
            space: sub,
            lo: self.lo,
            dims,
            gen,
            diff,
        }
    }

    /// Pushforward along the inclusion of a closed subcomplex
    /// (`sub_cells[i]` is the image of cell `i`).
    pub fn closed_pushforward(&self, target: Arc<CellComplex>, sub_cells: &[usize]) -> Self {
        let mut idx = vec![usize::MAX; target.len()];
        for (i, &c) in sub_cells.iter().enumerate() {
            idx[c] = i;
        }
        let w = self.dims.len();
        let dims: Vec<Vec<usize>> = (0..w)
            .map(|i| {
                (0..target.len())
                    .map(|c| {
                        if idx[c] == usize::MAX {
                            0
                        } else {
                            self.dims[i][idx[c]]
                        }
                    })
                    .collect()
            })
            .collect();
        let gen = (0..w)
            .map(|i| {
                (0..target.len())
                    .map(|t| {
                        target
                            .facets(t)
                            .iter()
                            .map(|&(s, _)| {
                                if idx[t] != usize::MAX && idx[s] != usize::MAX {
                                    self.gen_between(i, idx[s], idx[t])
                                } else {
                                    SparseMat::zeros(dims[i][t], dims[i][s])
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let diff = (0..self.diff.len())
            .map(|i| {
                (0..target.len())
                    .map(|c| {
                        if idx[c] == usize::MAX {
                            SparseMat::zeros(0, 0)
                        } else {
                            self.diff[i][idx[c]].clone()
                        }
                    })
                    .collect()
            })
            .collect();
        RepComplex {
            ring: self.ring.clone(),
            space: target,
            lo: self.lo,
            dims,
            gen,
            diff,
        }
    }

    /// `F[n]`.
    pub fn shift(&self, n: i32) -> Self {
        let mut c = self.clone();
        c.lo -= n;
        if n % 2 != 0 {
            for row in c.diff.iter_mut() {
                for m in row.iter_mut() {
                    *m = m.scale(&self.ring, &self.ring.from_i64(-1));
                }
            }
        }
        c
    }

    /// Truncation `τ_{≤ n}` (fields only): cellwise kernels in degree `n`.
    pub fn truncate_le(&self, n: i32) -> Result<Self> {
        let r = &self.ring;
        if !r.is_field() {
            return Err(Error::NotAField(r.spec().to_string()));
        }
        let i = n - self.lo;
        if i < 0 {
            return Ok(Self::zero(r, self.space.clone()));
        }
        let i = i as usize;
        if i + 1 >= self.dims.len() {
            return Ok(self.clone());
        }
        let k = &self.space;
        // kernel bases as columns
        let bases: Vec<Matrix<R>> = (0..k.len())
            .map(|s| {
                let dm = self.diff[i][s].to_dense(r);
                let dm = if dm.rows() == 0 {
                    Matrix::zeros(r, 0, self.dims[i][s])
                } else {
                    dm
                };
                let ker = dm.kernel();
                Matrix::from_columns(r, self.dims[i][s], &ker)
            })
            .collect();
        let mut dims: Vec<Vec<usize>> = self.dims[..=i].to_vec();
        dims[i] = bases.iter().map(Matrix::cols).collect();
        let mut gen: Vec<Vec<Vec<SparseMat<R>>>> = self.gen[..=i].to_vec();
        gen[i] = (0..k.len())
            .map(|t| {
                k.facets(t)
                    .iter()
                    .enumerate()
                    .map(|(j, &(s, _))| {
                        let img = self.gen[i][t][j]
                            .to_dense(r)
                            .mul(&bases[s])
                            .expect("shapes");
                        let cols: Vec<Vec<R::Elem>> = (0..img.cols())
                            .map(|c| {
                                bases[t]
                                    .solve(&img.column(c))
                                    .expect("field")
                                    .expect("kernel maps to kernel")
                            })
                            .collect();
                        SparseMat::from_dense(&Matrix::from_columns(r, bases[t].cols(), &cols))
                    })
                    .collect()
            })
            .collect();
        let mut diff: Vec<Vec<SparseMat<R>>> = self.diff[..i].to_vec();
        if i > 0 {
            diff[i - 1] = (0..k.len())
                .map(|s| {
                    let img = self.diff[i - 1][s].to_dense(r);
                    let cols: Vec<Vec<R::Elem>> = (0..img.cols())
                        .map(|c| {
                            bases[s]
                                .solve(&img.column(c))
                                .expect("field")
                                .expect("boundaries are cycles")
                        })
                        .collect();
                    SparseMat::from_dense(&Matrix::from_columns(r, bases[s].cols(), &cols))
                })
                .collect();
        }
        Ok(RepComplex {
            ring: r.clone(),
            space: k.clone(),
            lo: self.lo,
            dims,
            gen,
            diff,
        })
    }

    /// Direct sum of complexes over one space.
    pub fn direct_sum(a: &Self, b: &Self) -> Result<Self> {
        if a.space.len() != b.space.len() {
            return Err(Error::ShapeMismatch(
                "direct sum over different spaces".into(),
            ));
        }
        if a.dims.is_empty() {
            return Ok(b.clone());
        }
        if b.dims.is_empty() {
            return Ok(a.clone());
        }
        let r = &a.ring;
        let k = &a.space;
        let lo = a.lo.min(b.lo);
        let hi = (a.lo + a.dims.len() as i32).max(b.lo + b.dims.len() as i32);
        let w = (hi - lo) as usize;
        let pa = a.padded(lo, w);
        let pb = b.padded(lo, w);
        let dsum = |x: &SparseMat<R>, y: &SparseMat<R>| -> SparseMat<R> {
            let mut cols = x.cols.clone();
            cols.extend(
                y.cols
                    .iter()
                    .map(|c| c.iter().map(|(i, v)| (i + x.rows, v.clone())).collect()),
            );
            SparseMat {
                rows: x.rows + y.rows,
                cols,
            }
        };
        let dims = (0..w)
            .map(|i| {
                (0..k.len())
                    .map(|s| pa.dims[i][s] + pb.dims[i][s])
                    .collect()
            })
            .collect();
        let gen = (0..w)
            .map(|i| {
                (0..k.len())
                    .map(|t| {
                        (0..k.facets(t).len())
                            .map(|j| dsum(&pa.gen[i][t][j], &pb.gen[i][t][j]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let diff = (0..w - 1)
            .map(|i| {
                (0..k.len())
                    .map(|s| dsum(&pa.diff[i][s], &pb.diff[i][s]))
                    .collect()
            })
            .collect();
        Ok(RepComplex {
            ring: r.clone(),
            space: k.clone(),
            lo,
            dims,
            gen,
            diff,
        })
    }

    fn padded(&self, lo: i32, w: usize) -> Self {
        let k = &self.space;
        let shift = (self.lo - lo) as usize;
        let mut dims = vec![vec![0usize; k.len()]; w];
        let mut gen: Vec<Vec<Vec<SparseMat<R>>>> = (0..w)
            .map(|_| {
                (0..k.len())
                    .map(|t| k.facets(t).iter().map(|_| SparseMat::zeros(0, 0)).collect())
                    .collect()
            })
            .collect();
        let mut diff: Vec<Vec<SparseMat<R>>> =
            vec![vec![SparseMat::zeros(0, 0); k.len()]; w.saturating_sub(1)];
        for i in 0..self.dims.len() {
            dims[i + shift] = self.dims[i].clone();
            gen[i + shift] = self.gen[i].clone();
        }
        for i in 0..self.diff.len() {
            diff[i + shift] = self.diff[i].clone();
        }
        for i in 0..w.saturating_sub(1) {
            for s in 0..k.len() {
                if diff[i][s].rows != dims[i + 1][s] || diff[i][s].ncols() != dims[i][s] {
                    diff[i][s] = SparseMat::zeros(dims[i + 1][s], dims[i][s]);
                }
            }
        }
        RepComplex {
            ring: self.ring.clone(),
            space: k.clone(),
            lo,
            dims,
            gen,
            diff,
        }
    }

    /// A random complex built as a sum of shifted constant sheaves on
    /// random open and closed pieces, joined by random maps where these are
    /// forced to be chain maps. Used for property tests.
    pub fn random<G: Rng + ?Sized>(
        ring: &R,
        space: Arc<CellComplex>,
        pieces: usize,
        rng: &mut G,
    ) -> Result<Self> {
        let mut acc = Self::zero(ring, space.clone());
        for _ in 0..pieces {
            let c = rng.gen_range(0..space.len());
            let open = rng.gen_bool(0.5);
            let cells: Vec<usize> = if open {
                space.cofaces(c).to_vec()
            } else {
                space.faces(c).to_vec()
            };
            let piece =
                Self::constant_on(ring, space.clone(), &cells)?.shift(rng.gen_range(-2..=2));
            acc = Self::direct_sum(&acc, &piece)?;
        }
        Ok(acc)
    }
}

impl<R: Ring> InjComplex<R> {
    /// The explicit representation: `F^n(ρ)` is spanned by generators of
    /// degree `n` with label `≥ ρ`, generization is projection.
    pub fn to_rep(&self) -> RepComplex<R> {
        let r = self.ring();
        let k = self.space().clone();
        if self.is_empty() {
            return RepComplex::zero(r, k);
        }
        let lo = *self.degrees().iter().min().unwrap();
        let hi = *self.degrees().iter().max().unwrap();
        let w = (hi - lo + 1) as usize;
        // basis of F^n(ρ): star generators of degree n, in increasing order
        let stars: Vec<Vec<usize>> = (0..k.len()).map(|rho| self.star_generators(rho)).collect();
        let mut basis: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); k.len()]; w];
        for rho in 0..k.len() {
            for &g in &stars[rho] {
                basis[(self.degree(g) - lo) as usize][rho].push(g);
            }
        }
        let dims: Vec<Vec<usize>> = basis
            .iter()
            .map(|b| b.iter().map(Vec::len).collect())
            .collect();
        let pos_in = |v: &Vec<usize>, g: usize| v.binary_search(&g).ok();
        let gen = (0..w)
            .map(|i| {
                (0..k.len())
                    .map(|t| {
                        k.facets(t)
                            .iter()
                            .map(|&(s, _)| {
                                let cols = basis[i][s]
                                    .iter()
                                    .map(|&g| {
                                        pos_in(&basis[i][t], g)
                                            .map(|p| vec![(p, r.one())])
                                            .unwrap_or_default()
                                    })
                                    .collect();
                                SparseMat {
                                    rows: dims[i][t],
                                    cols,
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let diff = (0..w - 1)
            .map(|i| {
                (0..k.len())
                    .map(|s| {
                        let cols = basis[i][s]
                            .iter()
                            .map(|&g| {
                                let v: SparseVec<R::Elem> = self.differential()[g]
                                    .iter()
                                    .filter_map(|(h, c)| {
                                        pos_in(&basis[i + 1][s], *h).map(|p| (p, c.clone()))
                                    })
                                    .collect();
                                collect_sparse(r, v)
                            })
                            .collect();
                        SparseMat {
                            rows: dims[i + 1][s],
                            cols,
                        }
                    })
                    .collect()
            })
            .collect();
        RepComplex {
            ring: r.clone(),
            space: k,
            lo,
            dims,
            gen,
            diff,
        }
    }

    /// Verdier dual.
    pub fn dual(&self) -> InjComplex<R> {
        self.to_rep().dual().minimize()
    }
}
