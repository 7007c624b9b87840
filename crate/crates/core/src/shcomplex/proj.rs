use std::collections::HashMap;
use std::sync::Arc;

use crate::cellposet::CellComplex;
use crate::error::{Error, Result};
use crate::linalg::elim::{reduce, FreeComplex};
use crate::linalg::sparse::{axpy, collect_sparse, SparseVec};
use crate::ring::Ring;
use crate::shcomplex::{GradedDims, RepComplex};

/// A bounded complex of sums of indecomposable projectives `P_σ`
/// (`P_σ(ρ) = Λ` for `ρ ≥ σ`). Components `g -> h` need
/// `label(h) ≤ label(g)`; evaluation at `ρ` keeps labels `≤ ρ`.
#[derive(Clone, Debug)]
pub struct ProjComplex<R: Ring> {
    pub space: Arc<CellComplex>,
    pub complex: FreeComplex<R>,
}

/// A projective resolution with its augmentation `P -> F`: `augmentation[g]`
/// is the element of `F^{deg g}(label g)` that generator `g` maps to.
#[derive(Clone, Debug)]
pub struct ProjectiveResolution<R: Ring> {
    pub resolution: ProjComplex<R>,
    pub augmentation: Vec<SparseVec<R::Elem>>,
}

impl<R: Ring> ProjComplex<R> {
    pub fn len(&self) -> usize {
        self.complex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complex.is_empty()
    }

    pub fn generators_below(&self, rho: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&g| self.space.le(self.complex.labels[g], rho))
            .collect()
    }

    pub fn evaluation(&self, rho: usize) -> FreeComplex<R> {
        restrict(&self.complex, &self.generators_below(rho))
    }

    pub fn stalk(&self, rho: usize) -> GradedDims {
        GradedDims::from_structure(&self.evaluation(rho).cohomology())
    }

    pub fn is_minimal(&self) -> bool {
        let c = &self.complex;
        (0..c.len()).all(|g| {
            c.d[g]
                .iter()
                .all(|(h, x)| c.labels[*h] != c.labels[g] || !c.ring.is_unit(x))
        })
    }

    /// Length: number of distinct degrees occupied.
    pub fn length(&self) -> usize {
        let mut d: Vec<i32> = self.complex.degrees.clone();
        d.sort_unstable();
        d.dedup();
        d.len()
    }
}

fn restrict<R: Ring>(fc: &FreeComplex<R>, keep: &[usize]) -> FreeComplex<R> {
    let mut idx = vec![usize::MAX; fc.len()];
    for (i, &g) in keep.iter().enumerate() {
        idx[g] = i;
    }
    FreeComplex::new(
        &fc.ring,
        keep.iter().map(|&g| fc.degrees[g]).collect(),
        keep.iter().map(|&g| fc.labels[g]).collect(),
        keep.iter()
            .map(|&g| {
                fc.d[g]
                    .iter()
                    .filter(|e| idx[e.0] != usize::MAX)
                    .map(|(h, c)| (idx[*h], c.clone()))
                    .collect()
            })
            .collect(),
    )
}

/// Minimal projective resolution by the bar construction followed by
/// elimination of contractible pairs. The augmentation is checked to be a
/// quasi-isomorphism at every cell.
pub fn projective_resolution<R: Ring>(f: &RepComplex<R>) -> Result<ProjectiveResolution<R>> {
    let r = f.ring();
    let k = f.space().clone();
    // strict chains, by length
    let mut chains: Vec<Vec<usize>> = (0..k.len()).map(|c| vec![c]).collect();
    let mut frontier = chains.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for ch in &frontier {
            let last = *ch.last().unwrap();
            for &c in k.cofaces(last) {
                if c != last {
                    let mut e = ch.clone();
                    e.push(c);
                    next.push(e);
                }
            }
        }
        chains.extend(next.iter().cloned());
        frontier = next;
    }
    let index: HashMap<&[usize], usize> = chains
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_slice(), i))
        .collect();
    let w = f.width();
    let mut off = vec![vec![0usize; chains.len()]; w];
    let mut degrees = Vec::new();
    let mut labels = Vec::new();
    for i in 0..w {
        let n = f.lo() + i as i32;
        for (ci, ch) in chains.iter().enumerate() {
            off[i][ci] = degrees.len();
            let m = f.dim(n, ch[0]);
            degrees.extend(std::iter::repeat(n - (ch.len() as i32 - 1)).take(m));
            labels.extend(std::iter::repeat(*ch.last().unwrap()).take(m));
        }
    }
    let mut d: Vec<Vec<(usize, R::Elem)>> = vec![Vec::new(); degrees.len()];
    let minus = r.from_i64(-1);
    for i in 0..w {
        let n = f.lo() + i as i32;
        for (ci, ch) in chains.iter().enumerate() {
            let kk = ch.len() - 1;
            let m = f.dim(n, ch[0]);
            if kk >= 1 {
                // ∂_0: drop σ_0, transport the value
                let t = index[&ch[1..]];
                let g = f.gen_between(i, ch[0], ch[1]);
                for (a, col) in g.cols.iter().enumerate() {
                    for (b, x) in col {
                        d[off[i][ci] + a].push((off[i][t] + b, x.clone()));
                    }
                }
                for pos in 1..=kk {
                    let mut e = ch.clone();
                    e.remove(pos);
                    let t = index[e.as_slice()];
                    let s = if pos % 2 == 0 { r.one() } else { minus.clone() };
                    for a in 0..m {
                        d[off[i][ci] + a].push((off[i][t] + a, s.clone()));
                    }
                }
            }
            if i + 1 < w {
                let s = if kk % 2 == 0 { r.one() } else { minus.clone() };
                for (a, col) in f.diff_at(i, ch[0]).cols.iter().enumerate() {
                    for (b, x) in col {
                        d[off[i][ci] + a].push((off[i + 1][ci] + b, r.mul(&s, x)));
                    }
                }
            }
        }
    }
    let d: Vec<SparseVec<R::Elem>> = d.into_iter().map(|v| collect_sparse(r, v)).collect();
    let bar = FreeComplex::new(r, degrees, labels, d);
    // augmentation on length-zero chains
    let mut aug: Vec<SparseVec<R::Elem>> = vec![Vec::new(); bar.len()];
    for i in 0..w {
        for c in 0..k.len() {
            let base = off[i][index[&[c][..]]];
            for a in 0..f.dims_at(i, c) {
                aug[base + a] = vec![(a, r.one())];
            }
        }
    }
    let red = reduce(&bar, true, true);
    let iota = red.iota.as_ref().expect("tracked");
    let complex = FreeComplex::new(
        r,
        red.kept.iter().map(|&g| bar.degrees[g]).collect(),
        red.kept.iter().map(|&g| bar.labels[g]).collect(),
        red.d.clone(),
    );
    // ε∘ι, expressed at the label of each kept generator
    let augmentation: Vec<SparseVec<R::Elem>> = iota
        .iter()
        .enumerate()
        .map(|(i, col)| {
            let lab = complex.labels[i];
            let deg = complex.degrees[i];
            let mut acc: SparseVec<R::Elem> = Vec::new();
            for (o, c) in col {
                if aug[*o].is_empty() {
                    continue;
                }
                let src = bar.labels[*o];
                let g = f.gen_between((deg - f.lo()) as usize, src, lab);
                let v = g.mul_vec(r, &aug[*o]);
                acc = axpy(r, &acc, c, &v);
            }
            acc
        })
        .collect();
    let res = ProjectiveResolution {
        resolution: ProjComplex {
            space: k.clone(),
            complex,
        },
        augmentation,
    };
    for rho in 0..k.len() {
        if !res.cone_at(f, rho).cohomology().is_empty() {
            return Err(Error::InvalidComplex(format!(
                "augmentation is not a quasi-isomorphism at cell {rho}"
            )));
        }
    }
    Ok(res)
}

impl<R: Ring> ProjectiveResolution<R> {
    /// Cone of the augmentation evaluated at `ρ`.
    pub fn cone_at(&self, f: &RepComplex<R>, rho: usize) -> FreeComplex<R> {
        let r = f.ring();
        let p = &self.resolution;
        let keep = p.generators_below(rho);
        let ev = restrict(&p.complex, &keep);
        let st = f.stalk_complex(rho);
        // stalk generator offsets per degree
        let mut first: HashMap<i32, usize> = HashMap::new();
        for (j, &dg) in st.degrees.iter().enumerate() {
            first.entry(dg).or_insert(j);
        }
        let off = ev.len();
        let mut degrees: Vec<i32> = ev.degrees.iter().map(|x| x - 1).collect();
        degrees.extend_from_slice(&st.degrees);
        let minus = r.from_i64(-1);
        let mut d: Vec<SparseVec<R::Elem>> = Vec::with_capacity(degrees.len());
        for (i, &g) in keep.iter().enumerate() {
            let mut v: Vec<(usize, R::Elem)> = ev.d[i]
                .iter()
                .map(|(h, c)| (*h, r.mul(&minus, c)))
                .collect();
            let deg = p.complex.degrees[g];
            let lab = p.complex.labels[g];
            if !self.augmentation[g].is_empty() {
                let gm = f.gen_between((deg - f.lo()) as usize, lab, rho);
                let img = gm.mul_vec(r, &self.augmentation[g]);
                if !img.is_empty() {
                    let base = first[&deg];
                    v.extend(img.into_iter().map(|(j, c)| (off + base + j, c)));
                }
            }
            d.push(collect_sparse(r, v));
        }
        for v in &st.d {
            d.push(v.iter().map(|(h, c)| (off + h, c.clone())).collect());
        }
        FreeComplex::plain(r, degrees, d)
    }
}

/// `Hom^•(P, G)` for a complex of projectives `P` and an explicit complex
/// `G`: `Hom(P_σ, G^m) = G^m(σ)`.
pub fn hom_from_projective<R: Ring>(p: &ProjComplex<R>, g: &RepComplex<R>) -> FreeComplex<R> {
    let r = g.ring();
    let c = &p.complex;
    let mut base: Vec<Vec<usize>> = vec![Vec::new(); c.len()];
    let mut degrees = Vec::new();
    let mut meta = Vec::new();
    for x in 0..c.len() {
        for i in 0..g.width() {
            base[x].push(degrees.len());
            let m = g.lo() + i as i32;
            for j in 0..g.dims_at(i, c.labels[x]) {
                degrees.push(m - c.degrees[x]);
                meta.push((x, i, j));
            }
        }
    }
    let mut p_in: Vec<Vec<(usize, R::Elem)>> = vec![Vec::new(); c.len()];
    for x in 0..c.len() {
        for (y, a) in &c.d[x] {
            p_in[*y].push((x, a.clone()));
        }
    }
    let d = meta
        .iter()
        .enumerate()
        .map(|(e, &(x, i, j))| {
            let sign = if degrees[e] % 2 == 0 {
                r.from_i64(-1)
            } else {
                r.one()
            };
            let lab = c.labels[x];
            let mut v = Vec::new();
            if i + 1 < g.width() {
                for (b, val) in &g.diff_at(i, lab).cols[j] {
                    v.push((base[x][i + 1] + b, val.clone()));
                }
            }
            for (y, a) in &p_in[x] {
                let gm = g.gen_between(i, lab, c.labels[*y]);
                for (b, val) in &gm.cols[j] {
                    v.push((base[*y][i] + b, r.mul(&sign, &r.mul(a, val))));
                }
            }
            collect_sparse(r, v)
        })
        .collect();
    FreeComplex::plain(r, degrees, d)
}
