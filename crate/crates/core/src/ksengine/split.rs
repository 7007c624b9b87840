use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap};

use crate::cellposet::CellComplex;
use crate::error::{Error, Result};
use crate::ksengine::decompose::{LocalCertificate, Summand};
use crate::ksengine::internal;
use crate::linalg::sparse::{axpy, SparseVec};
use crate::linalg::Matrix;
use crate::ring::Ring;
use crate::shcomplex::{ChainMap, InjComplex};

struct Block<R: Ring> {
    src: Vec<usize>,
    tgt: Vec<usize>,
    inv: Matrix<R>,
}

/// Solves `M x = y` for a label-triangular matrix `M` (components go to
/// smaller or equal labels) whose label-diagonal blocks are invertible.
pub struct TriSolver<R: Ring> {
    ring: R,
    cols: Vec<SparseVec<R::Elem>>,
    // target generator -> (order key, block, position in block)
    tgt_pos: Vec<(usize, usize, usize)>,
    blocks: Vec<Block<R>>,
}

impl<R: Ring> TriSolver<R> {
    /// `None` when the diagonal blocks are not square and invertible.
    pub fn new(
        ring: &R,
        space: &CellComplex,
        src: (&[usize], &[i32]),
        tgt: (&[usize], &[i32]),
        cols: Vec<SparseVec<R::Elem>>,
    ) -> Option<Self> {
        let mut groups: BTreeMap<(usize, i32), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for g in 0..src.0.len() {
            groups.entry((src.0[g], src.1[g])).or_default().0.push(g);
        }
        for h in 0..tgt.0.len() {
            groups.entry((tgt.0[h], tgt.1[h])).or_default().1.push(h);
        }
        let mut tgt_pos = vec![(0, 0, 0); tgt.0.len()];
        let mut members = Vec::new();
        for ((label, _), (s, t)) in groups {
            if s.len() != t.len() {
                return None;
            }
            for (i, &h) in t.iter().enumerate() {
                tgt_pos[h] = (space.dim(label), members.len(), i);
            }
            members.push((s, t));
        }
        let mut blocks = Vec::new();
        for (b, (s, t)) in members.into_iter().enumerate() {
            let mut m = Matrix::zeros(ring, t.len(), s.len());
            for (j, &g) in s.iter().enumerate() {
                for (h, x) in &cols[g] {
                    if tgt_pos[*h].1 == b {
                        m.set(tgt_pos[*h].2, j, x.clone());
                    }
                }
            }
            let inv = m.inverse()?;
            blocks.push(Block { src: s, tgt: t, inv });
        }
        Some(TriSolver { ring: ring.clone(), cols, tgt_pos, blocks })
    }

    pub fn solve(&self, y: &SparseVec<R::Elem>) -> Result<SparseVec<R::Elem>> {
        let r = &self.ring;
        let mut res: BTreeMap<(Reverse<usize>, usize, usize), R::Elem> = BTreeMap::new();
        let add = |res: &mut BTreeMap<(Reverse<usize>, usize, usize), R::Elem>, h: usize, c: R::Elem| {
            let (d, b, i) = self.tgt_pos[h];
            let key = (Reverse(d), b, i);
            match res.get_mut(&key) {
                Some(v) => {
                    r.add_assign(v, &c);
                    if r.is_zero(v) {
                        res.remove(&key);
                    }
                }
                None => {
                    if !r.is_zero(&c) {
                        res.insert(key, c);
                    }
                }
            }
        };
        for (h, c) in y {
            add(&mut res, *h, c.clone());
        }
        let mut out: Vec<(usize, R::Elem)> = Vec::new();
        while let Some((&(d, b, _), _)) = res.iter().next() {
            let blk = &self.blocks[b];
            let mut v = vec![r.zero(); blk.tgt.len()];
            let keys: Vec<_> = res.range((d, b, 0)..=(d, b, usize::MAX)).map(|(k, x)| (*k, x.clone())).collect();
            for (k, x) in keys {
                v[k.2] = x;
                res.remove(&k);
            }
            let x = blk.inv.mul_vec(&v)?;
            for (j, xj) in x.iter().enumerate() {
                if r.is_zero(xj) {
                    continue;
                }
                let g = blk.src[j];
                out.push((g, xj.clone()));
                for (h, c) in &self.cols[g] {
                    if self.tgt_pos[*h].1 != b {
                        add(&mut res, *h, r.neg(&r.mul(xj, c)));
                    }
                }
            }
            if res.keys().next().is_some_and(|k| k.0 < d || (k.0 == d && k.1 < b)) {
                return Err(internal("triangular solve revisited a finished block"));
            }
        }
        out.sort_by_key(|e| e.0);
        Ok(out)
    }
}

/// Inverse of a chain map between minimal complexes, if its label-diagonal
/// blocks are invertible.
pub fn invert_chain_map<R: Ring>(f: &ChainMap<R>) -> Result<Option<ChainMap<R>>> {
    let (s, t) = (&f.source, &f.target);
    let Some(solver) = TriSolver::new(
        s.ring(),
        s.space(),
        (s.labels(), s.degrees()),
        (t.labels(), t.degrees()),
        f.cols.clone(),
    ) else {
        return Ok(None);
    };
    let one = s.ring().one();
    let cols = (0..t.len()).map(|h| solver.solve(&vec![(h, one.clone())])).collect::<Result<Vec<_>>>()?;
    Ok(Some(ChainMap::from_columns(t, s, cols)))
}

/// `e ← 3e² − 2e³` until `e² = e`.
pub fn newton_idempotent<R: Ring>(e: &ChainMap<R>, max_iter: usize) -> Result<ChainMap<R>> {
    let r = e.ring();
    let (three, two) = (r.from_i64(3), r.from_i64(-2));
    let mut x = e.clone();
    for _ in 0..max_iter {
        let x2 = x.then(&x)?;
        if x2.cols == x.cols {
            return Ok(x);
        }
        let x3 = x2.then(&x)?;
        x = x2.scale(&three).axpy(&two, &x3)?;
    }
    Err(internal("idempotent lifting did not converge"))
}

/// Row and column indices of an invertible maximal minor, found by
/// elimination with complete pivoting on units; the remainder must vanish.
fn unit_pivots<R: Ring>(m: &Matrix<R>) -> Result<(Vec<usize>, Vec<usize>)> {
    let r = m.ring().clone();
    let mut a = m.clone();
    let (nr, nc) = (a.rows(), a.cols());
    let mut rows: Vec<usize> = (0..nr).collect();
    let mut cols: Vec<usize> = (0..nc).collect();
    let mut k = 0;
    while k < nr.min(nc) {
        let piv = (k..nr).flat_map(|i| (k..nc).map(move |j| (i, j))).find(|&(i, j)| r.is_unit(a.get(i, j)));
        let Some((i, j)) = piv else { break };
        a.swap_rows(k, i);
        rows.swap(k, i);
        a.swap_cols(k, j);
        cols.swap(k, j);
        let inv = r.inv(a.get(k, k)).expect("unit");
        for i2 in k + 1..nr {
            if !r.is_zero(a.get(i2, k)) {
                let f = r.neg(&r.mul(a.get(i2, k), &inv));
                a.add_row_multiple(i2, k, &f);
            }
        }
        k += 1;
    }
    for i in k..nr {
        for j in k..nc {
            if !r.is_zero(a.get(i, j)) {
                return Err(Error::InvalidRep("idempotent block has a non-split remainder".into()));
            }
        }
    }
    Ok((rows[..k].to_vec(), cols[..k].to_vec()))
}

/// The image of a strict idempotent as a complex of injectives with
/// inclusion and projection; certifies `πι = 1` and `ιπ = e`.
pub(crate) fn image_of_idempotent<R: Ring>(c: &InjComplex<R>, e: &ChainMap<R>) -> Result<Summand<R>> {
    let r = c.ring();
    let mut blocks: BTreeMap<(usize, i32), Vec<usize>> = BTreeMap::new();
    for g in 0..c.len() {
        blocks.entry((c.label(g), c.degree(g))).or_default().push(g);
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new(); // (column gen, row gen)
    for gens in blocks.values() {
        let pos: HashMap<usize, usize> = gens.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut m = Matrix::zeros(r, gens.len(), gens.len());
        for (j, &g) in gens.iter().enumerate() {
            for (h, x) in &e.cols[g] {
                if let Some(&i) = pos.get(h) {
                    m.set(i, j, x.clone());
                }
            }
        }
        let (pr, pc) = unit_pivots(&m)?;
        pairs.extend(pc.iter().zip(&pr).map(|(&j, &i)| (gens[j], gens[i])));
    }
    pairs.sort_unstable();
    let mut row_new = vec![usize::MAX; c.len()];
    for (s, &(_, rg)) in pairs.iter().enumerate() {
        row_new[rg] = s;
    }
    let labels: Vec<usize> = pairs.iter().map(|&(g, _)| c.label(g)).collect();
    let degrees: Vec<i32> = pairs.iter().map(|&(g, _)| c.degree(g)).collect();
    let proj = |v: &SparseVec<R::Elem>| -> SparseVec<R::Elem> {
        let mut w: Vec<(usize, R::Elem)> =
            v.iter().filter(|e| row_new[e.0] != usize::MAX).map(|(h, x)| (row_new[*h], x.clone())).collect();
        w.sort_by_key(|e| e.0);
        w
    };
    let m_cols: Vec<SparseVec<R::Elem>> = pairs.iter().map(|&(g, _)| proj(&e.cols[g])).collect();
    let solver = TriSolver::new(r, c.space(), (&labels, &degrees), (&labels, &degrees), m_cols)
        .ok_or_else(|| internal("chosen minor is not invertible"))?;
    let pi_cols = (0..c.len()).map(|g| solver.solve(&proj(&e.cols[g]))).collect::<Result<Vec<_>>>()?;
    let iota_cols: Vec<SparseVec<R::Elem>> = pairs.iter().map(|&(g, _)| e.cols[g].clone()).collect();
    let dc = c.differential();
    let d: Vec<SparseVec<R::Elem>> = iota_cols
        .iter()
        .map(|v| {
            let mut w: SparseVec<R::Elem> = Vec::new();
            for (h, x) in v {
                w = axpy(r, &w, x, &dc[*h]);
            }
            let mut out: SparseVec<R::Elem> = Vec::new();
            for (k, x) in &w {
                out = axpy(r, &out, x, &pi_cols[*k]);
            }
            out
        })
        .collect();
    let sub = InjComplex::new(r, c.space().clone(), labels, degrees, d)?;
    let inclusion = ChainMap::from_columns(&sub, c, iota_cols);
    let projection = ChainMap::from_columns(c, &sub, pi_cols);
    let pi_iota = inclusion.then(&projection)?;
    if pi_iota.cols != ChainMap::identity(&sub).cols {
        return Err(internal("split: projection after inclusion is not the identity"));
    }
    if projection.then(&inclusion)?.cols != e.cols {
        return Err(internal("split: inclusion after projection is not the idempotent"));
    }
    Summand::new(sub, inclusion, projection, LocalCertificate::Unchecked)
}

/// Splits `C ≅ im(e) ⊕ im(1-e)` for an idempotent up to nilpotents `e`
/// (strictified first), both parts minimized.
pub fn split_idempotent<R: Ring>(c: &InjComplex<R>, e: &ChainMap<R>) -> Result<(Summand<R>, Summand<R>)> {
    let e = newton_idempotent(e, 64)?;
    let r = c.ring();
    let f = ChainMap::identity(c).axpy(&r.neg(&r.one()), &e)?;
    let a = image_of_idempotent(c, &e)?.minimized()?;
    let b = image_of_idempotent(c, &f)?.minimized()?;
    Ok((a, b))
}
