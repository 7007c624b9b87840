use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ksengine::algebra::independent_subset;
use crate::ksengine::{internal, Algebra, KsRing, SplitField};
use crate::linalg::elim::reduce;
use crate::linalg::sparse::{axpy, SparseVec};
use crate::linalg::Matrix;
use crate::ring::Ring;
use crate::shcomplex::{hom_complex_in, ChainMap, HomComplex, InjComplex};

type F<R> = <R as KsRing>::Field;
type FE<R> = <<R as KsRing>::Field as Ring>::Elem;

/// Strict degree-0 chain endomorphisms of a minimal complex and their image
/// `B` in the label-diagonal blocks, reduced to the residue field. The
/// kernel of `Z^0 → B` is nilpotent and contains the null-homotopic maps,
/// so `B/J(B)` is the semisimple quotient of the endomorphism ring.
#[derive(Clone, Debug)]
pub struct StrictEnd<R: KsRing> {
    pub complex: InjComplex<R>,
    diag: Vec<(usize, usize)>,
    by_source: Vec<Vec<usize>>,
    basis: Vec<Vec<FE<R>>>,
    coord_rows: Vec<usize>,
    coord_inv: Matrix<F<R>>,
    lifts: Vec<ChainMap<R>>,
    pub algebra: Algebra<F<R>>,
}

/// Incremental sparse semi-echelon form over a field; rows are keyed by
/// their leading column and normalized to leading coefficient one.
struct Echelon<R: Ring> {
    ring: R,
    pivots: HashMap<usize, SparseVec<R::Elem>>,
}

impl<R: Ring> Echelon<R> {
    fn insert(&mut self, mut row: SparseVec<R::Elem>) {
        let r = &self.ring;
        while let Some((c, x)) = row.first().cloned() {
            match self.pivots.get(&c) {
                Some(p) => row = axpy(r, &row, &r.neg(&x), p),
                None => {
                    let inv = r.inv(&x).expect("field");
                    let row: SparseVec<R::Elem> = row.iter().map(|(k, v)| (*k, r.mul(v, &inv))).collect();
                    self.pivots.insert(c, row);
                    return;
                }
            }
        }
    }

    /// Solves all pivot rows for their leading unknowns, given values of
    /// the free unknowns (absent means zero).
    fn back_substitute(&self, n: usize, free: &[(usize, R::Elem)]) -> Vec<R::Elem> {
        let r = &self.ring;
        let mut x = vec![r.zero(); n];
        for (c, v) in free {
            x[*c] = v.clone();
        }
        let mut cols: Vec<usize> = self.pivots.keys().copied().collect();
        cols.sort_unstable_by(|a, b| b.cmp(a));
        for c in cols {
            let mut acc = r.zero();
            for (k, v) in &self.pivots[&c][1..] {
                r.add_mul(&mut acc, v, &x[*k]);
            }
            x[c] = r.neg(&acc);
        }
        x
    }
}

impl<R: KsRing> StrictEnd<R> {
    pub fn new(c: &InjComplex<R>) -> Result<Self> {
        let r = c.ring();
        let k = r.residue();
        let hom = hom_complex_in(c, c, Some((0, 1)));
        let fc = &hom.complex;
        let unknowns: Vec<usize> = (0..fc.len()).filter(|&i| fc.degrees[i] == 0).collect();
        let is_diag = |i: usize| {
            let (g, h) = hom.pairs[i];
            c.label(g) == c.label(h)
        };
        // off-diagonal unknowns first
        let mut order: Vec<usize> = unknowns.iter().copied().filter(|&i| !is_diag(i)).collect();
        let n_off = order.len();
        order.extend(unknowns.iter().copied().filter(|&i| is_diag(i)));
        let diag: Vec<(usize, usize)> = order[n_off..].iter().map(|&i| hom.pairs[i]).collect();
        let n = order.len();
        let mut col_of = vec![usize::MAX; fc.len()];
        for (j, &i) in order.iter().enumerate() {
            col_of[i] = j;
        }
        let to_map = |x: &[R::Elem]| -> Result<ChainMap<R>> {
            let v: SparseVec<R::Elem> =
                order.iter().zip(x).filter(|(_, v)| !r.is_zero(v)).map(|(&i, v)| (i, v.clone())).collect();
            let mut v = v;
            v.sort_by_key(|e| e.0);
            hom.to_chain_map(0, &v)
        };
        let mut basis: Vec<Vec<FE<R>>> = Vec::new();
        let mut lifts: Vec<ChainMap<R>> = Vec::new();
        if r.is_field() {
            let mut rows: HashMap<usize, Vec<(usize, R::Elem)>> = HashMap::new();
            for &u in &unknowns {
                for (row, x) in &fc.d[u] {
                    rows.entry(*row).or_default().push((col_of[u], x.clone()));
                }
            }
            let mut ech = Echelon { ring: r.clone(), pivots: HashMap::new() };
            let mut keys: Vec<usize> = rows.keys().copied().collect();
            keys.sort_unstable();
            for key in keys {
                let mut row = rows.remove(&key).unwrap();
                row.sort_by_key(|e| e.0);
                ech.insert(row);
            }
            for j in n_off..n {
                if ech.pivots.contains_key(&j) {
                    continue;
                }
                let x = ech.back_substitute(n, &[(j, r.one())]);
                basis.push(x[n_off..].iter().map(|v| r.to_residue(v)).collect());
                lifts.push(to_map(&x)?);
            }
        } else {
            let m = Matrix::from_fn(r, fc.len(), n, |i, j| {
                fc.d[order[j]].iter().find(|e| e.0 == i).map(|e| e.1.clone()).unwrap_or_else(|| r.zero())
            });
            let gens = m.kernel();
            let reduced: Vec<Vec<FE<R>>> =
                gens.iter().map(|g| g[n_off..].iter().map(|v| r.to_residue(v)).collect()).collect();
            for i in independent_subset(&k, n - n_off, &reduced) {
                basis.push(reduced[i].clone());
                lifts.push(to_map(&gens[i])?);
            }
        }
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::InvalidRep("endomorphisms of a zero complex".into()));
        }
        // coordinates: an invertible set of rows of the basis matrix
        let rows_as_vecs: Vec<Vec<FE<R>>> = (0..n - n_off).map(|i| basis.iter().map(|b| b[i].clone()).collect()).collect();
        let coord_rows = independent_subset(&k, dim, &rows_as_vecs);
        let sq = Matrix::from_fn(&k, dim, dim, |i, j| basis[j][coord_rows[i]].clone());
        let coord_inv = sq.inverse().ok_or_else(|| internal("coordinate minor"))?;
        let mut by_source = vec![Vec::new(); c.len()];
        for (i, &(g, _)) in diag.iter().enumerate() {
            by_source[g].push(i);
        }
        let mut s = StrictEnd {
            complex: c.clone(),
            diag,
            by_source,
            basis,
            coord_rows,
            coord_inv,
            lifts,
            algebra: Algebra::new(&k, vec![], vec![])?,
        };
        let mut table = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut row = Vec::with_capacity(dim);
            for j in 0..dim {
                let p = s.compose_diag(&s.basis[i], &s.basis[j]);
                row.push(s.coords(&p)?);
            }
            table.push(row);
        }
        let id: Vec<FE<R>> = s.diag.iter().map(|&(g, h)| if g == h { k.one() } else { k.zero() }).collect();
        let one = s.coords(&id)?;
        s.algebra = Algebra::new(&k, table, one)?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `a ∘ b` on diagonal parts.
    fn compose_diag(&self, a: &[FE<R>], b: &[FE<R>]) -> Vec<FE<R>> {
        let k = self.algebra.ring();
        let mut out = vec![k.zero(); self.diag.len()];
        let index: HashMap<(usize, usize), usize> = self.diag.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        for (i, &(g, h)) in self.diag.iter().enumerate() {
            if k.is_zero(&b[i]) {
                continue;
            }
            for &j in &self.by_source[h] {
                let kk = self.diag[j].1;
                if let Some(&o) = index.get(&(g, kk)) {
                    k.add_mul(&mut out[o], &b[i], &a[j]);
                }
            }
        }
        out
    }

    /// Coordinates in `B` of a diagonal vector, checked to lie in `B`.
    fn coords(&self, v: &[FE<R>]) -> Result<Vec<FE<R>>> {
        let k = self.algebra.ring();
        let picked: Vec<FE<R>> = self.coord_rows.iter().map(|&i| v[i].clone()).collect();
        let c = self.coord_inv.mul_vec(&picked)?;
        for (i, vi) in v.iter().enumerate() {
            let mut acc = k.zero();
            for (b, x) in self.basis.iter().zip(&c) {
                k.add_mul(&mut acc, &b[i], x);
            }
            if acc != *vi {
                return Err(internal("diagonal part outside the endomorphism image"));
            }
        }
        Ok(c)
    }

    /// Diagonal part of a strict endomorphism, reduced to the residue field.
    pub fn diagonal_of(&self, f: &ChainMap<R>) -> Vec<FE<R>> {
        let r = self.complex.ring();
        self.diag
            .iter()
            .map(|&(g, h)| match f.cols[g].binary_search_by_key(&h, |e| e.0) {
                Ok(i) => r.to_residue(&f.cols[g][i].1),
                Err(_) => r.residue().zero(),
            })
            .collect()
    }

    /// Coordinates in `B` of a strict endomorphism.
    pub fn project(&self, f: &ChainMap<R>) -> Result<Vec<FE<R>>> {
        self.coords(&self.diagonal_of(f))
    }

    /// A strict endomorphism with the given coordinates in `B`.
    pub fn lift(&self, x: &[FE<R>]) -> Result<ChainMap<R>> {
        let r = self.complex.ring();
        let mut acc = ChainMap::zero(&self.complex, &self.complex);
        for (l, c) in self.lifts.iter().zip(x) {
            acc = acc.axpy(&r.from_residue(c), l)?;
        }
        Ok(acc)
    }
}

/// `End(C)` modulo homotopy over a field, with representatives.
#[derive(Clone, Debug)]
pub struct EndAlgebra<K: SplitField> {
    pub algebra: Algebra<K>,
    pub basis: Vec<ChainMap<K>>,
}

/// Degree-0 chain endomorphisms modulo homotopy with their multiplication
/// table (fields only).
pub fn end_algebra<K: SplitField>(c: &InjComplex<K>) -> Result<EndAlgebra<K>> {
    let k = c.ring();
    if !k.is_field() {
        return Err(Error::NotAField(k.spec().to_string()));
    }
    let hom = hom_complex_in(c, c, Some((-1, 1)));
    let red = reduce(&hom.complex, false, true);
    let iota = red.iota.as_ref().expect("tracked");
    let pi = red.pi.as_ref().expect("tracked");
    let kept0: Vec<usize> =
        red.kept.iter().enumerate().filter(|(_, &o)| hom.complex.degrees[o] == 0).map(|(i, _)| i).collect();
    let basis: Vec<ChainMap<K>> = kept0.iter().map(|&i| hom.to_chain_map(0, &iota[i])).collect::<Result<_>>()?;
    let coords = |f: &ChainMap<K>| -> Vec<K::Elem> {
        let v = hom.from_chain_map(f);
        kept0
            .iter()
            .map(|&i| {
                let mut acc = k.zero();
                for (o, x) in &pi[i] {
                    if let Ok(j) = v.binary_search_by_key(o, |e| e.0) {
                        k.add_mul(&mut acc, x, &v[j].1);
                    }
                }
                acc
            })
            .collect()
    };
    let mut table = Vec::new();
    for a in &basis {
        let mut row = Vec::new();
        for b in &basis {
            row.push(coords(&b.then(a)?));
        }
        table.push(row);
    }
    let one = coords(&ChainMap::identity(c));
    Ok(EndAlgebra { algebra: Algebra::new(k, table, one)?, basis })
}

/// Chain maps generating `Hom(X, Y)` in degree 0: a cohomology basis over
/// fields, generators of the cycle module otherwise.
pub fn hom0_generators<R: Ring>(x: &InjComplex<R>, y: &InjComplex<R>) -> Result<Vec<ChainMap<R>>> {
    let r = x.ring();
    if r.is_field() {
        return hom_complex_in(x, y, Some((-1, 1))).cohomology_maps(0);
    }
    let hom = hom_complex_in(x, y, Some((0, 1)));
    let (m, cols) = degree_matrix(&hom, 0);
    m.kernel()
        .into_iter()
        .filter(|v| v.iter().any(|e| !r.is_zero(e)))
        .map(|v| {
            let sv: SparseVec<R::Elem> =
                cols.iter().zip(v).filter(|(_, e)| !r.is_zero(e)).map(|(&i, e)| (i, e)).collect();
            hom.to_chain_map(0, &sv)
        })
        .collect()
}

/// Dense matrix of the Hom differential out of degree `n`, with the column
/// generator indices.
fn degree_matrix<R: Ring>(hom: &HomComplex<R>, n: i32) -> (Matrix<R>, Vec<usize>) {
    let fc = &hom.complex;
    let r = &fc.ring;
    let cols: Vec<usize> = (0..fc.len()).filter(|&i| fc.degrees[i] == n).collect();
    let rows: Vec<usize> = (0..fc.len()).filter(|&i| fc.degrees[i] == n + 1).collect();
    let mut row_of = vec![usize::MAX; fc.len()];
    for (i, &g) in rows.iter().enumerate() {
        row_of[g] = i;
    }
    let mut m = Matrix::zeros(r, rows.len(), cols.len());
    for (j, &g) in cols.iter().enumerate() {
        for (h, x) in &fc.d[g] {
            if row_of[*h] != usize::MAX {
                m.set(row_of[*h], j, x.clone());
            }
        }
    }
    (m, cols)
}

/// Whether a degree-0 chain map is null-homotopic.
pub fn is_null_homotopic<R: Ring>(f: &ChainMap<R>) -> Result<bool> {
    let r = f.ring();
    let hom = hom_complex_in(&f.source, &f.target, Some((-1, 0)));
    let v = hom.from_chain_map(f);
    if r.is_field() {
        let red = reduce(&hom.complex, false, true);
        let pi = red.pi.as_ref().expect("tracked");
        for (i, &o) in red.kept.iter().enumerate() {
            if hom.complex.degrees[o] != 0 {
                continue;
            }
            let mut acc = r.zero();
            for (g, x) in &pi[i] {
                if let Ok(j) = v.binary_search_by_key(g, |e| e.0) {
                    r.add_mul(&mut acc, x, &v[j].1);
                }
            }
            if !r.is_zero(&acc) {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let (m, _) = degree_matrix(&hom, -1);
    let fc = &hom.complex;
    let rows: Vec<usize> = (0..fc.len()).filter(|&i| fc.degrees[i] == 0).collect();
    let mut b = vec![r.zero(); rows.len()];
    for (i, &g) in rows.iter().enumerate() {
        if let Ok(j) = v.binary_search_by_key(&g, |e| e.0) {
            b[i] = v[j].1.clone();
        }
    }
    if m.cols() == 0 {
        return Ok(b.iter().all(|x| r.is_zero(x)));
    }
    Ok(m.solve(&b)?.is_some())
}
