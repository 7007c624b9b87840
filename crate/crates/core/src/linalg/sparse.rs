//! Sparse vectors and column-major sparse matrices.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ring::Ring;

/// Sorted list of `(index, nonzero value)` pairs.
pub type SparseVec<E> = Vec<(usize, E)>;

/// `a + c*b` for sorted sparse vectors.
pub fn axpy<R: Ring>(
    ring: &R,
    a: &SparseVec<R::Elem>,
    c: &R::Elem,
    b: &SparseVec<R::Elem>,
) -> SparseVec<R::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            let v = ring.mul(c, &b[j].1);
            if !ring.is_zero(&v) {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let mut v = a[i].1.clone();
            ring.add_mul(&mut v, c, &b[j].1);
            if !ring.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Builds a sorted sparse vector from unsorted, possibly repeated entries.
pub fn collect_sparse<R: Ring>(
    ring: &R,
    entries: impl IntoIterator<Item = (usize, R::Elem)>,
) -> SparseVec<R::Elem> {
    let mut m: BTreeMap<usize, R::Elem> = BTreeMap::new();
    for (i, v) in entries {
        match m.get_mut(&i) {
            Some(x) => ring.add_assign(x, &v),
            None => {
                m.insert(i, v);
            }
        }
    }
    m.into_iter().filter(|(_, v)| !ring.is_zero(v)).collect()
}

/// Column-major sparse matrix.
#[derive(Clone, Debug)]
pub struct SparseMat<R: Ring> {
    pub rows: usize,
    pub cols: Vec<SparseVec<R::Elem>>,
}

impl<R: Ring> PartialEq for SparseMat<R> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }
}

impl<R: Ring> SparseMat<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat {
            rows,
            cols: vec![Vec::new(); cols],
        }
    }

    pub fn identity(ring: &R, n: usize) -> Self {
        SparseMat {
            rows: n,
            cols: (0..n).map(|i| vec![(i, ring.one())]).collect(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn get(&self, ring: &R, i: usize, j: usize) -> R::Elem {
        match self.cols[j].binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.cols[j][k].1.clone(),
            Err(_) => ring.zero(),
        }
    }

    pub fn from_dense(m: &Matrix<R>) -> Self {
        let ring = m.ring();
        SparseMat {
            rows: m.rows(),
            cols: (0..m.cols())
                .map(|j| {
                    (0..m.rows())
                        .filter(|&i| !ring.is_zero(m.get(i, j)))
                        .map(|i| (i, m.get(i, j).clone()))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_dense(&self, ring: &R) -> Matrix<R> {
        let mut m = Matrix::zeros(ring, self.rows, self.cols.len());
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                m.set(*i, j, v.clone());
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut cols = vec![Vec::new(); self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                cols[*i].push((j, v.clone()));
            }
        }
        SparseMat {
            rows: self.cols.len(),
            cols,
        }
    }

    pub fn mul_vec(&self, ring: &R, v: &SparseVec<R::Elem>) -> SparseVec<R::Elem> {
        collect_sparse(
            ring,
            v.iter()
                .flat_map(|(j, x)| self.cols[*j].iter().map(move |(i, a)| (*i, ring.mul(a, x)))),
        )
    }

    /// `self * other`
    pub fn mul(&self, ring: &R, other: &Self) -> Result<Self> {
        if self.cols.len() != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols.len(),
                other.rows,
                other.cols.len()
            )));
        }
        Ok(SparseMat {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.mul_vec(ring, c)).collect(),
        })
    }

    pub fn add(&self, ring: &R, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols.len() != other.cols.len() {
            return Err(Error::ShapeMismatch("sparse add".into()));
        }
        let one = ring.one();
        Ok(SparseMat {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .zip(&other.cols)
                .map(|(a, b)| axpy(ring, a, &one, b))
                .collect(),
        })
    }

    pub fn scale(&self, ring: &R, c: &R::Elem) -> Self {
        SparseMat {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .map(|col| {
                    col.iter()
                        .map(|(i, v)| (*i, ring.mul(v, c)))
                        .filter(|(_, v)| !ring.is_zero(v))
                        .collect()
                })
                .collect(),
        }
    }

    /// Rank over a field by sparse elimination with sparsest-pivot choice.
    pub fn rank(&self, ring: &R) -> Result<usize> {
        if !ring.is_field() {
            return Err(Error::NotAField(ring.spec().to_string()));
        }
        let mut cols: Vec<SparseVec<R::Elem>> = self
            .cols
            .iter()
            .filter(|c| !c.is_empty())
            .cloned()
            .collect();
        cols.sort_by_key(Vec::len);
        // pivot row -> reduced column with that pivot as its first entry
        let mut pivots: BTreeMap<usize, SparseVec<R::Elem>> = BTreeMap::new();
        for mut col in cols {
            loop {
                let Some((lead, val)) = col.first().cloned() else {
                    break;
                };
                match pivots.get(&lead) {
                    Some(p) => {
                        let c = ring.neg(&ring.mul(&val, &ring.inv(&p[0].1).expect("field")));
                        col = axpy(ring, &col, &c, p);
                    }
                    None => {
                        pivots.insert(lead, col);
                        break;
                    }
                }
            }
        }
        Ok(pivots.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ModRing;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sparse_rank_matches_dense() {
        let f3 = ModRing::prime_field(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let m = Matrix::from_fn(&f3, 15, 12, |_, _| {
                if rng.gen_bool(0.2) {
                    rng.gen_range(0..3)
                } else {
                    0
                }
            });
            let s = SparseMat::from_dense(&m);
            assert_eq!(s.rank(&f3).unwrap(), m.rank());
            assert_eq!(s.to_dense(&f3), m);
            assert_eq!(s.transpose().to_dense(&f3), m.transpose());
        }
    }

    #[test]
    fn sparse_product_matches_dense() {
        let f5 = ModRing::prime_field(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = Matrix::from_fn(&f5, 6, 7, |_, _| rng.gen_range(0..5));
        let b = Matrix::from_fn(&f5, 7, 3, |_, _| rng.gen_range(0..5));
        let p = SparseMat::from_dense(&a)
            .mul(&f5, &SparseMat::from_dense(&b))
            .unwrap();
        assert_eq!(p.to_dense(&f5), a.mul(&b).unwrap());
    }
}
