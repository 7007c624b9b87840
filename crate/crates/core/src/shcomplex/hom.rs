use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::elim::{reduce, FreeComplex};
use crate::linalg::sparse::{collect_sparse, SparseVec};
use crate::ring::Ring;
use crate::shcomplex::{ChainMap, GradedDims, InjComplex};

/// `Hom^•(A, B)` for complexes of injectives. The generator `e_{g,h}` sends
/// source generator `g` to target generator `h` (requires
/// `label(h) ≤ label(g)`) and has degree `deg h - deg g`.
#[derive(Clone, Debug)]
pub struct HomComplex<R: Ring> {
    pub source: InjComplex<R>,
    pub target: InjComplex<R>,
    pub pairs: Vec<(usize, usize)>,
    pub complex: FreeComplex<R>,
}

/// Builds the Hom complex with `D f = d_B f - (-1)^{|f|} f d_A`.
/// Only degrees in `range` are kept (`None` keeps everything); cohomology
/// is then correct strictly inside the range.
pub fn hom_complex_in<R: Ring>(
    a: &InjComplex<R>,
    b: &InjComplex<R>,
    range: Option<(i32, i32)>,
) -> HomComplex<R> {
    let r = a.ring();
    let k = a.space();
    let in_range = |n: i32| range.is_none_or(|(lo, hi)| lo <= n && n <= hi);
    let tb = b.by_label();
    let mut pairs = Vec::new();
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for g in 0..a.len() {
        for &l in k.faces(a.label(g)) {
            for &h in &tb[l] {
                let n = b.degree(h) - a.degree(g);
                if in_range(n) {
                    index.insert((g, h), pairs.len());
                    pairs.push((g, h));
                }
            }
        }
    }
    // incoming edges of A: x -> g
    let mut a_in: Vec<Vec<(usize, R::Elem)>> = vec![Vec::new(); a.len()];
    for x in 0..a.len() {
        for (g, c) in &a.differential()[x] {
            a_in[*g].push((x, c.clone()));
        }
    }
    let degrees: Vec<i32> = pairs
        .iter()
        .map(|&(g, h)| b.degree(h) - a.degree(g))
        .collect();
    let d = pairs
        .iter()
        .enumerate()
        .map(|(i, &(g, h))| {
            let n = degrees[i];
            let sign = if n % 2 == 0 { r.from_i64(-1) } else { r.one() };
            let mut v: Vec<(usize, R::Elem)> = Vec::new();
            for (h2, c) in &b.differential()[h] {
                if let Some(&j) = index.get(&(g, *h2)) {
                    v.push((j, c.clone()));
                }
            }
            for (x, c) in &a_in[g] {
                if let Some(&j) = index.get(&(*x, h)) {
                    v.push((j, r.mul(&sign, c)));
                }
            }
            collect_sparse(r, v)
        })
        .collect();
    HomComplex {
        source: a.clone(),
        target: b.clone(),
        pairs,
        complex: FreeComplex::plain(r, degrees, d),
    }
}

pub fn hom_complex<R: Ring>(a: &InjComplex<R>, b: &InjComplex<R>) -> HomComplex<R> {
    hom_complex_in(a, b, None)
}

impl<R: Ring> HomComplex<R> {
    /// Graded `Hom(A, B[n])` in the derived category.
    pub fn cohomology(&self) -> GradedDims {
        GradedDims::from_structure(&self.complex.cohomology())
    }

    /// The degree-`n` element given by a vector on generators, as a map
    /// `A -> B[n]`.
    pub fn to_chain_map(&self, n: i32, v: &SparseVec<R::Elem>) -> Result<ChainMap<R>> {
        let target = self.target.shift(n);
        let mut cols: Vec<SparseVec<R::Elem>> = vec![Vec::new(); self.source.len()];
        for (i, c) in v {
            if self.complex.degrees[*i] != n {
                return Err(Error::InvalidMap(format!(
                    "generator {i} is not in degree {n}"
                )));
            }
            let (g, h) = self.pairs[*i];
            cols[g].push((h, c.clone()));
        }
        Ok(ChainMap::from_columns(&self.source, &target, cols))
    }

    /// The vector of a chain map `A -> B[n]` on generators.
    pub fn from_chain_map(&self, f: &ChainMap<R>) -> SparseVec<R::Elem> {
        let index: BTreeMap<(usize, usize), usize> = self
            .pairs
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect();
        let r = self.source.ring();
        let mut v = Vec::new();
        for (g, col) in f.cols.iter().enumerate() {
            for (h, c) in col {
                if let Some(&i) = index.get(&(g, *h)) {
                    v.push((i, c.clone()));
                }
            }
        }
        collect_sparse(r, v)
    }

    /// Cycles representing a basis of `H^n` (fields only).
    pub fn cohomology_basis(&self, n: i32) -> Result<Vec<SparseVec<R::Elem>>> {
        let r = self.source.ring();
        if !r.is_field() {
            return Err(Error::NotAField(r.spec().to_string()));
        }
        let red = reduce(&self.complex, false, true);
        let iota = red.iota.expect("tracked");
        Ok(red
            .kept
            .iter()
            .enumerate()
            .filter(|(_, &o)| self.complex.degrees[o] == n)
            .map(|(i, _)| iota[i].clone())
            .collect())
    }

    /// Chain maps `A -> B[n]` representing a basis of `Hom(A, B[n])`.
    pub fn cohomology_maps(&self, n: i32) -> Result<Vec<ChainMap<R>>> {
        self.cohomology_basis(n)?
            .iter()
            .map(|v| self.to_chain_map(n, v))
            .collect()
    }
}

/// Graded `Hom(A, B[n])`.
pub fn hom_dims<R: Ring>(a: &InjComplex<R>, b: &InjComplex<R>) -> GradedDims {
    hom_complex(a, b).cohomology()
}
