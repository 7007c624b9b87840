//! Cellular (co)homology of cell complexes. Used for fixture validation and
//! as an oracle independent of the sheaf machinery.

use std::collections::BTreeMap;

use crate::cellposet::CellComplex;
use crate::linalg::FreeComplex;
use crate::ring::{ModRing, Ring};

/// Cellular cochain complex: `d(σ) = Σ [τ:σ] τ` over cofacets `τ`.
pub fn cochain_complex<R: Ring>(k: &CellComplex, ring: &R) -> FreeComplex<R> {
    let degrees = k.dims().iter().map(|&d| d as i32).collect();
    let d = (0..k.len())
        .map(|c| {
            let mut v: Vec<(usize, R::Elem)> = k
                .cofacets(c)
                .iter()
                .map(|&(t, s)| (t, ring.from_i64(s as i64)))
                .collect();
            v.sort_by_key(|e| e.0);
            v
        })
        .collect();
    FreeComplex::plain(ring, degrees, d)
}

/// Cellular chain complex in cohomological grading (chains of dimension
/// `n` sit in degree `-n`). For open complexes these are Borel-Moore chains.
pub fn chain_complex<R: Ring>(k: &CellComplex, ring: &R) -> FreeComplex<R> {
    let degrees = k.dims().iter().map(|&d| -(d as i32)).collect();
    let d = (0..k.len())
        .map(|c| {
            let mut v: Vec<(usize, R::Elem)> = k
                .facets(c)
                .iter()
                .map(|&(s, x)| (s, ring.from_i64(x as i64)))
                .collect();
            v.sort_by_key(|e| e.0);
            v
        })
        .collect();
    FreeComplex::plain(ring, degrees, d)
}

/// Betti numbers `b_0, b_1, …` of the cellular homology (Borel-Moore for
/// open complexes); over `Z/p^k` the number of cyclic summands.
pub fn homology_dims<R: Ring>(k: &CellComplex, ring: &R) -> Vec<usize> {
    let b = chain_complex(k, ring).betti();
    dense_table(
        &b.into_iter().map(|(d, n)| (-d, n)).collect(),
        k.dimension(),
    )
}

/// Cellular cohomology dimensions `h^0, h^1, …` (compactly supported for
/// open complexes).
pub fn cohomology_dims<R: Ring>(k: &CellComplex, ring: &R) -> Vec<usize> {
    dense_table(&cochain_complex(k, ring).betti(), k.dimension())
}

/// Full module structure of homology: per degree, the exponents `e` of the
/// cyclic summands `Z/p^e`.
pub fn homology_structure<R: Ring>(k: &CellComplex, ring: &R) -> BTreeMap<usize, Vec<u32>> {
    chain_complex(k, ring)
        .cohomology()
        .into_iter()
        .map(|(d, v)| ((-d) as usize, v))
        .collect()
}

fn dense_table(m: &BTreeMap<i32, usize>, dim: usize) -> Vec<usize> {
    let top = m.keys().copied().max().unwrap_or(0).max(dim as i32).max(0) as usize;
    (0..=top)
        .map(|i| m.get(&(i as i32)).copied().unwrap_or(0))
        .collect()
}

/// Reduced mod-2 homology of the boundary of a closed cell, in degrees
/// `0..dim-1`.
pub fn reduced_boundary_homology_f2(k: &CellComplex, cell: usize) -> Vec<usize> {
    let f2 = ModRing::prime_field(2).expect("2 is prime");
    let faces: Vec<usize> = k
        .faces(cell)
        .iter()
        .copied()
        .filter(|&c| c != cell)
        .collect();
    let (sub, _) = k.restrict_closed(&faces).expect("boundary is closed");
    let mut h = homology_dims(&sub, &f2);
    let d = k.dim(cell) - 1;
    h.resize(d + 1, 0);
    h.truncate(d + 1);
    // reduce in degree 0
    if !faces.is_empty() {
        h[0] -= 1;
    }
    h
}

/// Reduced homology of the order complex of a poset given by its cells
/// (every chain becomes a simplex), used as an oracle for face posets.
pub fn order_complex_homology<R: Ring>(k: &CellComplex, ring: &R) -> Vec<usize> {
    let chains = k.poset().chains(None);
    let oc = CellComplex::from_simplices(&chains).expect("chains are simplices");
    homology_dims(&oc, ring)
}
