//! Mayer-Vietoris oracle for the non-pure part of the cohomology of a
//! suspension `ΣL` resolved by two mapping cylinders of maps `h±: L → B±`.
//!
//! With `ΣL = C+ ∪ C-` and `X = M+ ∪ M-` (both intersections `≃ L`) the
//! connecting maps satisfy `δ_X = f^* ∘ δ_Y`, and `δ_Y: H̃^{n-1}(L) → H^n(ΣL)`
//! is an isomorphism for `n ≥ 1`. Hence
//!
//! ```text
//! ker(f^*: H^n(ΣL) → H^n(X)) ≅ ker δ_X = im h+^* + im h-^*   (in H^{n-1}(L), n ≥ 2)
//! ```
//!
//! and the kernel vanishes for `n ≤ 1`. The image is computed from plain
//! simplicial chains, dually as the rank of `(h+_*, h-_*)` on homology.

use geomext::cellposet::{CellComplex, CellularMap};
use geomext::Ring;

/// Dense rank by Gaussian elimination.
fn rank<R: Ring>(r: &R, mut rows: Vec<Vec<R::Elem>>) -> usize {
    let cols = rows.first().map_or(0, |x| x.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !r.is_zero(&rows[i][c])) else { continue };
        rows.swap(rank, p);
        let inv = r.inv(&rows[rank][c]).expect("field");
        let pivot: Vec<R::Elem> = rows[rank].iter().map(|x| r.mul(x, &inv)).collect();
        for i in 0..rows.len() {
            if i != rank && !r.is_zero(&rows[i][c]) {
                let f = rows[i][c].clone();
                for j in c..cols {
                    let t = r.mul(&f, &pivot[j]);
                    rows[i][j] = r.sub(&rows[i][j], &t);
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

fn simplices_of_dim(k: &CellComplex, n: usize) -> Vec<Vec<usize>> {
    let all = k.simplices().expect("simplicial");
    let mut v: Vec<Vec<usize>> = all.iter().filter(|s| s.len() == n + 1).cloned().collect();
    v.sort();
    v
}

/// Boundary of an oriented simplex as a vector over `target` simplices.
fn boundary<R: Ring>(r: &R, s: &[usize], target: &[Vec<usize>]) -> Vec<R::Elem> {
    let mut out = vec![r.zero(); target.len()];
    for i in 0..s.len() {
        let mut face = s.to_vec();
        face.remove(i);
        let j = target.binary_search(&face).expect("face");
        out[j] = r.add(&out[j], &r.sign(i % 2 == 0));
    }
    out
}

/// Image of an oriented simplex under a vertex map, with its sign.
fn image<R: Ring>(r: &R, vm: &[usize], s: &[usize], target: &[Vec<usize>]) -> Option<(usize, R::Elem)> {
    let img: Vec<usize> = s.iter().map(|&v| vm[v]).collect();
    let mut sorted = img.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    let inversions = (0..img.len())
        .flat_map(|i| (i + 1..img.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| img[i] > img[j])
        .count();
    Some((target.binary_search(&sorted).expect("image simplex"), r.sign(inversions % 2 == 0)))
}

/// A basis of the cycles in degree `n` (rows over the `n`-simplices).
fn cycles<R: Ring>(r: &R, k: &CellComplex, n: usize) -> Vec<Vec<R::Elem>> {
    let cells = simplices_of_dim(k, n);
    if n == 0 {
        return (0..cells.len())
            .map(|i| (0..cells.len()).map(|j| if i == j { r.one() } else { r.zero() }).collect())
            .collect();
    }
    let faces = simplices_of_dim(k, n - 1);
    // columns: simplices; rows: faces. Kernel by reduced echelon form.
    let d: Vec<Vec<R::Elem>> = cells.iter().map(|s| boundary(r, s, &faces)).collect();
    let mut m: Vec<Vec<R::Elem>> = (0..faces.len()).map(|i| d.iter().map(|col| col[i].clone()).collect()).collect();
    let cols = cells.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..m.len()).find(|&i| !r.is_zero(&m[i][c])) else { continue };
        m.swap(row, p);
        let inv = r.inv(&m[row][c]).expect("field");
        for j in 0..cols {
            m[row][j] = r.mul(&m[row][j], &inv);
        }
        for i in 0..m.len() {
            if i != row && !r.is_zero(&m[i][c]) {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = r.mul(&f, &m[row][j]);
                    m[i][j] = r.sub(&m[i][j], &t);
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![r.zero(); cols];
            v[free] = r.one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = r.neg(&m[i][free]);
            }
            v
        })
        .collect()
}

fn boundaries<R: Ring>(r: &R, k: &CellComplex, n: usize) -> Vec<Vec<R::Elem>> {
    let faces = simplices_of_dim(k, n);
    simplices_of_dim(k, n + 1).iter().map(|s| boundary(r, s, &faces)).collect()
}

/// `dim(im h+^* + im h-^*)` in `H^n(L)`: the rank of `(h+_*, h-_*)` on `H_n(L)`.
pub fn joint_pullback_rank<R: Ring>(r: &R, maps: &[&CellularMap], n: usize) -> usize {
    let source = maps[0].source();
    let src = simplices_of_dim(source, n);
    let targets: Vec<Vec<Vec<usize>>> = maps.iter().map(|h| simplices_of_dim(h.target(), n)).collect();
    let offsets: Vec<usize> = targets.iter().scan(0, |acc, t| {
        let o = *acc;
        *acc += t.len();
        Some(o)
    }).collect();
    let width: usize = targets.iter().map(|t| t.len()).sum();
    let mut bounds = Vec::new();
    for (i, h) in maps.iter().enumerate() {
        for b in boundaries(r, h.target(), n) {
            let mut row = vec![r.zero(); width];
            row[offsets[i]..offsets[i] + b.len()].clone_from_slice(&b);
            bounds.push(row);
        }
    }
    let mut images = bounds.clone();
    for z in cycles(r, source, n) {
        let mut row = vec![r.zero(); width];
        for (i, h) in maps.iter().enumerate() {
            let vm = h.vertex_map().expect("simplicial");
            for (s, c) in src.iter().zip(&z) {
                if r.is_zero(c) {
                    continue;
                }
                if let Some((j, sign)) = image(r, vm, s, &targets[i]) {
                    let t = r.mul(c, &sign);
                    row[offsets[i] + j] = r.add(&row[offsets[i] + j], &t);
                }
            }
        }
        images.push(row);
    }
    if width == 0 {
        return 0;
    }
    rank(r, images) - rank(r, bounds)
}

/// Graded dims of the non-pure part `ker(H^*(ΣL) → H^*(X))` in degrees
/// `0..=top`, reduced cohomology of `L` entering in degrees `≥ 1`.
pub fn non_pure_kernel<R: Ring>(r: &R, maps: &[&CellularMap], top: usize) -> Vec<usize> {
    (0..=top)
        .map(|n| if n < 2 { 0 } else { joint_pullback_rank(r, maps, n - 1) })
        .collect()
}
