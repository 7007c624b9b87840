//! The 3-sphere as the barycentric subdivision of the boundary of the
//! 4-dimensional cross-polytope, its antipodal quotient, and simplicial
//! models of the Hopf map and its quotient onto the boundary of a
//! tetrahedron.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cellposet::build::simplex_boundary;
use crate::cellposet::{CellComplex, CellularMap};
use crate::error::{Error, Result};

/// A face of the cross-polytope: signed coordinate directions with distinct
/// coordinates, sorted by coordinate.
type Face = Vec<(usize, i8)>;

/// Directions whose Voronoi-type regions colour the sphere; each row sums
/// with the others to zero. Two choices giving different simplicial maps.
pub const HOPF_DIRECTIONS: [[[i64; 3]; 4]; 2] = [
    [[-2, 1, 0], [0, 3, 1], [-1, -3, 3], [3, -1, -4]],
    [[2, 2, -3], [1, 0, 3], [3, -1, -2], [-6, -1, 2]],
];

fn faces() -> Vec<Face> {
    let mut out: Vec<Face> = Vec::new();
    for mask in 1u32..16 {
        let coords: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
        for signs in 0u32..(1 << coords.len()) {
            out.push(
                coords
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| (c, if signs >> k & 1 == 1 { -1 } else { 1 }))
                    .collect(),
            );
        }
    }
    out.sort_by_key(|f| (f.len(), f.clone()));
    out
}

fn negate(f: &Face) -> Face {
    f.iter().map(|&(c, s)| (c, -s)).collect()
}

/// Maximal chains `F1 ⊂ F2 ⊂ F3 ⊂ F4` of faces, by face index.
fn chains(faces: &[Face]) -> Vec<[usize; 4]> {
    let index: BTreeMap<&Face, usize> = faces.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut out = Vec::new();
    for top in faces.iter().filter(|f| f.len() == 4) {
        let mut perm = [0usize, 1, 2, 3];
        permutations(&mut perm, 0, &mut |p| {
            let mut chain = [0; 4];
            for k in 0..4 {
                let mut f: Face = p[..=k].iter().map(|&i| top[i]).collect();
                f.sort();
                chain[k] = index[&f];
            }
            out.push(chain);
        });
    }
    out
}

fn permutations(p: &mut [usize; 4], k: usize, emit: &mut dyn FnMut(&[usize; 4])) {
    if k == p.len() {
        emit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, emit);
        p.swap(k, i);
    }
}

/// Unnormalised Hopf map of the barycentre of a face; quadratic, so
/// invariant under the antipodal map.
fn hopf_vector(f: &Face) -> [i64; 3] {
    let mut v = [0i64; 4];
    for &(c, s) in f {
        v[c] = s as i64;
    }
    [
        2 * (v[0] * v[2] + v[1] * v[3]),
        2 * (v[1] * v[2] - v[0] * v[3]),
        v[0] * v[0] + v[1] * v[1] - v[2] * v[2] - v[3] * v[3],
    ]
}

fn colour(f: &Face, dirs: &[[i64; 3]; 4]) -> usize {
    let h = hopf_vector(f);
    let score = |t: &[i64; 3]| t[0] * h[0] + t[1] * h[1] + t[2] * h[2];
    let mut best = 0;
    for j in 1..4 {
        if score(&dirs[j]) > score(&dirs[best]) {
            best = j;
        }
    }
    best
}

/// The 80-vertex 3-sphere; vertex labels are face indices.
pub fn s3() -> CellComplex {
    let f = faces();
    let tets: Vec<Vec<usize>> = chains(&f).iter().map(|c| c.to_vec()).collect();
    CellComplex::from_simplices(&tets).expect("subdivided cross-polytope")
}

/// Antipodal class labels: the class of a face is numbered by the first
/// member in face order.
fn classes(f: &[Face]) -> Vec<usize> {
    let index: BTreeMap<&Face, usize> = f.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut label = vec![usize::MAX; f.len()];
    let mut next = 0;
    for (i, x) in f.iter().enumerate() {
        if label[i] == usize::MAX {
            let j = index[&negate(x)];
            label[i] = next;
            label[j] = next;
            next += 1;
        }
    }
    label
}

/// The 40-vertex real projective 3-space, the antipodal quotient of [`s3`].
pub fn rp3() -> CellComplex {
    let f = faces();
    let cls = classes(&f);
    let tets: Vec<Vec<usize>> = chains(&f)
        .iter()
        .map(|c| c.iter().map(|&i| cls[i]).collect())
        .collect();
    CellComplex::from_simplices(&tets).expect("antipodal quotient")
}

/// The Hopf map `S³ → S²` onto the boundary of a tetrahedron.
pub fn hopf_s3(variant: usize) -> Result<CellularMap> {
    let dirs = directions(variant)?;
    let f = faces();
    let vm = f.iter().map(|x| colour(x, dirs)).collect();
    CellularMap::from_vertex_map(Arc::new(s3()), Arc::new(simplex_boundary(2)), vm)
}

/// The quotient of the Hopf map, `ℝP³ → S²`, with circle fibres.
pub fn hopf_quotient(variant: usize) -> Result<CellularMap> {
    let dirs = directions(variant)?;
    let f = faces();
    let cls = classes(&f);
    let mut vm = vec![0; f.len() / 2];
    for (i, x) in f.iter().enumerate() {
        vm[cls[i]] = colour(x, dirs);
    }
    CellularMap::from_vertex_map(Arc::new(rp3()), Arc::new(simplex_boundary(2)), vm)
}

fn directions(variant: usize) -> Result<&'static [[i64; 3]; 4]> {
    HOPF_DIRECTIONS
        .get(variant)
        .ok_or_else(|| Error::Precondition(format!("no Hopf colouring {variant}")))
}
