//! Local model of a degeneration of elliptic curves with two vanishing
//! cycles: a torus bundle over a triangle with monodromy `[[1,2],[0,1]]`,
//! collapsed onto two spheres meeting in two points over the centre of a
//! disk.
//!
//! The fibre torus is a 4×4 grid `(i, j)` with the diagonal triangulation.
//! The bundle has three layers; consecutive layers are glued by the rotation
//! `(i, j) ↦ (i+1, j)`, the last layer to the first by the shear
//! `(i, j) ↦ (i+2j, j)` followed by two rounds of diagonal flips. Rows 0 and
//! 2 are the vanishing cycles.

use std::sync::Arc;

use crate::cellposet::build::{circle, cone, mapping_cylinder, product_with_maps};
use crate::cellposet::{CellComplex, CellularMap, OpenSet};
use crate::error::Result;

const M: usize = 4;
const K: usize = 4;
const LAYERS: usize = 3;

fn vid(i: usize, j: usize, l: usize) -> usize {
    l * M * K + (j % K) * M + i % M
}

fn grid_triangles() -> Vec<[(usize, usize); 3]> {
    let mut out = Vec::new();
    for j in 0..K {
        for i in 0..M {
            out.push([(i, j), (i + 1, j), (i + 1, j + 1)]);
            out.push([(i, j), (i, j + 1), (i + 1, j + 1)]);
        }
    }
    out.into_iter()
        .map(|t| t.map(|(i, j)| (i % M, j % K)))
        .collect()
}

/// The fibre torus on vertices `j * 4 + i`.
pub fn grid_torus() -> CellComplex {
    let t: Vec<Vec<usize>> = grid_triangles()
        .iter()
        .map(|t| t.iter().map(|&(i, j)| vid(i, j, 0)).collect())
        .collect();
    CellComplex::from_simplices(&t).expect("grid torus")
}

/// The torus bundle with its projection to the 3-vertex circle.
pub fn torus_bundle() -> Result<(Arc<CellComplex>, CellularMap)> {
    let rot = |(i, j): (usize, usize)| ((i + 1) % M, j);
    let shear = |(i, j): (usize, usize)| ((i + 2 * j) % M, j);
    let mut tets: Vec<Vec<usize>> = Vec::new();
    for l in 0..LAYERS {
        let next = (l + 1) % LAYERS;
        for mut t in grid_triangles() {
            t.sort_by_key(|&(i, j)| j * M + i);
            let bottom: Vec<usize> = t.iter().map(|&(i, j)| vid(i, j, l)).collect();
            let top: Vec<usize> = t
                .iter()
                .map(|&v| {
                    let (i, j) = if next == 0 { shear(v) } else { rot(v) };
                    vid(i, j, next)
                })
                .collect();
            for s in 0..3 {
                let mut tet = bottom[..=s].to_vec();
                tet.extend_from_slice(&top[s..]);
                tets.push(tet);
            }
        }
    }
    // relative shift 2 between rows, flipped down to the grid triangulation
    for j in 0..K {
        for r in [2, 1] {
            for a in 0..M {
                tets.push(vec![vid(a, j, 0), vid(a + 1, j, 0), vid(a + r, j + 1, 0), vid(a + r + 1, j + 1, 0)]);
            }
        }
    }
    let m = Arc::new(CellComplex::from_simplices(&tets)?);
    let base = Arc::new(circle(LAYERS)?);
    let vm = (0..M * K * LAYERS).map(|v| v / (M * K)).collect();
    let p = CellularMap::from_vertex_map(m.clone(), base, vm)?;
    Ok((m, p))
}

/// Two octahedra sharing their poles: vertex 0 and 1 are the shared poles,
/// `2 + a` and `6 + a` the equators.
pub fn two_spheres() -> CellComplex {
    let mut t = Vec::new();
    for eq in [2, 6] {
        for a in 0..M {
            for pole in [0, 1] {
                t.push(vec![pole, eq + a, eq + (a + 1) % M]);
            }
        }
    }
    CellComplex::from_simplices(&t).expect("two spheres")
}

/// The collapse of the bundle onto the central fibre: rows 0 and 2 go to
/// the poles, rows 1 and 3 rotate back by the layer index.
pub fn collapse(bundle: &Arc<CellComplex>) -> Result<CellularMap> {
    let vm = (0..M * K * LAYERS)
        .map(|v| {
            let (l, j, i) = (v / (M * K), v % (M * K) / M, v % M);
            let i = (i + LAYERS * M - l) % M;
            match j {
                0 => 0,
                2 => 1,
                1 => 2 + i,
                _ => 6 + i,
            }
        })
        .collect();
    CellularMap::from_vertex_map(bundle.clone(), Arc::new(two_spheres()), vm)
}

/// A family over the disk `cone(circle(3))` with its centre cell and the
/// open complement of the centre.
#[derive(Clone, Debug)]
pub struct DiskFamily {
    pub total: Arc<CellComplex>,
    pub base: Arc<CellComplex>,
    pub map: CellularMap,
    pub centre: usize,
    pub punctured: OpenSet,
}

fn disk() -> Result<(Arc<CellComplex>, usize, OpenSet)> {
    let (d, _, centre) = cone(&Arc::new(circle(LAYERS)?))?;
    let u = OpenSet::new(&d, (0..d.len()).filter(|&c| c != centre))?;
    Ok((d, centre, u))
}

/// The degenerating family: the mapping cylinder of [`collapse`] over the
/// disk, the bundle end over the boundary circle.
pub fn i2_family() -> Result<DiskFamily> {
    let (m, _) = torus_bundle()?;
    let c = collapse(&m)?;
    let cyl = mapping_cylinder(&c)?;
    let (base, centre, punctured) = disk()?;
    let apex = LAYERS;
    let vm = (0..cyl.complex.vertex_bound())
        .map(|v| if v < cyl.target_offset { v / (M * K) } else { apex })
        .collect();
    let map = CellularMap::from_vertex_map(cyl.complex.clone(), base.clone(), vm)?;
    Ok(DiskFamily { total: cyl.complex, base, map, centre, punctured })
}

/// The product family `T² × D → D` on the same fibre torus and disk.
pub fn trivial_family() -> Result<DiskFamily> {
    let (base, centre, punctured) = disk()?;
    let (total, _, map) = product_with_maps(&Arc::new(grid_torus()), &base)?;
    Ok(DiskFamily { total, base, map, centre, punctured })
}

/// Cells of the boundary circle of the disk, in cyclic order starting at a
/// vertex: `v0, e01, v1, e12, v2, e20`.
pub fn boundary_cycle(base: &CellComplex) -> Vec<usize> {
    let mut out = Vec::new();
    for l in 0..LAYERS {
        let n = (l + 1) % LAYERS;
        out.push(base.find_simplex(&[l]).expect("vertex"));
        out.push(base.find_simplex(&[l.min(n), l.max(n)]).expect("edge"));
    }
    out
}
