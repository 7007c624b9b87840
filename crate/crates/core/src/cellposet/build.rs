//! Simplicial constructions: standard complexes, cones, suspensions, ordered
//! mapping cylinders, staircase products and barycentric subdivision.

use std::sync::Arc;

use crate::cellposet::{CellComplex, CellularMap};
use crate::error::{Error, Result};

fn maximal_simplices(k: &CellComplex) -> Result<Vec<Vec<usize>>> {
    let s = k
        .simplices()
        .ok_or_else(|| Error::InvalidComplex("simplicial complex required".into()))?;
    Ok((0..k.len())
        .filter(|&c| k.cofaces(c).len() == 1)
        .map(|c| s[c].clone())
        .collect())
}

pub fn point() -> CellComplex {
    CellComplex::from_simplices(&[vec![0]]).expect("point")
}

/// The full `n`-simplex on vertices `0..=n`.
pub fn simplex(n: usize) -> CellComplex {
    CellComplex::from_simplices(&[(0..=n).collect()]).expect("simplex")
}

/// Boundary of the `(n+1)`-simplex.
pub fn simplex_boundary(n: usize) -> CellComplex {
    let full: Vec<usize> = (0..=n + 1).collect();
    let facets: Vec<Vec<usize>> = (0..=n + 1)
        .map(|i| full.iter().copied().filter(|&v| v != i).collect())
        .collect();
    CellComplex::from_simplices(&facets).expect("sphere")
}

/// The `n`-sphere as the boundary of the `(n+1)`-dimensional cross-polytope
/// (the octahedron for `n = 2`). Vertex `2i` is `+e_i`, `2i+1` is `-e_i`.
pub fn sphere(n: usize) -> CellComplex {
    let m = n + 1;
    let facets: Vec<Vec<usize>> = (0..1usize << m)
        .map(|mask| (0..m).map(|i| 2 * i + (mask >> i & 1)).collect())
        .collect();
    CellComplex::from_simplices(&facets).expect("cross-polytope boundary")
}

/// A circle with `k ≥ 3` vertices.
pub fn circle(k: usize) -> Result<CellComplex> {
    if k < 3 {
        return Err(Error::InvalidComplex(
            "a simplicial circle needs at least 3 vertices".into(),
        ));
    }
    CellComplex::from_simplices(&(0..k).map(|i| vec![i, (i + 1) % k]).collect::<Vec<_>>())
}

/// The 6-vertex real projective plane.
pub fn rp2() -> CellComplex {
    let t = [
        [1, 2, 3],
        [1, 3, 4],
        [1, 4, 5],
        [1, 5, 6],
        [1, 6, 2],
        [2, 3, 5],
        [3, 4, 6],
        [4, 5, 2],
        [5, 6, 3],
        [6, 2, 4],
    ];
    CellComplex::from_simplices(
        &t.iter()
            .map(|s| s.iter().map(|v| v - 1).collect())
            .collect::<Vec<_>>(),
    )
    .expect("rp2")
}

/// Torus as the staircase product of two 3-vertex circles (18 triangles).
pub fn torus() -> CellComplex {
    let c = Arc::new(circle(3).expect("circle"));
    product(&c, &c).expect("torus").0
}

/// Cone with apex vertex `vertex_bound(K)`, the collapse map to the cone on a
/// point (an edge from the apex image `1` to the base image `0`), and the
/// apex cell.
pub fn cone(k: &Arc<CellComplex>) -> Result<(Arc<CellComplex>, CellularMap, usize)> {
    let apex = k.vertex_bound();
    let mut simplices = vec![vec![apex]];
    for s in maximal_simplices(k)? {
        let mut t = s.clone();
        t.push(apex);
        simplices.push(t);
    }
    let c = Arc::new(CellComplex::from_simplices(&simplices)?);
    let interval = Arc::new(simplex(1));
    let vm: Vec<usize> = (0..=apex).map(|v| usize::from(v == apex)).collect();
    let collapse = CellularMap::from_vertex_map(c.clone(), interval, vm)?;
    let apex_cell = c.find_simplex(&[apex]).expect("apex");
    Ok((c, collapse, apex_cell))
}

/// Suspension with apexes `n` and `n+1` where `n = vertex_bound(K)`.
pub fn suspension(k: &Arc<CellComplex>) -> Result<CellComplex> {
    let n = k.vertex_bound();
    let mut simplices = vec![vec![n], vec![n + 1]];
    for s in maximal_simplices(k)? {
        for a in [n, n + 1] {
            let mut t = s.clone();
            t.push(a);
            simplices.push(t);
        }
    }
    CellComplex::from_simplices(&simplices)
}

/// An ordered simplicial mapping cylinder with its structure maps.
#[derive(Clone, Debug)]
pub struct MappingCylinder {
    pub complex: Arc<CellComplex>,
    /// Projection onto the target of the map.
    pub to_target: CellularMap,
    /// Inclusion of the source end.
    pub source_inclusion: CellularMap,
    /// Inclusion of the target end.
    pub target_inclusion: CellularMap,
    /// Offset added to target vertex labels inside the cylinder.
    pub target_offset: usize,
}

impl MappingCylinder {
    /// The map to the cone on the source collapsing the target end to the
    /// apex; the cone is built with [`cone`].
    pub fn to_source_cone(&self) -> Result<(Arc<CellComplex>, CellularMap, usize)> {
        let a = self.source_inclusion.source().clone();
        let (c, _, apex_cell) = cone(&a)?;
        let apex = a.vertex_bound();
        let vm: Vec<usize> = (0..self.complex.vertex_bound())
            .map(|v| if v < self.target_offset { v } else { apex })
            .collect();
        let m = CellularMap::from_vertex_map(self.complex.clone(), c.clone(), vm)?;
        Ok((c, m, apex_cell))
    }

    /// Cells of the cylinder containing a vertex of the target end: the open
    /// neighbourhood of the target end.
    pub fn target_neighbourhood(&self) -> crate::cellposet::OpenSet {
        let s = self.complex.simplices().expect("simplicial");
        crate::cellposet::OpenSet::new(
            &self.complex,
            (0..self.complex.len()).filter(|&c| s[c].iter().any(|&v| v >= self.target_offset)),
        )
        .expect("star of a subcomplex")
    }
}

/// Ordered mapping cylinder of a simplicial map `φ: A -> B`.
///
/// Source vertices keep their labels, target vertices are shifted by
/// `vertex_bound(A)`. Each simplex `v0 < … < vk` of `A` contributes the
/// simplices `{φ(v0), …, φ(vi)} ∪ {vi, …, vk}`.
pub fn mapping_cylinder(phi: &CellularMap) -> Result<MappingCylinder> {
    let vm = phi
        .vertex_map()
        .ok_or_else(|| Error::InvalidMap("mapping cylinder needs a simplicial map".into()))?;
    let a = phi.source();
    let b = phi.target();
    let off = a.vertex_bound();
    let mut simplices = Vec::new();
    for s in maximal_simplices(a)? {
        for i in 0..s.len() {
            let mut t: Vec<usize> = s[..=i].iter().map(|&v| vm[v] + off).collect();
            t.sort_unstable();
            t.dedup();
            t.extend_from_slice(&s[i..]);
            simplices.push(t);
        }
    }
    for s in maximal_simplices(b)? {
        simplices.push(s.iter().map(|&v| v + off).collect());
    }
    let cyl = Arc::new(CellComplex::from_simplices(&simplices)?);
    let nv = off + b.vertex_bound();
    let proj: Vec<usize> = (0..nv)
        .map(|v| if v < off { vm[v] } else { v - off })
        .collect();
    let to_target = CellularMap::from_vertex_map(cyl.clone(), b.clone(), proj)?;
    let source_inclusion =
        CellularMap::from_vertex_map(a.clone(), cyl.clone(), (0..off).collect())?;
    let target_inclusion = CellularMap::from_vertex_map(
        b.clone(),
        cyl.clone(),
        (0..b.vertex_bound()).map(|v| v + off).collect(),
    )?;
    Ok(MappingCylinder {
        complex: cyl,
        to_target,
        source_inclusion,
        target_inclusion,
        target_offset: off,
    })
}

/// Staircase triangulation of `|K| × |L|`; vertex `(a, b)` gets label
/// `a * vertex_bound(L) + b`. Returns the two projections.
pub fn product(
    k: &Arc<CellComplex>,
    l: &Arc<CellComplex>,
) -> Result<(CellComplex, Vec<usize>, Vec<usize>)> {
    let nl = l.vertex_bound();
    let mut simplices = Vec::new();
    for s in maximal_simplices(k)? {
        for t in maximal_simplices(l)? {
            staircase(&s, &t, nl, &mut simplices);
        }
    }
    let p = CellComplex::from_simplices(&simplices)?;
    let nv = k.vertex_bound() * nl;
    Ok((
        p,
        (0..nv).map(|v| v / nl).collect(),
        (0..nv).map(|v| v % nl).collect(),
    ))
}

/// Product with both projections as cellular maps.
pub fn product_with_maps(
    k: &Arc<CellComplex>,
    l: &Arc<CellComplex>,
) -> Result<(Arc<CellComplex>, CellularMap, CellularMap)> {
    let (p, a, b) = product(k, l)?;
    let p = Arc::new(p);
    let pa = CellularMap::from_vertex_map(p.clone(), k.clone(), a)?;
    let pb = CellularMap::from_vertex_map(p.clone(), l.clone(), b)?;
    Ok((p, pa, pb))
}

fn staircase(s: &[usize], t: &[usize], nl: usize, out: &mut Vec<Vec<usize>>) {
    // lattice paths from (0,0) to (p,q)
    let (p, q) = (s.len() - 1, t.len() - 1);
    let mut path = vec![(0usize, 0usize)];
    fn rec(
        i: usize,
        j: usize,
        p: usize,
        q: usize,
        path: &mut Vec<(usize, usize)>,
        emit: &mut dyn FnMut(&[(usize, usize)]),
    ) {
        if i == p && j == q {
            emit(path);
            return;
        }
        if i < p {
            path.push((i + 1, j));
            rec(i + 1, j, p, q, path, emit);
            path.pop();
        }
        if j < q {
            path.push((i, j + 1));
            rec(i, j + 1, p, q, path, emit);
            path.pop();
        }
    }
    rec(0, 0, p, q, &mut path, &mut |pth| {
        out.push(pth.iter().map(|&(i, j)| s[i] * nl + t[j]).collect())
    });
}

/// Barycentric subdivision: one vertex per cell (labelled by the cell
/// index), one simplex per chain. Returns the subdivision and, per cell of
/// the subdivision, its carrier (the top cell of the chain).
pub fn barycentric(k: &CellComplex) -> Result<(CellComplex, Vec<usize>)> {
    let mut chains: Vec<Vec<usize>> = Vec::new();
    // maximal chains: start at top cells and go down along facets
    let tops: Vec<usize> = (0..k.len()).filter(|&c| k.cofaces(c).len() == 1).collect();
    let mut stack: Vec<Vec<usize>> = tops.iter().map(|&c| vec![c]).collect();
    while let Some(ch) = stack.pop() {
        let last = *ch.last().unwrap();
        let facets = k.facets(last);
        if facets.is_empty() {
            chains.push(ch);
            continue;
        }
        for &(s, _) in facets {
            let mut n = ch.clone();
            n.push(s);
            stack.push(n);
        }
    }
    let sd = CellComplex::from_simplices(&chains)?;
    let simp = sd.simplices().expect("simplicial");
    let carrier = simp
        .iter()
        .map(|s| *s.iter().max_by_key(|&&c| k.dim(c)).expect("nonempty"))
        .collect();
    Ok((sd, carrier))
}

/// Barycentric subdivision together with the simplicial approximation of
/// the identity sending the barycentre of a simplex to its largest vertex.
pub fn barycentric_with_approximation(
    k: &Arc<CellComplex>,
) -> Result<(Arc<CellComplex>, CellularMap)> {
    let simp = k
        .simplices()
        .ok_or_else(|| Error::InvalidComplex("simplicial complex required".into()))?;
    let (sd, _) = barycentric(k)?;
    let sd = Arc::new(sd);
    let vm: Vec<usize> = simp.iter().map(|s| *s.iter().max().unwrap()).collect();
    let approx = CellularMap::from_vertex_map(sd.clone(), k.clone(), vm)?;
    Ok((sd, approx))
}

/// Subdivides the source of a cellular map into a simplicial target until
/// the map is simplicial, at most `bound` times. The barycentre of a cell
/// goes to the largest vertex of its image cell.
pub fn subdivide_map(f: &CellularMap, bound: usize) -> Result<CellularMap> {
    let target_simp = f
        .target()
        .simplices()
        .ok_or_else(|| Error::InvalidMap("target must be simplicial".into()))?
        .to_vec();
    let mut cur = f.clone();
    let mut steps = 0;
    loop {
        if cur.vertex_map().is_some() && cur.source().is_simplicial() {
            return Ok(cur);
        }
        if steps == bound {
            break;
        }
        if !cur.source().is_closed() {
            return Err(Error::InvalidComplex(
                "subdivision of an open complex".into(),
            ));
        }
        let (sd, _) = barycentric(cur.source())?;
        let vm: Vec<usize> = (0..cur.source().len())
            .map(|c| *target_simp[cur.apply(c)].iter().max().unwrap())
            .collect();
        cur = CellularMap::from_vertex_map(Arc::new(sd), f.target().clone(), vm)?;
        steps += 1;
    }
    Err(Error::SubdivisionBound(bound))
}
