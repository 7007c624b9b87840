//! Resolutions and families over the singular fixtures, and fibre product
//! models for the convolution check.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cellposet::build::{barycentric_with_approximation, cone, mapping_cylinder, suspension};
use crate::cellposet::{CellComplex, CellularMap, OpenSet};
use crate::error::{Error, Result};
use crate::fixtures::hopf::{hopf_quotient, hopf_s3, rp3, s3};
use crate::fixtures::i2;
use crate::ring::Ring;
use crate::sixfunctors::{constant_sheaf, pushforward_constant};

/// A proper map to a fixture together with the open set over which it is
/// declared an isomorphism (for resolutions) or smooth and proper (for
/// families).
#[derive(Clone, Debug)]
pub struct ResolutionFixture {
    pub name: String,
    pub map: CellularMap,
    pub open: OpenSet,
    /// Local-system input rather than a resolution.
    pub family: bool,
}

impl ResolutionFixture {
    pub fn target(&self) -> &Arc<CellComplex> {
        self.map.target()
    }

    pub fn source(&self) -> &Arc<CellComplex> {
        self.map.source()
    }

    /// Cells outside the open set.
    pub fn singular_cells(&self) -> Vec<usize> {
        self.open.complement_closed(self.target())
    }

    /// Whether the pushforward of the constant sheaf restricts to the
    /// constant sheaf over the open set: every stalk there is free of rank
    /// one in degree 0. Cell-level isomorphism is sufficient, not necessary.
    pub fn is_iso_over_open<R: Ring>(&self, ring: &R) -> Result<bool> {
        let (g, _, _) = self.map.restrict_over(&self.open)?;
        if g.is_poset_isomorphism() {
            return Ok(true);
        }
        let push = pushforward_constant(ring, &self.map)?.minimize();
        let unit = constant_sheaf(ring, self.target()).stalk_structure(self.open.cells()[0]);
        Ok(self.open.cells().iter().all(|&c| push.stalk_structure(c) == unit))
    }
}

fn complement_of(k: &CellComplex, cells: &[usize]) -> Result<OpenSet> {
    OpenSet::new(k, (0..k.len()).filter(|c| !cells.contains(c)))
}

/// Mapping cylinder of `h: A → B` mapped onto `cone(A)` (which must have
/// apex label `vertex_bound(A)`), through an optional simplicial
/// map `r: A' → A` of the source end.
fn cylinder_onto_cone(
    h: &CellularMap,
    r: Option<&CellularMap>,
    target: &Arc<CellComplex>,
    apex_label: usize,
) -> Result<CellularMap> {
    let hr = match r {
        Some(r) => r.then(h)?,
        None => h.clone(),
    };
    let cyl = mapping_cylinder(&hr)?;
    let down: Vec<usize> = match r {
        Some(r) => r.vertex_map().expect("simplicial").to_vec(),
        None => (0..cyl.target_offset).collect(),
    };
    let vm = (0..cyl.complex.vertex_bound())
        .map(|v| if v < cyl.target_offset { down[v] } else { apex_label })
        .collect();
    CellularMap::from_vertex_map(cyl.complex.clone(), target.clone(), vm)
}

/// The cone on `ℝP³` with its apex cell.
pub fn cone_rp3() -> Result<(Arc<CellComplex>, usize)> {
    let (c, _, apex) = cone(&Arc::new(rp3()))?;
    Ok((c, apex))
}

/// The cone on `ℝP³` resolved by the mapping cylinder of the Hopf quotient
/// (a disk bundle over `S²`), optionally with the link barycentrically
/// refined in the source.
pub fn hopf_cone(target: &Arc<CellComplex>, apex: usize, refined: bool) -> Result<ResolutionFixture> {
    let h = hopf_quotient(0)?;
    let a = h.source().clone();
    let r = if refined { Some(barycentric_with_approximation(&a)?.1) } else { None };
    let map = cylinder_onto_cone(&h, r.as_ref(), target, a.vertex_bound())?;
    Ok(ResolutionFixture {
        name: if refined { "cylinder(hopf_quotient) refined" } else { "cylinder(hopf_quotient)" }.into(),
        map,
        open: complement_of(target, &[apex])?,
        family: false,
    })
}

/// The cone on `S³` (a model of the affine plane) with apex.
pub fn cone_s3() -> Result<(Arc<CellComplex>, usize)> {
    let (c, _, apex) = cone(&Arc::new(s3()))?;
    Ok((c, apex))
}

/// Blow-up of the cone point of `cone(S³)`: the mapping cylinder of the
/// Hopf map.
pub fn hopf_blowup(target: &Arc<CellComplex>, apex: usize) -> Result<ResolutionFixture> {
    let h = hopf_s3(0)?;
    let label = h.source().vertex_bound();
    Ok(ResolutionFixture {
        name: "cylinder(hopf_s3)".into(),
        map: cylinder_onto_cone(&h, None, target, label)?,
        open: complement_of(target, &[apex])?,
        family: false,
    })
}

/// The identity as a resolution of a smooth fixture.
pub fn identity_resolution(target: &Arc<CellComplex>) -> ResolutionFixture {
    ResolutionFixture {
        name: "identity".into(),
        map: CellularMap::identity(target.clone()),
        open: OpenSet::all(target),
        family: false,
    }
}

/// `Σℝ P³` with its two suspension points.
pub fn suspension_rp3() -> Result<(Arc<CellComplex>, [usize; 2])> {
    let a = Arc::new(rp3());
    let n = a.vertex_bound();
    let s = Arc::new(suspension(&a)?);
    let p = [s.find_simplex(&[n]).expect("apex"), s.find_simplex(&[n + 1]).expect("apex")];
    Ok((s, p))
}

/// Both suspension points blown up by mapping cylinders of Hopf quotients
/// (colourings `variants`), glued along `ℝP³`.
pub fn double_cylinder(target: &Arc<CellComplex>, points: [usize; 2], variants: [usize; 2]) -> Result<ResolutionFixture> {
    let hs = [hopf_quotient(variants[0])?, hopf_quotient(variants[1])?];
    let a = hs[0].source().clone();
    let n = a.vertex_bound();
    let nb = hs[0].target().vertex_bound();
    let mut simplices = Vec::new();
    for c in 0..a.len() {
        if a.cofaces(c).len() != 1 {
            continue;
        }
        let s = a.simplex(c).expect("simplicial");
        for (side, h) in hs.iter().enumerate() {
            let vm = h.vertex_map().expect("simplicial");
            for i in 0..s.len() {
                let mut t: Vec<usize> = s[..=i].iter().map(|&v| n + side * nb + vm[v]).collect();
                t.sort_unstable();
                t.dedup();
                t.extend_from_slice(&s[i..]);
                simplices.push(t);
            }
        }
    }
    let x = Arc::new(CellComplex::from_simplices(&simplices)?);
    let vm = (0..x.vertex_bound())
        .map(|v| if v < n { v } else { n + (v - n) / nb })
        .collect();
    let map = CellularMap::from_vertex_map(x, target.clone(), vm)?;
    Ok(ResolutionFixture {
        name: format!("double_cylinder({}, {})", variants[0], variants[1]),
        map,
        open: complement_of(target, &points)?,
        family: false,
    })
}

/// The degenerating torus family over the disk.
pub fn i2_resolution() -> Result<ResolutionFixture> {
    let f = i2::i2_family()?;
    Ok(ResolutionFixture {
        name: "i2_local_model".into(),
        map: f.map.with_smooth_proper(true),
        open: f.punctured,
        family: true,
    })
}

/// The trivial torus family over the same disk.
pub fn trivial_family_resolution() -> Result<ResolutionFixture> {
    let f = i2::trivial_family()?;
    Ok(ResolutionFixture {
        name: "trivial_torus_family".into(),
        map: f.map.with_smooth_proper(true),
        open: f.punctured,
        family: true,
    })
}

/// `X ×_Y X` for a map which is injective off the preimage `E` of finitely
/// many cells: `X ∪ (E × E)` glued along the diagonal. `E` must be a full
/// subcomplex whose vertices carry labels `offset..offset + vertex_bound(E)`
/// in `X`.
pub fn self_fibre_product(res: &ResolutionFixture) -> Result<Arc<CellComplex>> {
    let x = res.source();
    let f = &res.map;
    let sing = res.singular_cells();
    let simp = x.simplices().ok_or_else(|| Error::InvalidComplex("simplicial source required".into()))?;
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..x.len() {
        if x.dim(v) == 0 && sing.contains(&f.apply(v)) {
            groups.entry(f.apply(v)).or_default().push(simp[v][0]);
        }
    }
    let mut simplices: Vec<Vec<usize>> =
        (0..x.len()).filter(|&c| x.cofaces(c).len() == 1).map(|c| simp[c].clone()).collect();
    let mut next = x.vertex_bound();
    for verts in groups.values() {
        // the exceptional fibre as a complex on its own labels
        let fibre: Vec<usize> = (0..x.len())
            .filter(|&c| simp[c].iter().all(|v| verts.contains(v)))
            .collect();
        let (e, old) = x.restrict_closed(&fibre)?;
        let labels: Vec<usize> = (0..e.len()).filter(|&c| e.dim(c) == 0).map(|c| simp[old[c]][0]).collect();
        let local: BTreeMap<usize, usize> = labels.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let ne = labels.len();
        let mut pair = vec![usize::MAX; ne * ne];
        for a in 0..ne {
            for b in 0..ne {
                pair[a * ne + b] = if a == b {
                    labels[a]
                } else {
                    next += 1;
                    next - 1
                };
            }
        }
        let tops: Vec<Vec<usize>> = (0..e.len())
            .filter(|&c| e.cofaces(c).len() == 1)
            .map(|c| simp[old[c]].iter().map(|v| local[v]).collect())
            .collect();
        for s in &tops {
            for t in &tops {
                staircase(s, t, &mut |path| {
                    simplices.push(path.iter().map(|&(a, b)| pair[a * ne + b]).collect());
                });
            }
        }
    }
    Ok(Arc::new(CellComplex::from_simplices(&simplices)?))
}

fn staircase(s: &[usize], t: &[usize], emit: &mut dyn FnMut(&[(usize, usize)])) {
    fn rec(
        s: &[usize],
        t: &[usize],
        i: usize,
        j: usize,
        path: &mut Vec<(usize, usize)>,
        emit: &mut dyn FnMut(&[(usize, usize)]),
    ) {
        path.push((s[i], t[j]));
        if i + 1 == s.len() && j + 1 == t.len() {
            emit(path);
        }
        if i + 1 < s.len() {
            rec(s, t, i + 1, j, path, emit);
        }
        if j + 1 < t.len() {
            rec(s, t, i, j + 1, path, emit);
        }
        path.pop();
    }
    let mut s = s.to_vec();
    let mut t = t.to_vec();
    s.sort_unstable();
    t.sort_unstable();
    rec(&s, &t, 0, 0, &mut Vec::new(), emit);
}
