//! Pullback, pushforward, extension by zero, duality, Borel-Moore classes
//! and orientations on cellular maps.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::cellposet::{CellComplex, CellularMap, OpenSet};
use crate::error::{Error, Result};
use crate::linalg::elim::{reduce, FreeComplex};
use crate::linalg::sparse::{collect_sparse, SparseVec};
use crate::linalg::Matrix;
use crate::ring::Ring;
use crate::shcomplex::{hom_complex, hom_complex_in, ChainMap, GradedDims, InjComplex, RepComplex};

/// The dualizing complex: one generator per cell `σ`, in degree `-dim σ`,
/// with the signed boundary as differential.
pub fn dualizing_complex<R: Ring>(ring: &R, x: &Arc<CellComplex>) -> InjComplex<R> {
    RepComplex::constant(ring, x.clone()).dual()
}

/// A minimal injective model of the constant sheaf.
pub fn constant_sheaf<R: Ring>(ring: &R, x: &Arc<CellComplex>) -> InjComplex<R> {
    dualizing_complex(ring, x).to_rep().dual().minimize()
}

pub fn verdier_dual<R: Ring>(f: &InjComplex<R>) -> InjComplex<R> {
    f.dual()
}

/// `φ^*` on an explicit complex.
pub fn pullback_rep<R: Ring>(phi: &CellularMap, g: &RepComplex<R>) -> Result<RepComplex<R>> {
    g.pullback(phi)
}

/// `φ^*` on injective complexes (through the explicit form).
pub fn pullback<R: Ring>(phi: &CellularMap, g: &InjComplex<R>) -> Result<InjComplex<R>> {
    Ok(g.to_rep().pullback(phi)?.injective_model())
}

/// `Rφ_* = Rφ_!`: relabelling of injectives followed by minimization.
pub fn derived_pushforward<R: Ring>(phi: &CellularMap, f: &InjComplex<R>) -> Result<InjComplex<R>> {
    if f.space().len() != phi.source().len() {
        return Err(Error::InvalidMap(
            "complex does not live on the source of the map".into(),
        ));
    }
    Ok(f.relabel(phi.target().clone(), phi.cells()).minimize())
}

/// `Rφ_* 1`, computed as `D Rφ_* ω` so that only the target-sized
/// complex is ever dualized.
pub fn pushforward_constant<R: Ring>(ring: &R, phi: &CellularMap) -> Result<InjComplex<R>> {
    let push = derived_pushforward(phi, &dualizing_complex(ring, phi.source()))?;
    Ok(push.dual().minimize())
}

/// `φ^! = D φ^* D`.
pub fn upper_shriek<R: Ring>(phi: &CellularMap, g: &InjComplex<R>) -> Result<InjComplex<R>> {
    Ok(pullback(phi, &g.dual())?.dual())
}

/// `j_! j^* F` for an open set, as an injective complex on the whole space.
pub fn extend_by_zero<R: Ring>(u: &OpenSet, f: &InjComplex<R>) -> InjComplex<R> {
    f.to_rep().extend_by_zero(u.cells()).injective_model()
}

/// `i_* i^* F` for the closed complement of an open set.
pub fn restrict_to_closed<R: Ring>(u: &OpenSet, f: &InjComplex<R>) -> InjComplex<R> {
    let z = u.complement_closed(f.space());
    f.to_rep().extend_by_zero(&z).injective_model()
}

/// `i_*` of a complex on a closed subcomplex (`cells[i]` is the image of
/// cell `i` of the subcomplex).
pub fn closed_pushforward<R: Ring>(
    target: &Arc<CellComplex>,
    cells: &[usize],
    f: &InjComplex<R>,
) -> InjComplex<R> {
    f.relabel(target.clone(), cells)
}

/// Graded dims of `S^!_n(X) = Hom(1, ω[-n])`, indexed by `n`.
pub fn borel_moore_dims<R: Ring>(ring: &R, x: &Arc<CellComplex>) -> BTreeMap<i32, usize> {
    let w = dualizing_complex(ring, x);
    w.global_sections()
        .betti()
        .into_iter()
        .map(|(k, v)| (-k, v))
        .collect()
}

/// A Borel-Moore class as a chain map `1 → ω[-n]` together with the
/// cellular `n`-cycle it determines.
#[derive(Clone, Debug)]
pub struct BmClass<R: Ring> {
    pub degree: i32,
    pub map: ChainMap<R>,
    pub cycle: SparseVec<R::Elem>,
}

/// Unit class of `H^0 Γ(I1)`: the sum of the degree-0 cohomology basis.
fn unit_cycle<R: Ring>(one: &InjComplex<R>) -> SparseVec<R::Elem> {
    let red = reduce(&one.as_free(), false, true);
    let iota = red.iota.expect("tracked");
    let r = one.ring();
    let mut acc: SparseVec<R::Elem> = Vec::new();
    for (i, &o) in red.kept.iter().enumerate() {
        if one.degree(o) == 0 {
            acc = crate::linalg::sparse::axpy(r, &acc, &r.one(), &iota[i]);
        }
    }
    acc
}

/// The context needed to move between chain maps `1 → ω[-n]` and cellular
/// cycles on one space.
#[derive(Clone, Debug)]
pub struct BmContext<R: Ring> {
    pub space: Arc<CellComplex>,
    pub one: InjComplex<R>,
    pub omega: InjComplex<R>,
    unit: SparseVec<R::Elem>,
}

impl<R: Ring> BmContext<R> {
    pub fn new(ring: &R, x: &Arc<CellComplex>) -> Self {
        let omega = dualizing_complex(ring, x);
        let one = omega.to_rep().dual().minimize();
        let unit = unit_cycle(&one);
        BmContext {
            space: x.clone(),
            one,
            omega,
            unit,
        }
    }

    pub fn ring(&self) -> &R {
        self.one.ring()
    }

    /// Cellular chain `f(1)` (generators of `ω` are the cells).
    pub fn cycle_of(&self, f: &ChainMap<R>) -> SparseVec<R::Elem> {
        f.apply(&self.unit)
    }

    /// A basis of `S^!_n(X)` as chain maps (fields only).
    pub fn basis(&self, n: i32) -> Result<Vec<BmClass<R>>> {
        let h = hom_complex_in(&self.one, &self.omega, Some((-n - 1, -n + 1)));
        let maps = h.cohomology_maps(-n)?;
        Ok(maps
            .into_iter()
            .map(|m| {
                let cycle = self.cycle_of(&m);
                BmClass {
                    degree: n,
                    map: m,
                    cycle,
                }
            })
            .collect())
    }

    /// Coordinates of a cellular `n`-cycle in the homology basis given by
    /// `basis` (fields only); `None` if it is not a combination.
    pub fn coordinates(
        &self,
        n: i32,
        basis: &[BmClass<R>],
        z: &SparseVec<R::Elem>,
    ) -> Result<Option<Vec<R::Elem>>> {
        let r = self.ring();
        // solve z - Σ a_i c_i ∈ im ∂ with ∂ the boundary into n-chains
        let cells_n: Vec<usize> = (0..self.space.len())
            .filter(|&c| self.space.dim(c) as i32 == n)
            .collect();
        let cells_n1: Vec<usize> = (0..self.space.len())
            .filter(|&c| self.space.dim(c) as i32 == n + 1)
            .collect();
        let mut pos = vec![usize::MAX; self.space.len()];
        for (i, &c) in cells_n.iter().enumerate() {
            pos[c] = i;
        }
        let mut cols: Vec<Vec<R::Elem>> = Vec::new();
        for b in basis {
            let mut v = vec![r.zero(); cells_n.len()];
            for (c, x) in &b.cycle {
                v[pos[*c]] = x.clone();
            }
            cols.push(v);
        }
        for &t in &cells_n1 {
            let mut v = vec![r.zero(); cells_n.len()];
            for &(s, sg) in self.space.facets(t) {
                v[pos[s]] = r.from_i64(sg as i64);
            }
            cols.push(v);
        }
        let mut rhs = vec![r.zero(); cells_n.len()];
        for (c, x) in z {
            if pos[*c] == usize::MAX {
                return Err(Error::InvalidMap(format!(
                    "cell {c} is not of dimension {n}"
                )));
            }
            rhs[pos[*c]] = x.clone();
        }
        let m = Matrix::from_columns(r, cells_n.len(), &cols);
        Ok(m.solve(&rhs)?.map(|sol| sol[..basis.len()].to_vec()))
    }

    /// The class of a cellular `n`-cycle, as a chain map.
    pub fn class_of_cycle(&self, n: i32, z: &SparseVec<R::Elem>) -> Result<BmClass<R>> {
        let basis = self.basis(n)?;
        let a = self
            .coordinates(n, &basis, z)?
            .ok_or_else(|| Error::InvalidMap("chain is not a cycle".into()))?;
        let mut map = ChainMap::zero(&self.one, &self.omega.shift(-n));
        for (b, c) in basis.iter().zip(&a) {
            map = map.axpy(c, &b.map)?;
        }
        Ok(BmClass {
            degree: n,
            map,
            cycle: z.clone(),
        })
    }
}

/// Cellular pushforward of chains: a cell goes to its image with the
/// orientation sign, or to zero when the dimension drops.
pub fn push_chain<R: Ring>(
    phi: &CellularMap,
    z: &SparseVec<R::Elem>,
    ring: &R,
) -> SparseVec<R::Elem> {
    collect_sparse(
        ring,
        z.iter().filter_map(|(c, x)| {
            let s = phi.degree_sign(*c);
            (s != 0).then(|| (phi.apply(*c), ring.mul(x, &ring.from_i64(s))))
        }),
    )
}

/// `φ_*` on Borel-Moore classes.
pub fn push_class<R: Ring>(
    phi: &CellularMap,
    target: &BmContext<R>,
    c: &BmClass<R>,
) -> Result<BmClass<R>> {
    let z = push_chain(phi, &c.cycle, target.ring());
    target.class_of_cycle(c.degree, &z)
}

/// An orientation: a map `1 → ω[-n]` which is an isomorphism on `U`.
#[derive(Clone, Debug)]
pub struct Orientation<R: Ring> {
    pub class: BmClass<R>,
    pub open: OpenSet,
}

impl<R: Ring> Orientation<R> {
    /// Re-checks that the cone is acyclic on the open set.
    pub fn certify(&self) -> bool {
        self.class.map.validate().is_ok() && self.class.map.is_quasi_iso_on(self.open.cells())
    }
}

/// The stalk map of `f: 1 → ω[-n]` at `ρ` as an element of `Λ`, if both
/// stalks are `Λ` in degree 0; otherwise `None`.
fn stalk_functional<R: Ring>(f: &ChainMap<R>, rho: usize) -> Option<R::Elem> {
    let r = f.ring();
    let (s, t) = (&f.source, &f.target);
    let ks = s.star_generators(rho);
    let kt = t.star_generators(rho);
    let es = s.restrict_generators(&ks);
    let et = t.restrict_generators(&kt);
    let rs = reduce(&es, false, true);
    let rt = reduce(&et, false, true);
    let deg0 = |red: &crate::linalg::Reduction<R>, fc: &FreeComplex<R>| -> Vec<usize> {
        red.kept
            .iter()
            .enumerate()
            .filter(|(_, &o)| fc.degrees[o] == 0)
            .map(|(i, _)| i)
            .collect()
    };
    let (a, b) = (deg0(&rs, &es), deg0(&rt, &et));
    if rs.kept.len() != 1 || rt.kept.len() != 1 || a.len() != 1 || b.len() != 1 {
        return None;
    }
    let z = &rs.iota.as_ref().unwrap()[0];
    let img_local = f.restrict_to_labels(&ks, &kt);
    let mut w: SparseVec<R::Elem> = Vec::new();
    for (g, c) in z {
        w = crate::linalg::sparse::axpy(r, &w, c, &img_local[*g]);
    }
    let pi = &rt.pi.as_ref().unwrap()[0];
    let mut acc = r.zero();
    for (o, c) in pi {
        if let Ok(k) = w.binary_search_by_key(o, |e| e.0) {
            r.add_assign(&mut acc, &r.mul(c, &w[k].1));
        }
    }
    Some(acc)
}

/// Exhaustive search for an orientation over a field: the stalk maps at the
/// cells of `U` are linear functionals on `S^!_n(X)`; an orientation is a
/// vector outside all their kernels.
pub fn orientation_search<R: Ring>(
    ring: &R,
    x: &Arc<CellComplex>,
    u: &OpenSet,
    n: i32,
) -> Result<Option<Orientation<R>>> {
    let ctx = BmContext::new(ring, x);
    orientation_search_in(&ctx, u, n)
}

pub fn orientation_search_in<R: Ring>(
    ctx: &BmContext<R>,
    u: &OpenSet,
    n: i32,
) -> Result<Option<Orientation<R>>> {
    let r = ctx.ring();
    if !r.is_field() {
        return Err(Error::NotAField(r.spec().to_string()));
    }
    let basis = ctx.basis(n)?;
    if basis.is_empty() {
        return Ok(None);
    }
    let m = basis.len();
    let mut functionals: Vec<Vec<R::Elem>> = Vec::new();
    for &rho in u.cells() {
        let mut l = Vec::with_capacity(m);
        for b in &basis {
            match stalk_functional(&b.map, rho) {
                Some(v) => l.push(v),
                None => return Ok(None),
            }
        }
        if l.iter().all(|v| r.is_zero(v)) {
            return Ok(None);
        }
        if !functionals.contains(&l) {
            functionals.push(l);
        }
    }
    let good = |a: &[R::Elem]| {
        functionals.iter().all(|l| {
            let mut s = r.zero();
            for (x, y) in l.iter().zip(a) {
                r.add_assign(&mut s, &r.mul(x, y));
            }
            !r.is_zero(&s)
        })
    };
    let make = |a: Vec<R::Elem>| -> Result<Orientation<R>> {
        let mut map = ChainMap::zero(&ctx.one, &ctx.omega.shift(-n));
        let mut cycle: SparseVec<R::Elem> = Vec::new();
        for (b, c) in basis.iter().zip(&a) {
            map = map.axpy(c, &b.map)?;
            cycle = crate::linalg::sparse::axpy(r, &cycle, c, &b.cycle);
        }
        Ok(Orientation {
            class: BmClass {
                degree: n,
                map,
                cycle,
            },
            open: u.clone(),
        })
    };
    // moment curve (1, t, t^2, …): at most (m-1)·#functionals bad values of t
    let bound = (m as i64 - 1).max(0) * functionals.len() as i64 + 1;
    let p = r.spec().residue_characteristic() as i64;
    let tries = if p == 0 { bound } else { bound.min(p) };
    for t in 0..tries {
        let tt = r.from_i64(t);
        let a: Vec<R::Elem> = (0..m).map(|i| r.pow(&tt, i as u64)).collect();
        if good(&a) {
            return Ok(Some(make(a)?));
        }
    }
    if p != 0 && (p as f64).powi(m as i32) <= 1e6 {
        let total = (p as u64).pow(m as u32);
        for code in 1..total {
            let mut c = code;
            let a: Vec<R::Elem> = (0..m)
                .map(|_| {
                    let v = r.from_i64((c % p as u64) as i64);
                    c /= p as u64;
                    v
                })
                .collect();
            if good(&a) {
                return Ok(Some(make(a)?));
            }
        }
        return Ok(None);
    }
    if p == 0 {
        return Ok(None);
    }
    Err(Error::Precondition(
        "orientation search space too large to enumerate".into(),
    ))
}

/// One row of a convolution dimension table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvolutionRow {
    pub n: i32,
    pub hom_dim: usize,
    pub bm_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvolutionReport {
    pub real_dim: i32,
    pub rows: Vec<ConvolutionRow>,
    pub holds: bool,
}

/// Compares `dim Hom(f_! 1, g_* 1[n])` with `dim S^!_{2d-n}(W)` where `W` is
/// a supplied model of the fibre product.
pub fn convolution_dimension_check<R: Ring>(
    ring: &R,
    f: &CellularMap,
    g: &CellularMap,
    w: &Arc<CellComplex>,
    real_dim: i32,
    range: (i32, i32),
) -> Result<ConvolutionReport> {
    if !Arc::ptr_eq(f.target(), g.target()) && f.target().len() != g.target().len() {
        return Err(Error::InvalidMap("maps have different targets".into()));
    }
    let a = pushforward_constant(ring, f)?;
    let b = pushforward_constant(ring, g)?;
    let h = hom_complex(&a, &b).cohomology();
    let bm = borel_moore_dims(ring, w);
    let rows: Vec<ConvolutionRow> = (range.0..=range.1)
        .map(|n| ConvolutionRow {
            n,
            hom_dim: h.dim(n),
            bm_dim: bm.get(&(real_dim - n)).copied().unwrap_or(0),
        })
        .collect();
    let holds = rows.iter().all(|r| r.hom_dim == r.bm_dim);
    Ok(ConvolutionReport {
        real_dim,
        rows,
        holds,
    })
}

/// Proper base change spot check: stalk of `Rφ_* F` at `τ` against derived
/// sections of `F` over the preimage of the open star of `τ`.
pub fn base_change_holds<R: Ring>(
    phi: &CellularMap,
    f: &InjComplex<R>,
    tau: usize,
) -> Result<bool> {
    let push = derived_pushforward(phi, f)?;
    let star = phi.target().poset().open_star(tau);
    let pre = phi.preimage(&star);
    let a = push.stalk(tau);
    let b = GradedDims::from_structure(&f.sections(&pre).cohomology());
    Ok(a == b)
}
