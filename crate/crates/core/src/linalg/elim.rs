//! Gaussian elimination of contractible pairs in complexes of free modules.
//!
//! A pair `g -> h` whose differential coefficient is a unit spans an
//! acyclic subcomplex; removing it and correcting the remaining
//! differential gives a homotopy equivalent complex. With labels, only
//! pairs carrying equal labels are removed, which is the minimization of
//! complexes of indecomposable injectives or projectives.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use crate::linalg::sparse::{axpy, SparseVec};
use crate::linalg::{subquotient_structure, Matrix};
use crate::ring::Ring;

/// A complex of free modules on generators with degrees and labels; `d[g]`
/// lists the coefficients of `d(g)` on generators of degree `deg g + 1`.
#[derive(Clone, Debug)]
pub struct FreeComplex<R: Ring> {
    pub ring: R,
    pub degrees: Vec<i32>,
    pub labels: Vec<usize>,
    pub d: Vec<SparseVec<R::Elem>>,
}

/// Output of [`reduce`]: surviving generators (as original indices), the new
/// differential in new indices, and optionally the comparison maps.
#[derive(Clone, Debug)]
pub struct Reduction<R: Ring> {
    pub kept: Vec<usize>,
    pub d: Vec<SparseVec<R::Elem>>,
    /// `iota[i]`: image of kept generator `i` in original coordinates.
    pub iota: Option<Vec<SparseVec<R::Elem>>>,
    /// `pi[i]`: the coefficient of kept generator `i` in `pi(o)`, as a
    /// sparse row over original generators `o`.
    pub pi: Option<Vec<SparseVec<R::Elem>>>,
}

impl<R: Ring> FreeComplex<R> {
    pub fn new(
        ring: &R,
        degrees: Vec<i32>,
        labels: Vec<usize>,
        d: Vec<SparseVec<R::Elem>>,
    ) -> Self {
        FreeComplex {
            ring: ring.clone(),
            degrees,
            labels,
            d,
        }
    }

    /// Unlabelled complex.
    pub fn plain(ring: &R, degrees: Vec<i32>, d: Vec<SparseVec<R::Elem>>) -> Self {
        let n = degrees.len();
        Self::new(ring, degrees, vec![0; n], d)
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// `d∘d = 0` and degree compatibility.
    pub fn check(&self) -> bool {
        let r = &self.ring;
        for g in 0..self.len() {
            let mut acc: SparseVec<R::Elem> = Vec::new();
            for (h, c) in &self.d[g] {
                if self.degrees[*h] != self.degrees[g] + 1 {
                    return false;
                }
                acc = axpy(r, &acc, c, &self.d[*h]);
            }
            if !acc.is_empty() {
                return false;
            }
        }
        true
    }

    /// Cohomology as cyclic summand exponents per degree (over a field each
    /// summand has exponent 1, so the list length is the dimension).
    pub fn cohomology(&self) -> BTreeMap<i32, Vec<u32>> {
        let red = reduce(self, false, false);
        residual_cohomology(&self.ring, &red, &self.degrees)
    }

    /// Cohomology dimensions over a field (number of cyclic summands otherwise).
    pub fn betti(&self) -> BTreeMap<i32, usize> {
        self.cohomology()
            .into_iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| (k, v.len()))
            .collect()
    }
}

/// Cohomology of a reduced complex, by dense Smith forms on what is left.
pub fn residual_cohomology<R: Ring>(
    ring: &R,
    red: &Reduction<R>,
    degrees: &[i32],
) -> BTreeMap<i32, Vec<u32>> {
    let mut by_deg: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &o) in red.kept.iter().enumerate() {
        by_deg.entry(degrees[o]).or_default().push(i);
    }
    let mut pos = vec![0usize; red.kept.len()];
    for gens in by_deg.values() {
        for (j, &i) in gens.iter().enumerate() {
            pos[i] = j;
        }
    }
    let block = |from: i32| -> Matrix<R> {
        let src = by_deg.get(&from).cloned().unwrap_or_default();
        let tgt_len = by_deg.get(&(from + 1)).map_or(0, Vec::len);
        let mut m = Matrix::zeros(ring, tgt_len, src.len());
        for (j, &i) in src.iter().enumerate() {
            for (h, c) in &red.d[i] {
                m.set(pos[*h], j, c.clone());
            }
        }
        m
    };
    let mut out = BTreeMap::new();
    for (&n, gens) in &by_deg {
        let s = if ring.is_field() {
            vec![1; gens.len()]
        } else {
            subquotient_structure(ring, gens.len(), &block(n - 1), &block(n))
        };
        if !s.is_empty() {
            out.insert(n, s);
        }
    }
    out
}

/// Removes contractible pairs until none is left (only pairs with equal
/// labels when `by_label`). Pivots are chosen by a Markowitz cost.
pub fn reduce<R: Ring>(fc: &FreeComplex<R>, by_label: bool, track: bool) -> Reduction<R> {
    let ring = &fc.ring;
    let n = fc.len();
    let mut out: Vec<BTreeMap<usize, R::Elem>> =
        fc.d.iter().map(|v| v.iter().cloned().collect()).collect();
    let mut inn: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (g, v) in fc.d.iter().enumerate() {
        for (h, _) in v {
            inn[*h].insert(g);
        }
    }
    let mut alive = vec![true; n];
    let mut iota: Option<Vec<SparseVec<R::Elem>>> =
        track.then(|| (0..n).map(|i| vec![(i, ring.one())]).collect());
    let mut pi: Option<Vec<SparseVec<R::Elem>>> =
        track.then(|| (0..n).map(|i| vec![(i, ring.one())]).collect());

    let eligible = |g: usize, h: usize, c: &R::Elem| -> bool {
        ring.is_unit(c) && (!by_label || fc.labels[g] == fc.labels[h])
    };
    let cost = |out: &Vec<BTreeMap<usize, R::Elem>>,
                inn: &Vec<BTreeSet<usize>>,
                g: usize,
                h: usize|
     -> usize { (inn[h].len() - 1) * (out[g].len() - 1) };
    let mut heap: BinaryHeap<Reverse<(usize, usize, usize)>> = BinaryHeap::new();
    for g in 0..n {
        for (&h, c) in &out[g] {
            if eligible(g, h, c) {
                heap.push(Reverse((cost(&out, &inn, g, h), g, h)));
            }
        }
    }
    while let Some(Reverse((k, g, h))) = heap.pop() {
        if !alive[g] || !alive[h] {
            continue;
        }
        let Some(c) = out[g].get(&h).cloned() else {
            continue;
        };
        if !eligible(g, h, &c) {
            continue;
        }
        let now = cost(&out, &inn, g, h);
        if now != k {
            heap.push(Reverse((now, g, h)));
            continue;
        }
        let cinv = ring.inv(&c).expect("unit");
        let dg: Vec<(usize, R::Elem)> = out[g]
            .iter()
            .filter(|e| *e.0 != h)
            .map(|(a, b)| (*a, b.clone()))
            .collect();
        // correct every other source of h
        let sources: Vec<usize> = inn[h].iter().copied().filter(|&x| x != g).collect();
        for x in sources {
            let a = out[x].remove(&h).expect("in/out adjacency agree");
            let f = ring.neg(&ring.mul(&a, &cinv));
            for (t, gt) in &dg {
                let delta = ring.mul(&f, gt);
                let entry = out[x].entry(*t).or_insert_with(|| ring.zero());
                ring.add_assign(entry, &delta);
                if ring.is_zero(entry) {
                    out[x].remove(t);
                    inn[*t].remove(&x);
                } else {
                    inn[*t].insert(x);
                }
            }
            if let Some(io) = iota.as_mut() {
                let cg = io[g].clone();
                io[x] = axpy(ring, &io[x], &f, &cg);
            }
            for (&t, ct) in &out[x] {
                if eligible(x, t, ct) {
                    heap.push(Reverse((cost(&out, &inn, x, t), x, t)));
                }
            }
        }
        if let Some(p) = pi.as_mut() {
            let rh = p[h].clone();
            for (t, gt) in &dg {
                let f = ring.neg(&ring.mul(gt, &cinv));
                p[*t] = axpy(ring, &p[*t], &f, &rh);
            }
        }
        // detach g and h
        for y in std::mem::take(&mut inn[g]) {
            out[y].remove(&g);
        }
        for (t, _) in std::mem::take(&mut out[g]) {
            inn[t].remove(&g);
        }
        for y in std::mem::take(&mut inn[h]) {
            out[y].remove(&h);
        }
        for (t, _) in std::mem::take(&mut out[h]) {
            inn[t].remove(&h);
        }
        alive[g] = false;
        alive[h] = false;
    }
    let kept: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    let mut new_index = vec![usize::MAX; n];
    for (i, &o) in kept.iter().enumerate() {
        new_index[o] = i;
    }
    let d = kept
        .iter()
        .map(|&o| {
            out[o]
                .iter()
                .map(|(h, c)| (new_index[*h], c.clone()))
                .collect()
        })
        .collect();
    let iota = iota.map(|io| kept.iter().map(|&o| io[o].clone()).collect());
    let pi = pi.map(|p| kept.iter().map(|&o| p[o].clone()).collect());
    Reduction { kept, d, iota, pi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{ModRing, Rationals};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn apply_rows<R: Ring>(
        ring: &R,
        rows: &[SparseVec<R::Elem>],
        v: &SparseVec<R::Elem>,
    ) -> Vec<R::Elem> {
        rows.iter()
            .map(|row| {
                let mut acc = ring.zero();
                let (mut i, mut j) = (0, 0);
                while i < row.len() && j < v.len() {
                    if row[i].0 < v[j].0 {
                        i += 1;
                    } else if v[j].0 < row[i].0 {
                        j += 1;
                    } else {
                        ring.add_mul(&mut acc, &row[i].1, &v[j].1);
                        i += 1;
                        j += 1;
                    }
                }
                acc
            })
            .collect()
    }

    /// Random complex d = composite-free construction: C^0 -> C^1 -> C^2
    /// with d1 d0 = 0 enforced by d0 = K x for a kernel basis K of d1.
    fn random_complex(ring: &ModRing, rng: &mut ChaCha8Rng) -> FreeComplex<ModRing> {
        let (a, b, c) = (4, 7, 5);
        let d1 = Matrix::from_fn(ring, c, b, |_, _| {
            if rng.gen_bool(0.4) {
                rng.gen_range(0..ring.modulus())
            } else {
                0
            }
        });
        let ker = d1.kernel();
        let d0 = Matrix::from_fn(ring, b, a, |i, j| {
            let mut acc = 0;
            for (t, kv) in ker.iter().enumerate() {
                if (t + j) % 2 == 0 {
                    acc = ring.add(&acc, &kv[i]);
                }
            }
            acc
        });
        let mut degrees = vec![0; a];
        degrees.extend(vec![1; b]);
        degrees.extend(vec![2; c]);
        let mut d = Vec::new();
        for j in 0..a {
            d.push(
                (0..b)
                    .filter(|&i| d0.get(i, j) != &0)
                    .map(|i| (a + i, *d0.get(i, j)))
                    .collect(),
            );
        }
        for j in 0..b {
            d.push(
                (0..c)
                    .filter(|&i| d1.get(i, j) != &0)
                    .map(|i| (a + b + i, *d1.get(i, j)))
                    .collect(),
            );
        }
        for _ in 0..c {
            d.push(Vec::new());
        }
        FreeComplex::plain(ring, degrees, d)
    }

    #[test]
    fn cohomology_of_a_circle() {
        let q = Rationals;
        // cochains of a 3-cycle: vertices 0,1,2 and edges 3,4,5
        let one = q.one();
        let m = q.neg(&one);
        let d = vec![
            vec![(3, m.clone()), (5, m.clone())],
            vec![(3, one.clone()), (4, m.clone())],
            vec![(4, one.clone()), (5, one.clone())],
            vec![],
            vec![],
            vec![],
        ];
        let fc = FreeComplex::plain(&q, vec![0, 0, 0, 1, 1, 1], d);
        assert!(fc.check());
        let b = fc.betti();
        assert_eq!(b.get(&0), Some(&1));
        assert_eq!(b.get(&1), Some(&1));
    }

    #[test]
    fn reduction_matches_ranks_and_maps_are_inverse_on_cohomology() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f3 = ModRing::prime_field(3).unwrap();
        for _ in 0..10 {
            let fc = random_complex(&f3, &mut rng);
            assert!(fc.check());
            let red = reduce(&fc, false, true);
            // over a field the residual differential vanishes
            assert!(red.d.iter().all(Vec::is_empty));
            // pi∘iota = id
            let iota = red.iota.as_ref().unwrap();
            let pi = red.pi.as_ref().unwrap();
            for (i, col) in iota.iter().enumerate() {
                let img = apply_rows(&f3, pi, col);
                for (j, x) in img.iter().enumerate() {
                    assert_eq!(*x, u64::from(i == j));
                }
            }
            // iota lands in cocycles
            for col in iota {
                let mut acc: SparseVec<u64> = Vec::new();
                for (g, c) in col {
                    acc = axpy(&f3, &acc, c, &fc.d[*g]);
                }
                assert!(acc.is_empty());
            }
        }
    }

    #[test]
    fn local_ring_cohomology_keeps_torsion() {
        let z4 = ModRing::new(2, 2).unwrap();
        // Z/4 --2--> Z/4
        let fc = FreeComplex::plain(&z4, vec![0, 1], vec![vec![(1, 2)], vec![]]);
        let h = fc.cohomology();
        assert_eq!(h.get(&0), Some(&vec![1]));
        assert_eq!(h.get(&1), Some(&vec![1]));
    }
}
