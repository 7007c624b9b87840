use rand::Rng;

use crate::error::{Error, Result};
use crate::ksengine::SplitField;
use crate::linalg::poly::minimal_polynomial;
use crate::linalg::{Matrix, Poly};
use crate::ring::Ring;

/// A finite-dimensional unital associative algebra over a field, given by
/// structure constants: `table[i][j]` holds the coordinates of `b_i b_j`.
#[derive(Clone, Debug)]
pub struct Algebra<K: Ring> {
    ring: K,
    table: Vec<Vec<Vec<K::Elem>>>,
    one: Vec<K::Elem>,
}

/// `A/I` with a complement section.
#[derive(Clone, Debug)]
pub struct Quotient<K: Ring> {
    pub algebra: Algebra<K>,
    /// `section[i]`: coordinates in `A` of a preimage of the `i`-th basis vector.
    pub section: Vec<Vec<K::Elem>>,
    /// Rows map `A`-coordinates to quotient coordinates.
    pub projection: Matrix<K>,
}

/// Outcome of the search for a nontrivial idempotent in a semisimple algebra.
#[derive(Clone, Debug)]
pub enum SplitSearch<K: Ring> {
    Split(Vec<K::Elem>),
    /// A field: commutative with a primitive element of full degree.
    Division { degree: usize },
    Undecided,
}

impl<K: SplitField> Algebra<K> {
    pub fn new(ring: &K, table: Vec<Vec<Vec<K::Elem>>>, one: Vec<K::Elem>) -> Result<Self> {
        let n = one.len();
        if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|v| v.len() != n)) {
            return Err(Error::ShapeMismatch("structure constants".into()));
        }
        let a = Algebra { ring: ring.clone(), table, one };
        for i in 0..n {
            let b = a.basis_vec(i);
            if a.mul(&a.one, &b) != b || a.mul(&b, &a.one) != b {
                return Err(Error::InvalidRep("the given unit is not an identity".into()));
            }
        }
        Ok(a)
    }

    pub fn ring(&self) -> &K {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.one.len()
    }

    pub fn one(&self) -> &[K::Elem] {
        &self.one
    }

    pub fn basis_vec(&self, i: usize) -> Vec<K::Elem> {
        let r = &self.ring;
        (0..self.dim()).map(|j| if i == j { r.one() } else { r.zero() }).collect()
    }

    pub fn zero_vec(&self) -> Vec<K::Elem> {
        vec![self.ring.zero(); self.dim()]
    }

    pub fn mul(&self, a: &[K::Elem], b: &[K::Elem]) -> Vec<K::Elem> {
        let r = &self.ring;
        let mut out = self.zero_vec();
        for (i, x) in a.iter().enumerate() {
            if r.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if r.is_zero(y) {
                    continue;
                }
                let c = r.mul(x, y);
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    r.add_mul(o, &c, t);
                }
            }
        }
        out
    }

    pub fn add(&self, a: &[K::Elem], b: &[K::Elem]) -> Vec<K::Elem> {
        a.iter().zip(b).map(|(x, y)| self.ring.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[K::Elem], b: &[K::Elem]) -> Vec<K::Elem> {
        a.iter().zip(b).map(|(x, y)| self.ring.sub(x, y)).collect()
    }

    pub fn scale(&self, a: &[K::Elem], c: &K::Elem) -> Vec<K::Elem> {
        a.iter().map(|x| self.ring.mul(x, c)).collect()
    }

    pub fn is_zero(&self, a: &[K::Elem]) -> bool {
        a.iter().all(|x| self.ring.is_zero(x))
    }

    /// Matrix of `x ↦ a x`.
    pub fn left_matrix(&self, a: &[K::Elem]) -> Matrix<K> {
        let cols: Vec<Vec<K::Elem>> = (0..self.dim()).map(|j| self.mul(a, &self.basis_vec(j))).collect();
        Matrix::from_columns(&self.ring, self.dim(), &cols)
    }

    pub fn trace(&self, a: &[K::Elem]) -> K::Elem {
        self.left_matrix(a).trace()
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| self.table[i][j] == self.table[j][i]))
    }

    pub fn is_associative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    let (a, b, c) = (self.basis_vec(i), self.basis_vec(j), self.basis_vec(k));
                    self.mul(&self.mul(&a, &b), &c) == self.mul(&a, &self.mul(&b, &c))
                })
            })
        })
    }

    pub fn is_idempotent(&self, e: &[K::Elem]) -> bool {
        self.mul(e, e) == e
    }

    /// Minimal polynomial of an element (that of left multiplication).
    pub fn min_poly(&self, a: &[K::Elem]) -> Result<Poly<K>> {
        minimal_polynomial(&self.left_matrix(a))
    }

    pub fn eval_poly(&self, f: &Poly<K>, a: &[K::Elem]) -> Vec<K::Elem> {
        f.eval_with(
            &a.to_vec(),
            self.one.clone(),
            |x, y| self.add(x, y),
            |x, y| self.mul(x, y),
            |x, c| self.scale(x, c),
        )
    }

    /// Basis of the span of the given vectors (row echelon over `K`).
    pub fn span(&self, vs: &[Vec<K::Elem>]) -> Vec<Vec<K::Elem>> {
        independent_subset(&self.ring, self.dim(), vs).into_iter().map(|i| vs[i].clone()).collect()
    }

    /// Whether the span of `basis` is a nilpotent two-sided ideal.
    pub fn is_nilpotent_ideal(&self, basis: &[Vec<K::Elem>]) -> bool {
        let n = self.dim();
        let b: Vec<Vec<K::Elem>> = (0..n).map(|i| self.basis_vec(i)).collect();
        let ideal = basis.iter().all(|x| {
            b.iter().all(|y| {
                let l = self.mul(y, x);
                let r = self.mul(x, y);
                self.span(&[basis.to_vec(), vec![l, r]].concat()).len() == self.span(basis).len()
            })
        });
        if !ideal {
            return false;
        }
        let mut pow = self.span(basis);
        for _ in 0..=n {
            if pow.is_empty() {
                return true;
            }
            let prods: Vec<Vec<K::Elem>> = pow.iter().flat_map(|x| basis.iter().map(move |y| (x, y))).map(|(x, y)| self.mul(x, y)).collect();
            pow = self.span(&prods);
        }
        pow.is_empty()
    }

    /// Jacobson radical: trace-form kernel in characteristic 0, iterated
    /// lifted-trace kernels in characteristic `p`.
    pub fn radical(&self) -> Result<Vec<Vec<K::Elem>>> {
        let n = self.dim();
        let r = &self.ring;
        let p = r.characteristic();
        let b: Vec<Vec<K::Elem>> = (0..n).map(|i| self.basis_vec(i)).collect();
        let mut ideal = b.clone();
        let rounds = if p == 0 {
            1
        } else {
            let mut l = 0u32;
            while (p as u128).pow(l + 1) <= n as u128 {
                l += 1;
            }
            l + 1
        };
        for i in 0..rounds {
            if ideal.is_empty() {
                break;
            }
            // constraint rows: b_j, columns: current ideal basis
            let rows: Vec<Vec<K::Elem>> = b
                .iter()
                .map(|bj| {
                    ideal
                        .iter()
                        .map(|a| {
                            let ab = self.mul(a, bj);
                            if i == 0 {
                                self.trace(&ab)
                            } else {
                                r.trace_lift(&self.left_matrix(&ab), i)
                            }
                        })
                        .collect()
                })
                .collect();
            let m = Matrix::from_fn(r, n, ideal.len(), |x, y| rows[x][y].clone());
            ideal = m
                .kernel()
                .into_iter()
                .map(|c| {
                    let mut v = self.zero_vec();
                    for (a, x) in ideal.iter().zip(&c) {
                        v = self.add(&v, &self.scale(a, x));
                    }
                    v
                })
                .collect();
        }
        if !self.is_nilpotent_ideal(&ideal) {
            return Err(crate::ksengine::internal("radical candidate is not a nilpotent ideal"));
        }
        Ok(ideal)
    }

    /// Quotient by a two-sided ideal spanned by `ideal`.
    pub fn quotient(&self, ideal: &[Vec<K::Elem>]) -> Result<Quotient<K>> {
        let n = self.dim();
        let r = &self.ring;
        let ideal = self.span(ideal);
        let mut chosen = ideal.clone();
        let mut comp = Vec::new();
        for i in 0..n {
            let e = self.basis_vec(i);
            let mut trial = chosen.clone();
            trial.push(e.clone());
            if self.span(&trial).len() == trial.len() {
                chosen = trial;
                comp.push(e);
            }
        }
        let s = comp.len();
        let cols: Vec<Vec<K::Elem>> = comp.iter().chain(ideal.iter()).cloned().collect();
        let pm = Matrix::from_columns(r, n, &cols);
        let pinv = pm.inverse().ok_or_else(|| crate::ksengine::internal("complement is not a basis"))?;
        let projection = pinv.submatrix(&(0..s).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>());
        let coords = |v: &[K::Elem]| -> Vec<K::Elem> { projection.mul_vec(v).expect("shape") };
        let table: Vec<Vec<Vec<K::Elem>>> =
            (0..s).map(|i| (0..s).map(|j| coords(&self.mul(&comp[i], &comp[j]))).collect()).collect();
        let one = coords(&self.one);
        Ok(Quotient { algebra: Algebra::new(r, table, one)?, section: comp, projection })
    }

    /// The corner algebra `eAe` with its embedding (columns in `A`-coordinates).
    pub fn corner(&self, e: &[K::Elem]) -> Result<(Algebra<K>, Vec<Vec<K::Elem>>)> {
        let n = self.dim();
        let gens: Vec<Vec<K::Elem>> = (0..n).map(|i| self.mul(&self.mul(e, &self.basis_vec(i)), e)).collect();
        let basis = self.span(&gens);
        let m = Matrix::from_columns(&self.ring, n, &basis);
        let coords = |v: &[K::Elem]| -> Result<Vec<K::Elem>> {
            m.solve(v)?.ok_or_else(|| crate::ksengine::internal("corner is not closed"))
        };
        let mut table = Vec::new();
        for x in &basis {
            let mut row = Vec::new();
            for y in &basis {
                row.push(coords(&self.mul(x, y))?);
            }
            table.push(row);
        }
        let one = coords(e)?;
        Ok((Algebra::new(&self.ring, table, one)?, basis))
    }

    /// Looks for a nontrivial idempotent of a semisimple algebra by
    /// factoring minimal polynomials of basis elements and random
    /// combinations; certifies a field when it finds none.
    pub fn find_split<G: Rng + ?Sized>(&self, rng: &mut G, tries: usize) -> Result<SplitSearch<K>> {
        let n = self.dim();
        let r = &self.ring;
        if n == 0 {
            return Err(Error::InvalidRep("zero algebra".into()));
        }
        if n == 1 {
            return Ok(SplitSearch::Division { degree: 1 });
        }
        let commutative = self.is_commutative();
        for t in 0..tries {
            let x: Vec<K::Elem> = if t < n {
                self.basis_vec(t)
            } else {
                (0..n).map(|_| r.random(rng)).collect()
            };
            let m = self.min_poly(&x)?;
            let (factors, complete) = r.split_poly(&m, rng)?;
            if factors.len() >= 2 {
                let pw = |f: &Poly<K>, k: usize| (0..k).fold(Poly::one(r), |acc, _| acc.mul(f));
                let f = pw(&factors[0].0, factors[0].1);
                let g = factors[1..].iter().fold(Poly::one(r), |acc, (h, k)| acc.mul(&pw(h, *k)));
                let (_, _, t) = f.ext_gcd(&g);
                let u = self.eval_poly(&t.mul(&g).rem(&m), &x);
                if !self.is_idempotent(&u) || self.is_zero(&u) || u == self.one {
                    return Err(crate::ksengine::internal("CRT idempotent failed"));
                }
                return Ok(SplitSearch::Split(u));
            }
            if complete && commutative && factors.len() == 1 && factors[0].1 == 1 && factors[0].0.degree() == Some(n) {
                return Ok(SplitSearch::Division { degree: n });
            }
        }
        Ok(SplitSearch::Undecided)
    }
}

/// Indices of a maximal linearly independent subset (greedy, in order).
pub(crate) fn independent_subset<K: Ring>(ring: &K, len: usize, vs: &[Vec<K::Elem>]) -> Vec<usize> {
    // incremental echelon: pivots[c] = reduced row with leading entry 1 at c
    let mut rows: Vec<(usize, Vec<K::Elem>)> = Vec::new();
    let mut out = Vec::new();
    for (i, v) in vs.iter().enumerate() {
        let mut w = v.clone();
        for (c, row) in &rows {
            if !ring.is_zero(&w[*c]) {
                let f = w[*c].clone();
                for (x, y) in w.iter_mut().zip(row) {
                    *x = ring.sub(x, &ring.mul(&f, y));
                }
            }
        }
        if let Some(c) = (0..len).find(|&c| !ring.is_zero(&w[c])) {
            let inv = ring.inv(&w[c]).expect("field");
            for x in w.iter_mut() {
                *x = ring.mul(x, &inv);
            }
            // keep earlier rows reduced at the new pivot
            for (_, row) in rows.iter_mut() {
                if !ring.is_zero(&row[c]) {
                    let f = row[c].clone();
                    for (x, y) in row.iter_mut().zip(&w) {
                        *x = ring.sub(x, &ring.mul(&f, y));
                    }
                }
            }
            rows.push((c, w));
            out.push(i);
        }
    }
    out
}
