use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ksengine::{KsRing, SplitField};
use crate::linalg::elim::reduce;
use crate::linalg::poly::minimal_polynomial;
use crate::linalg::{FreeComplex, Matrix, Poly};
use crate::ring::Ring;
use crate::shcomplex::InjComplex;

/// Monodromy of a locally constant cohomology sheaf around a closed path
/// of cells `v0, e01, v1, e12, …` (vertices alternating with edges).
#[derive(Clone, Debug)]
pub struct Monodromy<R: Ring> {
    pub degree: i32,
    pub matrix: Matrix<R>,
    pub canonical: CanonicalForm<R>,
}

impl<R: Ring> Monodromy<R> {
    pub fn is_trivial(&self) -> bool {
        self.matrix.is_identity()
    }
}

/// A normal form for conjugacy: the rational canonical form over a field,
/// the lexicographically least conjugate over `Z/p^k` when the group is
/// small enough to search.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalForm<R: Ring> {
    pub matrix: Matrix<R>,
    /// Invariant factors, lowest first (fields only).
    pub invariant_factors: Vec<String>,
    pub method: CanonicalMethod,
    /// False when the factorization was not certified or the search was
    /// skipped; such forms only witness conjugacy when equal.
    pub certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CanonicalMethod {
    RationalCanonical,
    ExhaustiveSearch,
    Unreduced,
}

impl<R: Ring> CanonicalForm<R> {
    pub fn rows(&self) -> Vec<Vec<String>> {
        let r = self.matrix.ring();
        (0..self.matrix.rows())
            .map(|i| self.matrix.row(i).iter().map(|x| r.format(x)).collect())
            .collect()
    }
}

/// Searches at most this many candidate conjugators.
const SEARCH_LIMIT: u64 = 1 << 20;

struct Stalk<R: Ring> {
    generators: Vec<usize>,
    iota: Vec<Vec<(usize, R::Elem)>>,
    pi: Vec<Vec<(usize, R::Elem)>>,
}

fn stalk_basis<R: Ring>(f: &InjComplex<R>, cell: usize, degree: i32) -> Result<Stalk<R>> {
    let generators = f.star_generators(cell);
    let fc: FreeComplex<R> = f.restrict_generators(&generators);
    let red = reduce(&fc, false, true);
    if red.d.iter().any(|v| !v.is_empty()) {
        return Err(Error::NotLocalSystem(format!("stalk at cell {cell} is not free")));
    }
    let (iota, pi) = (red.iota.expect("tracked"), red.pi.expect("tracked"));
    let mut s = Stalk { generators, iota: Vec::new(), pi: Vec::new() };
    for (i, &o) in red.kept.iter().enumerate() {
        if fc.degrees[o] == degree {
            s.iota.push(iota[i].clone());
            s.pi.push(pi[i].clone());
        }
    }
    Ok(s)
}

/// The restriction `H(v) → H(e)` for `v ≤ e`.
fn generization<R: Ring>(r: &R, v: &Stalk<R>, e: &Stalk<R>) -> Matrix<R> {
    let mut m = Matrix::zeros(r, e.pi.len(), v.iota.len());
    for (j, z) in v.iota.iter().enumerate() {
        // restrict the cycle to the generators over the star of e
        let mut local = std::collections::BTreeMap::new();
        for (g, c) in z {
            if let Ok(k) = e.generators.binary_search(&v.generators[*g]) {
                local.insert(k, c.clone());
            }
        }
        for (i, row) in e.pi.iter().enumerate() {
            let mut acc = r.zero();
            for (k, c) in row {
                if let Some(x) = local.get(k) {
                    r.add_mul(&mut acc, c, x);
                }
            }
            m.set(i, j, acc);
        }
    }
    m
}

pub fn monodromy<R: KsRing>(f: &InjComplex<R>, cycle: &[usize], degree: i32) -> Result<Monodromy<R>> {
    let k = f.space();
    let r = f.ring();
    if cycle.len() < 2 || cycle.len() % 2 != 0 {
        return Err(Error::Precondition("a cycle alternates vertices and edges".into()));
    }
    let n = cycle.len();
    for i in (0..n).step_by(2) {
        let (v, e, w) = (cycle[i], cycle[i + 1], cycle[(i + 2) % n]);
        if k.dim(v) != 0 || !k.le(v, e) || !k.le(w, e) {
            return Err(Error::Precondition(format!("cells {v}, {e}, {w} do not form a path")));
        }
    }
    let stalks: Vec<Stalk<R>> = cycle.iter().map(|&c| stalk_basis(f, c, degree)).collect::<Result<_>>()?;
    let rank = stalks[0].iota.len();
    if stalks.iter().any(|s| s.iota.len() != rank) {
        return Err(Error::NotLocalSystem("stalk ranks vary along the cycle".into()));
    }
    let mut m = Matrix::identity(r, rank);
    for i in (0..n).step_by(2) {
        let (v, e, w) = (&stalks[i], &stalks[i + 1], &stalks[(i + 2) % n]);
        let out = generization(r, v, e);
        let back = generization(r, w, e).inverse().ok_or_else(|| {
            Error::NotLocalSystem(format!("restriction to cell {} is not invertible", cycle[i + 1]))
        })?;
        if !out.is_invertible() {
            return Err(Error::NotLocalSystem(format!("restriction to cell {} is not invertible", cycle[i + 1])));
        }
        m = back.mul(&out)?.mul(&m)?;
    }
    let canonical = canonical_form(&m)?;
    Ok(Monodromy { degree, matrix: m, canonical })
}

pub fn canonical_form<R: KsRing>(m: &Matrix<R>) -> Result<CanonicalForm<R>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch("canonical form of a non-square matrix".into()));
    }
    let r = m.ring();
    if r.is_field() {
        let k = r.residue();
        let a = m.map_ring(&k, |x| r.to_residue(x));
        let (c, factors, certified) = rational_canonical(&a)?;
        return Ok(CanonicalForm {
            matrix: c.map_ring(r, |x| r.from_residue(x)),
            invariant_factors: factors.iter().map(Poly::format).collect(),
            method: CanonicalMethod::RationalCanonical,
            certified,
        });
    }
    match least_conjugate(m) {
        Some(c) => Ok(CanonicalForm {
            matrix: c,
            invariant_factors: Vec::new(),
            method: CanonicalMethod::ExhaustiveSearch,
            certified: true,
        }),
        None => Ok(CanonicalForm {
            matrix: m.clone(),
            invariant_factors: Vec::new(),
            method: CanonicalMethod::Unreduced,
            certified: false,
        }),
    }
}

type Canonical<K> = (Matrix<K>, Vec<Poly<K>>, bool);

/// Rational canonical form from elementary divisors: for each factor `f` of
/// the minimal polynomial the ranks of `f(A)^j` give the block sizes.
fn rational_canonical<K: SplitField>(a: &Matrix<K>) -> Result<Canonical<K>> {
    let k = a.ring().clone();
    let n = a.rows();
    if n == 0 {
        return Ok((a.clone(), Vec::new(), true));
    }
    let mu = minimal_polynomial(a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (factors, certified) = k.split_poly(&mu, &mut rng)?;
    let mut blocks: Vec<(Poly<K>, Vec<usize>)> = Vec::new();
    for (f, mult) in factors {
        let delta = f.degree().unwrap_or(0).max(1);
        let fa = f.eval_matrix(a);
        let mut ranks = vec![n];
        let mut p = Matrix::identity(&k, n);
        for _ in 0..mult {
            p = p.mul(&fa)?;
            ranks.push(p.rank());
        }
        // blocks of size at least j, then exact sizes, largest first
        let at_least: Vec<usize> = (1..=mult).map(|j| (ranks[j - 1] - ranks[j]) / delta).collect();
        let mut sizes = Vec::new();
        for j in (1..=mult).rev() {
            let exact = at_least[j - 1] - at_least.get(j).copied().unwrap_or(0);
            sizes.extend(std::iter::repeat(j).take(exact));
        }
        blocks.push((f, sizes));
    }
    let count = blocks.iter().map(|b| b.1.len()).max().unwrap_or(0);
    let mut invariants: Vec<Poly<K>> = (0..count)
        .map(|i| {
            blocks.iter().fold(Poly::one(&k), |acc, (f, sizes)| match sizes.get(i) {
                Some(&s) => (0..s).fold(acc, |acc, _| acc.mul(f)),
                None => acc,
            })
        })
        .collect();
    invariants.reverse();
    let mut c = Matrix::zeros(&k, 0, 0);
    for p in &invariants {
        c = c.direct_sum(&companion(p));
    }
    Ok((c, invariants, certified))
}

fn companion<K: Ring>(p: &Poly<K>) -> Matrix<K> {
    let k = p.ring();
    let p = p.monic();
    let m = p.degree().unwrap_or(0);
    let mut c = Matrix::zeros(k, m, m);
    for i in 1..m {
        c.set(i, i - 1, k.one());
    }
    for i in 0..m {
        c.set(i, m - 1, k.neg(&p.coeff(i)));
    }
    c
}

fn least_conjugate<R: Ring>(m: &Matrix<R>) -> Option<Matrix<R>> {
    let r = m.ring();
    let q = match r.spec() {
        crate::ring::CoefficientSpec::LocalRing { p, k } => p.pow(k),
        _ => return None,
    };
    let n = m.rows();
    let cells = (n * n) as u32;
    if q.checked_pow(cells).map_or(true, |t| t > SEARCH_LIMIT) {
        return None;
    }
    let key = |a: &Matrix<R>| -> Vec<i64> {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| r.to_i64(a.get(i, j)).unwrap_or(0).rem_euclid(q as i64))
            .collect()
    };
    let mut best: Option<(Vec<i64>, Matrix<R>)> = None;
    for code in 0..q.pow(cells) {
        let mut p = Matrix::zeros(r, n, n);
        let mut c = code;
        for idx in 0..n * n {
            p.set(idx / n, idx % n, r.from_i64((c % q) as i64));
            c /= q;
        }
        let Some(inv) = p.inverse() else { continue };
        let conj = p.mul(m).ok()?.mul(&inv).ok()?;
        let kc = key(&conj);
        if best.as_ref().map_or(true, |b| kc < b.0) {
            best = Some((kc, conj));
        }
    }
    best.map(|b| b.1)
}
