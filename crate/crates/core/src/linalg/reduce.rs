//! Elimination kernels: reduced row echelon form over fields and the
//! local Smith form over `Z/p^k`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ring::Ring;

/// Result of Gauss-Jordan elimination over a field: `transform * A = rref`.
#[derive(Clone, Debug)]
pub struct RowReduction<R: Ring> {
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
    pub rref: Matrix<R>,
    pub transform: Matrix<R>,
}

impl<R: Ring> RowReduction<R> {
    /// Basis of the kernel of the reduced matrix, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<R::Elem>> {
        let ring = self.rref.ring();
        let n = self.rref.cols();
        let mut is_pivot = vec![false; n];
        for &c in &self.pivot_cols {
            is_pivot[c] = true;
        }
        (0..n)
            .filter(|&j| !is_pivot[j])
            .map(|free| {
                let mut v = vec![ring.zero(); n];
                v[free] = ring.one();
                for (row, &pc) in self.pivot_cols.iter().enumerate() {
                    v[pc] = ring.neg(self.rref.get(row, free));
                }
                v
            })
            .collect()
    }
}

/// Local Smith form `u * A * v = d` with `d` diagonal, entries `p^{v_i}`
/// (all ones over a field) followed by zeros.
#[derive(Clone, Debug)]
pub struct LocalSmith<R: Ring> {
    pub u: Matrix<R>,
    pub d: Matrix<R>,
    pub v: Matrix<R>,
    pub v_inv: Matrix<R>,
    /// Valuations of the nonzero diagonal entries, in order.
    pub valuations: Vec<u32>,
}

impl<R: Ring> LocalSmith<R> {
    pub fn rank(&self) -> usize {
        self.valuations.len()
    }
}

impl<R: Ring> Matrix<R> {
    /// Gauss-Jordan elimination. Only defined over fields.
    pub fn row_reduce(&self) -> Result<RowReduction<R>> {
        let ring = self.ring().clone();
        if !ring.is_field() {
            return Err(Error::NotAField(format!(
                "{} (use diagonalize_over_local)",
                ring.spec()
            )));
        }
        let mut a = self.clone();
        let mut t = Matrix::identity(&ring, self.rows());
        let mut pivot_cols = Vec::new();
        let mut row = 0;
        for col in 0..self.cols() {
            if row == self.rows() {
                break;
            }
            let Some(p) = (row..self.rows()).find(|&i| !ring.is_zero(a.get(i, col))) else {
                continue;
            };
            a.swap_rows(row, p);
            t.swap_rows(row, p);
            let inv = ring
                .inv(a.get(row, col))
                .expect("nonzero element of a field");
            a.scale_row(row, &inv);
            t.scale_row(row, &inv);
            for i in 0..self.rows() {
                if i != row {
                    let f = a.get(i, col).clone();
                    if !ring.is_zero(&f) {
                        let c = ring.neg(&f);
                        a.add_row_multiple(i, row, &c);
                        t.add_row_multiple(i, row, &c);
                    }
                }
            }
            pivot_cols.push(col);
            row += 1;
        }
        Ok(RowReduction {
            rank: pivot_cols.len(),
            pivot_cols,
            rref: a,
            transform: t,
        })
    }

    /// Smith form over a local principal ideal ring (works over fields too).
    pub fn diagonalize_over_local(&self) -> LocalSmith<R> {
        let ring = self.ring().clone();
        let (m, n) = (self.rows(), self.cols());
        let mut a = self.clone();
        let mut u = Matrix::identity(&ring, m);
        let mut v = Matrix::identity(&ring, n);
        let mut v_inv = Matrix::identity(&ring, n);
        let mut valuations = Vec::new();
        let mut t = 0;
        while t < m.min(n) {
            // pivot of minimal valuation in the trailing block
            let mut best: Option<(usize, usize, u32)> = None;
            'search: for i in t..m {
                for j in t..n {
                    if let Some(val) = ring.valuation(a.get(i, j)) {
                        if best.is_none_or(|b| val < b.2) {
                            best = Some((i, j, val));
                            if val == 0 {
                                break 'search;
                            }
                        }
                    }
                }
            }
            let Some((pi, pj, val)) = best else { break };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);
            // normalize the pivot to p^val
            let pv = a.get(t, t).clone();
            let target = ring.pow(&ring.from_i64(residue_prime(&ring) as i64), val as u64);
            let unit = ring
                .div_exact(&pv, &target)
                .expect("pivot is a unit multiple of p^v");
            let unit_inv = ring.inv(&unit).expect("unit");
            a.scale_row(t, &unit_inv);
            u.scale_row(t, &unit_inv);
            let pivot = a.get(t, t).clone();
            for i in t + 1..m {
                let x = a.get(i, t).clone();
                if !ring.is_zero(&x) {
                    let f = ring.div_exact(&x, &pivot).expect("pivot divides column");
                    let c = ring.neg(&f);
                    a.add_row_multiple(i, t, &c);
                    u.add_row_multiple(i, t, &c);
                }
            }
            for j in t + 1..n {
                let x = a.get(t, j).clone();
                if !ring.is_zero(&x) {
                    let f = ring.div_exact(&x, &pivot).expect("pivot divides row");
                    let c = ring.neg(&f);
                    a.add_col_multiple(j, t, &c);
                    v.add_col_multiple(j, t, &c);
                    // v_inv <- E^{-1} v_inv with E^{-1} = I + f e_{t j}
                    v_inv.add_row_multiple(t, j, &f);
                }
            }
            valuations.push(val);
            t += 1;
        }
        LocalSmith {
            u,
            d: a,
            v,
            v_inv,
            valuations,
        }
    }

    /// Rank over a field; over `Z/p^k` the number of nonzero Smith entries.
    pub fn rank(&self) -> usize {
        if self.ring().is_field() {
            self.row_reduce().map(|r| r.rank).unwrap_or(0)
        } else {
            self.diagonalize_over_local().rank()
        }
    }

    /// One solution of `A x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[R::Elem]) -> Result<Option<Vec<R::Elem>>> {
        if b.len() != self.rows() {
            return Err(Error::ShapeMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows()
            )));
        }
        let ring = self.ring().clone();
        let s = self.diagonalize_over_local();
        let ub = s.u.mul_vec(b)?;
        let mut y = vec![ring.zero(); self.cols()];
        for (i, ubi) in ub.iter().enumerate() {
            if i < s.rank() {
                match ring.div_exact(ubi, s.d.get(i, i)) {
                    Some(x) => y[i] = x,
                    None => return Ok(None),
                }
            } else if !ring.is_zero(ubi) {
                return Ok(None);
            }
        }
        Ok(Some(s.v.mul_vec(&y)?))
    }

    /// Generators of the kernel (a basis over a field).
    pub fn kernel(&self) -> Vec<Vec<R::Elem>> {
        let ring = self.ring().clone();
        if ring.is_field() {
            return self.row_reduce().expect("field").kernel_basis();
        }
        let s = self.diagonalize_over_local();
        let k = match ring.spec() {
            crate::ring::CoefficientSpec::LocalRing { k, .. } => k,
            _ => 1,
        };
        let p = residue_prime(&ring);
        let mut gens = Vec::new();
        for j in 0..self.cols() {
            let scale = if j < s.rank() {
                let v = s.valuations[j];
                if v == 0 {
                    continue;
                }
                ring.pow(&ring.from_i64(p as i64), (k - v) as u64)
            } else {
                ring.one()
            };
            gens.push(s.v.column(j).iter().map(|x| ring.mul(x, &scale)).collect());
        }
        gens
    }

    /// Inverse of a square matrix, if it is invertible over the ring.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let s = self.diagonalize_over_local();
        if s.rank() != self.rows() || s.valuations.iter().any(|&v| v != 0) {
            return None;
        }
        // d is the identity here, so A^{-1} = v u
        s.v.mul(&s.u).ok()
    }

    /// Invertibility check: the determinant is a unit.
    pub fn is_invertible(&self) -> bool {
        self.is_square() && {
            let s = self.diagonalize_over_local();
            s.rank() == self.rows() && s.valuations.iter().all(|&v| v == 0)
        }
    }
}

pub(crate) fn residue_prime<R: Ring>(ring: &R) -> u64 {
    match ring.spec().residue_characteristic() {
        0 => 1,
        p => p,
    }
}

/// Structure of the subquotient `ker(d_out) / im(d_in)` as a list of cyclic
/// summand exponents `e` (each summand is `Z/p^e`; over a field every
/// exponent is 1 and the list length is the dimension).
///
/// `d_in: C^{n-1} -> C^n`, `d_out: C^n -> C^{n+1}`; either may have zero rows
/// or columns.
pub fn subquotient_structure<R: Ring>(
    ring: &R,
    dim: usize,
    d_in: &Matrix<R>,
    d_out: &Matrix<R>,
) -> Vec<u32> {
    debug_assert_eq!(d_in.rows(), dim);
    debug_assert_eq!(d_out.cols(), dim);
    if ring.is_field() {
        let r_out = if d_out.rows() == 0 { 0 } else { d_out.rank() };
        let r_in = if d_in.cols() == 0 { 0 } else { d_in.rank() };
        return vec![1; dim - r_out - r_in];
    }
    let k = match ring.spec() {
        crate::ring::CoefficientSpec::LocalRing { k, .. } => k,
        _ => 1,
    };
    let p = residue_prime(ring);
    let s = d_out.diagonalize_over_local();
    let r = s.rank();
    // generator exponents of ker(d_out) in y-coordinates
    let exps: Vec<u32> = (0..dim)
        .map(|i| if i < r { s.valuations[i] } else { k })
        .collect();
    let pk = |e: u32| ring.pow(&ring.from_i64(p as i64), e as u64);
    let gens: Vec<usize> = (0..dim).filter(|&i| exps[i] > 0).collect();
    let g = gens.len();
    let mut pres_cols: Vec<Vec<R::Elem>> = Vec::new();
    for j in 0..d_in.cols() {
        let y = s.v_inv.mul_vec(&d_in.column(j)).expect("shapes");
        let z: Vec<R::Elem> = gens
            .iter()
            .map(|&i| {
                let shift = k - exps[i];
                ring.div_exact(&y[i], &pk(shift))
                    .expect("image lies in the kernel")
            })
            .collect();
        pres_cols.push(z);
    }
    for (idx, &i) in gens.iter().enumerate() {
        if exps[i] < k {
            let mut col = vec![ring.zero(); g];
            col[idx] = pk(exps[i]);
            pres_cols.push(col);
        }
    }
    let pres = Matrix::from_columns(ring, g, &pres_cols);
    let ps = pres.diagonalize_over_local();
    let mut out: Vec<u32> = ps.valuations.iter().copied().filter(|&w| w > 0).collect();
    out.extend(std::iter::repeat_n(k, g - ps.rank()));
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{ModRing, Rationals};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent elimination oracle: counts pivots with plain row swaps.
    fn naive_rank_mod_p(rows: &[Vec<i64>], p: i64) -> usize {
        let mut m: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.rem_euclid(p)).collect())
            .collect();
        let (nr, nc) = (m.len(), m[0].len());
        let mut rank = 0;
        for c in 0..nc {
            let Some(piv) = (rank..nr).find(|&i| m[i][c] != 0) else {
                continue;
            };
            m.swap(rank, piv);
            let inv = (1..p).find(|x| x * m[rank][c] % p == 1).unwrap();
            for i in 0..nr {
                if i != rank && m[i][c] != 0 {
                    let f = m[i][c] * inv % p;
                    for j in 0..nc {
                        m[i][j] = (m[i][j] - f * m[rank][j]).rem_euclid(p);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn identity_over_f2_has_full_rank() {
        let f2 = ModRing::prime_field(2).unwrap();
        assert_eq!(Matrix::identity(&f2, 2).row_reduce().unwrap().rank, 2);
    }

    #[test]
    fn proportional_rows_over_q() {
        let m = Matrix::from_i64_rows(&Rationals, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(m.row_reduce().unwrap().rank, 1);
    }

    #[test]
    fn random_rank_matches_naive_oracle() {
        let f5 = ModRing::prime_field(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            // low-rank products make the test informative
            let inner = 5 + trial % 15;
            let a: Vec<Vec<i64>> = (0..20)
                .map(|_| (0..inner).map(|_| rng.gen_range(0..5)).collect())
                .collect();
            let b: Vec<Vec<i64>> = (0..inner)
                .map(|_| (0..20).map(|_| rng.gen_range(0..5)).collect())
                .collect();
            let prod: Vec<Vec<i64>> = (0..20)
                .map(|i| {
                    (0..20)
                        .map(|j| (0..inner).map(|k| a[i][k] * b[k][j]).sum::<i64>() % 5)
                        .collect()
                })
                .collect();
            let m = Matrix::from_i64_rows(&f5, &prod).unwrap();
            let red = m.row_reduce().unwrap();
            assert_eq!(red.rank, naive_rank_mod_p(&prod, 5));
            assert_eq!(red.rank + red.kernel_basis().len(), 20);
            assert_eq!(m.rank(), red.rank);
        }
    }

    #[test]
    fn row_reduce_rejects_local_rings() {
        let z4 = ModRing::new(2, 2).unwrap();
        assert!(matches!(
            Matrix::identity(&z4, 2).row_reduce(),
            Err(Error::NotAField(_))
        ));
    }

    #[test]
    fn solve_examples() {
        let q = Rationals;
        let i3 = Matrix::identity(&q, 3);
        let b = vec![q.from_i64(4), q.from_i64(-1), q.from_i64(7)];
        assert_eq!(i3.solve(&b).unwrap().unwrap(), b);

        let z4 = ModRing::new(2, 2).unwrap();
        let two = Matrix::from_i64_rows(&z4, &[vec![2]]).unwrap();
        assert_eq!(two.solve(&[1]).unwrap(), None);
        let x = two.solve(&[2]).unwrap().unwrap();
        assert!(x[0] == 1 || x[0] == 3);
        assert!(two.solve(&[1, 1]).is_err());
    }

    #[test]
    fn local_smith_examples() {
        let z8 = ModRing::new(2, 3).unwrap();
        let a = Matrix::from_i64_rows(&z8, &[vec![2, 0], vec![0, 1]]).unwrap();
        let s = a.diagonalize_over_local();
        let mut diag = vec![*s.d.get(0, 0), *s.d.get(1, 1)];
        diag.sort();
        assert_eq!(diag, vec![1, 2]);
        let z = Matrix::zeros(&z8, 3, 3);
        let s = z.diagonalize_over_local();
        assert!(s.d.is_zero() && s.u.is_identity() && s.v.is_identity());
    }

    #[test]
    fn random_local_smith_multiplies_back() {
        let z9 = ModRing::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = Matrix::from_fn(&z9, 10, 10, |_, _| {
                // bias towards non-units
                if rng.gen_bool(0.5) {
                    3 * rng.gen_range(0..3)
                } else {
                    rng.gen_range(0..9)
                }
            });
            let s = a.diagonalize_over_local();
            assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d);
            assert!(s.u.is_invertible() && s.v.is_invertible());
            assert!(s.v.mul(&s.v_inv).unwrap().is_identity());
            for i in 0..10 {
                for j in 0..10 {
                    if i != j {
                        assert_eq!(*s.d.get(i, j), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn subquotient_over_z4() {
        let z4 = ModRing::new(2, 2).unwrap();
        // 0 -> Z/4 --2--> Z/4 -> 0 : H at the target is Z/2
        let d_in = Matrix::from_i64_rows(&z4, &[vec![2]]).unwrap();
        let d_out = Matrix::zeros(&z4, 0, 1);
        assert_eq!(subquotient_structure(&z4, 1, &d_in, &d_out), vec![1]);
        // kernel of multiplication by 2 on Z/4 is Z/2
        let d_in = Matrix::zeros(&z4, 1, 0);
        let d_out = Matrix::from_i64_rows(&z4, &[vec![2]]).unwrap();
        assert_eq!(subquotient_structure(&z4, 1, &d_in, &d_out), vec![1]);
        // free part
        let d_out = Matrix::zeros(&z4, 0, 2);
        let d_in = Matrix::zeros(&z4, 2, 0);
        assert_eq!(subquotient_structure(&z4, 2, &d_in, &d_out), vec![2, 2]);
    }
}
