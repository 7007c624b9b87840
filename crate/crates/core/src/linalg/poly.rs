//! Univariate polynomials over a field: gcds, factorization over prime
//! fields, partial factorization over the rationals, and minimal
//! polynomials of matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ring::{ModRing, Rationals, Ring};

/// Dense polynomial, coefficients from the constant term upwards, trimmed.
#[derive(Clone, Debug)]
pub struct Poly<R: Ring> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: Ring> PartialEq for Poly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<R: Ring> Poly<R> {
    pub fn new(ring: &R, mut coeffs: Vec<R::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            coeffs.pop();
        }
        Poly {
            ring: ring.clone(),
            coeffs,
        }
    }

    pub fn from_i64(ring: &R, coeffs: &[i64]) -> Self {
        Self::new(ring, coeffs.iter().map(|&c| ring.from_i64(c)).collect())
    }

    pub fn zero(ring: &R) -> Self {
        Self::new(ring, vec![])
    }

    pub fn one(ring: &R) -> Self {
        Self::new(ring, vec![ring.one()])
    }

    /// The monomial `x`.
    pub fn x(ring: &R) -> Self {
        Self::new(ring, vec![ring.zero(), ring.one()])
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&R::Elem> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> R::Elem {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let r = &self.ring;
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            r,
            (0..n)
                .map(|i| r.add(&self.coeff(i), &other.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let r = &self.ring;
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            r,
            (0..n)
                .map(|i| r.sub(&self.coeff(i), &other.coeff(i)))
                .collect(),
        )
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        Self::new(
            &self.ring,
            self.coeffs.iter().map(|a| self.ring.mul(a, c)).collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let r = &self.ring;
        if self.is_zero() || other.is_zero() {
            return Self::zero(r);
        }
        let mut out = vec![r.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if r.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                r.add_mul(&mut out[i + j], a, b);
            }
        }
        Self::new(r, out)
    }

    /// Quotient and remainder; the divisor must have a unit leading coefficient.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let r = &self.ring;
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = r
            .inv(divisor.leading().unwrap())
            .expect("unit leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(r), self.clone());
        }
        let mut quot = vec![r.zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = r.mul(&rem[i], &lead_inv);
            if r.is_zero(&c) {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                let t = r.mul(&c, b);
                rem[i - dd + j] = r.sub(&rem[i - dd + j], &t);
            }
            quot[i - dd] = c;
        }
        rem.truncate(dd);
        (Self::new(r, quot), Self::new(r, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => self.scale(&self.ring.inv(l).expect("field")),
        }
    }

    pub fn derivative(&self) -> Self {
        let r = &self.ring;
        Self::new(
            r,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| r.mul(c, &r.from_i64(i as i64)))
                .collect(),
        )
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*other = g = gcd`, `g` monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let ring = &self.ring;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(ring), Self::zero(ring));
        let (mut t0, mut t1) = (Self::zero(ring), Self::one(ring));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading() {
            None => (r0, s0, t0),
            Some(l) => {
                let li = ring.inv(l).expect("field");
                (r0.scale(&li), s0.scale(&li), t0.scale(&li))
            }
        }
    }

    pub fn pow_mod(&self, mut e: u128, modulus: &Self) -> Self {
        let mut base = self.rem(modulus);
        let mut acc = Self::one(&self.ring).rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            base = base.mul(&base).rem(modulus);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: &R::Elem) -> R::Elem {
        let r = &self.ring;
        self.coeffs
            .iter()
            .rev()
            .fold(r.zero(), |acc, c| r.add(&r.mul(&acc, x), c))
    }

    /// Evaluates at a square matrix by Horner's rule.
    pub fn eval_matrix(&self, a: &Matrix<R>) -> Matrix<R> {
        let n = a.rows();
        let mut acc = Matrix::zeros(&self.ring, n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(a).expect("square");
            for i in 0..n {
                let v = self.ring.add(acc.get(i, i), c);
                acc.set(i, i, v);
            }
        }
        acc
    }

    /// Generic evaluation in any associative algebra given by closures.
    pub fn eval_with<T: Clone>(
        &self,
        x: &T,
        one: T,
        add: impl Fn(&T, &T) -> T,
        mul: impl Fn(&T, &T) -> T,
        scale: impl Fn(&T, &R::Elem) -> T,
    ) -> T {
        let mut acc: Option<T> = None;
        for c in self.coeffs.iter().rev() {
            let term = scale(&one, c);
            acc = Some(match acc {
                None => term,
                Some(a) => add(&mul(&a, x), &term),
            });
        }
        acc.unwrap_or_else(|| scale(&one, &self.ring.zero()))
    }

    pub fn format(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if self.ring.is_zero(c) {
                continue;
            }
            let cs = self.ring.format(c);
            parts.push(match i {
                0 => cs,
                1 if self.ring.is_one(c) => "x".into(),
                1 => format!("{cs}*x"),
                _ if self.ring.is_one(c) => format!("x^{i}"),
                _ => format!("{cs}*x^{i}"),
            });
        }
        parts.join(" + ")
    }
}

/// Minimal polynomial of a square matrix over a field, as the lcm of the
/// minimal polynomials of the Krylov sequences of the standard basis.
pub fn minimal_polynomial<R: Ring>(a: &Matrix<R>) -> Result<Poly<R>> {
    let ring = a.ring().clone();
    if !ring.is_field() {
        return Err(Error::NotAField(ring.spec().to_string()));
    }
    if !a.is_square() {
        return Err(Error::ShapeMismatch(
            "minimal polynomial of a non-square matrix".into(),
        ));
    }
    let n = a.rows();
    let mut acc = Poly::one(&ring);
    for i in 0..n {
        let mut v = vec![ring.zero(); n];
        v[i] = ring.one();
        // skip vectors already annihilated by the current lcm
        if is_zero_vec(&ring, &acc.eval_matrix(a).mul_vec(&v)?) {
            continue;
        }
        let p = krylov_min_poly(a, &v)?;
        let g = acc.gcd(&p);
        acc = acc.mul(&p).div_rem(&g).0.monic();
    }
    Ok(acc)
}

fn is_zero_vec<R: Ring>(ring: &R, v: &[R::Elem]) -> bool {
    v.iter().all(|x| ring.is_zero(x))
}

/// Monic polynomial of least degree with `p(A) v = 0`.
fn krylov_min_poly<R: Ring>(a: &Matrix<R>, v: &[R::Elem]) -> Result<Poly<R>> {
    let ring = a.ring().clone();
    let n = a.rows();
    // echelon rows of the Krylov vectors, each paired with its combination
    // of the powers A^j v that produced it
    let mut basis: Vec<(usize, Vec<R::Elem>, Vec<R::Elem>)> = Vec::new();
    let mut cur = v.to_vec();
    for k in 0..=n {
        let mut vec = cur.clone();
        let mut comb = vec![ring.zero(); k + 1];
        comb[k] = ring.one();
        for (piv, bv, bc) in &basis {
            let f = vec[*piv].clone();
            if ring.is_zero(&f) {
                continue;
            }
            for (x, y) in vec.iter_mut().zip(bv) {
                *x = ring.sub(x, &ring.mul(&f, y));
            }
            for (j, y) in bc.iter().enumerate() {
                comb[j] = ring.sub(&comb[j], &ring.mul(&f, y));
            }
        }
        match vec.iter().position(|x| !ring.is_zero(x)) {
            None => return Ok(Poly::new(&ring, comb).monic()),
            Some(piv) => {
                let inv = ring.inv(&vec[piv]).expect("field");
                for x in vec.iter_mut() {
                    *x = ring.mul(x, &inv);
                }
                for x in comb.iter_mut() {
                    *x = ring.mul(x, &inv);
                }
                basis.push((piv, vec, comb));
            }
        }
        cur = a.mul_vec(&cur)?;
    }
    unreachable!("Krylov sequence longer than the dimension")
}

/// Complete factorization over `F_p` into monic irreducibles with
/// multiplicities (squarefree, distinct-degree, then equal-degree splitting).
pub fn factor_over_prime_field<G: rand::Rng + ?Sized>(
    f: &Poly<ModRing>,
    rng: &mut G,
) -> Result<Vec<(Poly<ModRing>, usize)>> {
    let ring = *f.ring();
    if !ring.is_field() {
        return Err(Error::NotAField(ring.spec().to_string()));
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out = Vec::new();
    for (sqf, mult) in squarefree_fp(&f.monic()) {
        for (g, d) in distinct_degree(&sqf) {
            for h in equal_degree(&g, d, rng) {
                out.push((h, mult));
            }
        }
    }
    out.sort_by(|a, b| (a.0.degree(), a.0.coeffs()).cmp(&(b.0.degree(), b.0.coeffs())));
    Ok(out)
}

/// Squarefree decomposition over `F_p`: pairs (squarefree part, multiplicity).
fn squarefree_fp(f: &Poly<ModRing>) -> Vec<(Poly<ModRing>, usize)> {
    let ring = *f.ring();
    let p = ring.p() as usize;
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let fp = f.derivative();
    if fp.is_zero() {
        // f is a p-th power
        let root = pth_root(f);
        for (g, m) in squarefree_fp(&root) {
            out.push((g, m * p));
        }
        return merge(out);
    }
    let mut c = f.gcd(&fp);
    let mut w = f.div_rem(&c).0;
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(&c);
        let fac = w.div_rem(&y).0;
        if fac.degree().unwrap_or(0) > 0 {
            out.push((fac.monic(), i));
        }
        w = y;
        c = c.div_rem(&w).0;
        i += 1;
    }
    if c.degree().unwrap_or(0) > 0 {
        let root = pth_root(&c);
        for (g, m) in squarefree_fp(&root) {
            out.push((g, m * p));
        }
    }
    merge(out)
}

fn merge(mut v: Vec<(Poly<ModRing>, usize)>) -> Vec<(Poly<ModRing>, usize)> {
    // parts for equal multiplicity are coprime; multiply them together
    v.sort_by_key(|x| x.1);
    let mut out: Vec<(Poly<ModRing>, usize)> = Vec::new();
    for (g, m) in v {
        match out.last_mut() {
            Some(last) if last.1 == m => last.0 = last.0.mul(&g),
            _ => out.push((g, m)),
        }
    }
    out
}

/// `g` with `g^p = f`, for `f` with only exponents divisible by `p`.
fn pth_root(f: &Poly<ModRing>) -> Poly<ModRing> {
    let ring = *f.ring();
    let p = ring.p() as usize;
    // over F_p the Frobenius is the identity on coefficients
    Poly::new(&ring, f.coeffs().iter().step_by(p).cloned().collect())
}

/// Distinct-degree factorization of a squarefree monic polynomial.
fn distinct_degree(f: &Poly<ModRing>) -> Vec<(Poly<ModRing>, usize)> {
    let ring = *f.ring();
    let q = ring.p() as u128;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = Poly::x(&ring);
    let mut h = x.rem(&rest);
    let mut d = 0;
    while rest.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(q, &rest);
        let g = rest.gcd(&h.sub(&x));
        if g.degree().unwrap_or(0) > 0 {
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if let Some(deg) = rest.degree() {
        if deg > 0 {
            out.push((rest.monic(), deg));
        }
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting; characteristic 2 uses the
/// trace map instead of the half-power.
fn equal_degree<G: rand::Rng + ?Sized>(
    f: &Poly<ModRing>,
    d: usize,
    rng: &mut G,
) -> Vec<Poly<ModRing>> {
    let ring = *f.ring();
    let n = f.degree().unwrap_or(0);
    if n == d {
        return vec![f.monic()];
    }
    let p = ring.p();
    loop {
        let a = Poly::new(&ring, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            // a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            let e = ((p as u128).pow(d as u32) - 1) / 2;
            a.pow_mod(e, f).sub(&Poly::one(&ring))
        };
        let g = f.gcd(&b);
        let gd = g.degree().unwrap_or(0);
        if gd > 0 && gd < n {
            let h = f.div_rem(&g).0;
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&h.monic(), d, rng));
            return out;
        }
    }
}

/// Result of splitting a rational polynomial as far as the exact methods go.
#[derive(Clone, Debug)]
pub struct RationalSplit {
    /// Monic coprime factors with multiplicity.
    pub factors: Vec<(Poly<Rationals>, usize)>,
    /// Whether every factor is certified irreducible.
    pub complete: bool,
}

/// Splits a nonzero rational polynomial into pairwise coprime factors:
/// squarefree decomposition, rational roots, and irreducibility
/// certificates from reductions modulo small primes.
pub fn split_over_rationals<G: rand::Rng + ?Sized>(
    f: &Poly<Rationals>,
    rng: &mut G,
) -> Result<RationalSplit> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let q = Rationals;
    let mut factors = Vec::new();
    let mut complete = true;
    for (part, mult) in squarefree_q(&f.monic()) {
        let mut rest = part;
        for root in rational_roots(&rest) {
            let lin = Poly::new(&q, vec![-root, BigRational::one()]);
            rest = rest.div_rem(&lin).0;
            factors.push((lin, mult));
        }
        if rest.degree().unwrap_or(0) > 0 {
            if !certified_irreducible(&rest, rng) {
                complete = false;
            }
            factors.push((rest.monic(), mult));
        }
    }
    Ok(RationalSplit { factors, complete })
}

fn squarefree_q(f: &Poly<Rationals>) -> Vec<(Poly<Rationals>, usize)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_rem(&c).0;
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(&c);
        let fac = w.div_rem(&y).0;
        if fac.degree().unwrap_or(0) > 0 {
            out.push((fac.monic(), i));
        }
        w = y;
        c = c.div_rem(&w).0;
        i += 1;
    }
    out
}

/// Integer polynomial proportional to `f` with coprime coefficients.
fn primitive_integer(f: &Poly<Rationals>) -> Vec<BigInt> {
    let lcm = f
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = f
        .coeffs()
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    ints.into_iter().map(|c| c / &g).collect()
}

fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n == 0 || n > 1 << 40 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
        if d > 1 << 20 {
            return None;
        }
    }
    Some(out)
}

/// Distinct rational roots (best effort when coefficients are huge).
fn rational_roots(f: &Poly<Rationals>) -> Vec<BigRational> {
    let mut roots = Vec::new();
    let mut g = f.clone();
    if g.degree().unwrap_or(0) == 0 {
        return roots;
    }
    while g.coeff(0).is_zero() && g.degree().unwrap_or(0) > 0 {
        if !roots.contains(&BigRational::zero()) {
            roots.push(BigRational::zero());
        }
        g = g.div_rem(&Poly::x(&Rationals)).0;
    }
    if g.degree().unwrap_or(0) == 0 {
        return roots;
    }
    let ints = primitive_integer(&g);
    let (Some(num), Some(den)) = (
        small_divisors(&ints[0]),
        small_divisors(ints.last().unwrap()),
    ) else {
        return roots;
    };
    for a in &num {
        for b in &den {
            for s in [1, -1] {
                let cand = BigRational::new(a * s, b.clone());
                if !roots.contains(&cand) && g.eval(&cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots
}

/// True when some reduction modulo a small prime is squarefree of the same
/// degree and irreducible.
fn certified_irreducible<G: rand::Rng + ?Sized>(f: &Poly<Rationals>, rng: &mut G) -> bool {
    let deg = f.degree().unwrap_or(0);
    if deg <= 1 {
        return true;
    }
    let ints = primitive_integer(f);
    for p in [
        3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73,
    ] {
        let fp = ModRing::prime_field(p).expect("prime");
        let red: Vec<u64> = ints
            .iter()
            .map(|c| c.mod_floor(&BigInt::from(p)).to_u64().unwrap())
            .collect();
        let g = Poly::new(&fp, red);
        if g.degree() != Some(deg) {
            continue;
        }
        if g.gcd(&g.derivative()).degree() != Some(0) {
            continue;
        }
        if let Ok(fs) = factor_over_prime_field(&g, rng) {
            if fs.len() == 1 && fs[0].1 == 1 {
                return true;
            }
        }
    }
    false
}
