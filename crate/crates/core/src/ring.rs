//! Coefficient rings: the rationals, prime fields and truncated p-adic
//! rings `Z/p^k`.
//!
//! All arithmetic is exact. `Z/p^1` and `F_p` share one implementation, so
//! they behave identically everywhere.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which coefficient ring a computation runs over.
///
/// The canonical textual forms are `Q`, `F<p>` and `Z/<p^k>` (for example
/// `Z/8`); `Z/<p>^<k>` is also accepted when parsing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientSpec {
    Rationals,
    PrimeField(u64),
    LocalRing { p: u64, k: u32 },
}

impl CoefficientSpec {
    pub fn prime_field(p: u64) -> Result<Self> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::InvalidCoefficients(format!(
                "{p} is not a prime below 2^31"
            )));
        }
        Ok(CoefficientSpec::PrimeField(p))
    }

    pub fn local_ring(p: u64, k: u32) -> Result<Self> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::InvalidCoefficients(format!(
                "{p} is not a prime below 2^31"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidCoefficients(
                "exponent k must be at least 1".into(),
            ));
        }
        match p.checked_pow(k) {
            Some(m) if m < 1 << 63 => Ok(CoefficientSpec::LocalRing { p, k }),
            _ => Err(Error::InvalidCoefficients(format!(
                "{p}^{k} does not fit in 63 bits"
            ))),
        }
    }

    /// `Z/p^k` with the default truncation `k = 8`.
    pub fn p_adic(p: u64) -> Result<Self> {
        Self::local_ring(p, 8)
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, CoefficientSpec::LocalRing { k, .. } if *k > 1)
    }

    /// Characteristic of the residue field (0 for the rationals).
    pub fn residue_characteristic(&self) -> u64 {
        match *self {
            CoefficientSpec::Rationals => 0,
            CoefficientSpec::PrimeField(p) | CoefficientSpec::LocalRing { p, .. } => p,
        }
    }
}

impl fmt::Display for CoefficientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CoefficientSpec::Rationals => write!(f, "Q"),
            CoefficientSpec::PrimeField(p) => write!(f, "F{p}"),
            CoefficientSpec::LocalRing { p, k } => write!(f, "Z/{}", p.pow(k)),
        }
    }
}

impl FromStr for CoefficientSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidCoefficients(format!("cannot parse coefficient spec {s:?}"));
        if s == "Q" {
            return Ok(CoefficientSpec::Rationals);
        }
        if let Some(rest) = s.strip_prefix('F') {
            let p: u64 = rest.parse().map_err(|_| bad())?;
            return Self::prime_field(p);
        }
        if let Some(rest) = s.strip_prefix("Z/") {
            if let Some((base, exp)) = rest.split_once('^') {
                let p: u64 = base.parse().map_err(|_| bad())?;
                let k: u32 = exp.parse().map_err(|_| bad())?;
                return Self::local_ring(p, k);
            }
            let m: u64 = rest.parse().map_err(|_| bad())?;
            let (p, k) = prime_power(m)
                .ok_or_else(|| Error::InvalidCoefficients(format!("{m} is not a prime power")))?;
            return Self::local_ring(p, k);
        }
        Err(bad())
    }
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_power(m: u64) -> Option<(u64, u32)> {
    if m < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= m && m % p != 0 {
        p += 1;
    }
    if m % p != 0 {
        p = m;
    }
    let mut k = 0;
    let mut r = m;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1 && is_prime(p)).then_some((p, k))
}

/// Exact arithmetic over one coefficient ring.
///
/// Every ring handled here is local (a field or `Z/p^k`), so each nonzero
/// element is a unit times a power of the uniformizer, and elimination can
/// always pivot on an entry of minimal valuation.
pub trait Ring: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Send + Sync + 'static;

    fn spec(&self) -> CoefficientSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Inverse of a unit; `None` for zero and for non-units.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// `None` for zero, `Some(0)` for units, otherwise the exponent of the
    /// uniformizer.
    fn valuation(&self, a: &Self::Elem) -> Option<u32>;
    /// Some `x` with `b * x = a`, if one exists.
    fn div_exact(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;
    /// Uniformly random element for finite rings; a small integer for `Q`.
    fn random<G: rand::Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem;
    fn format(&self, a: &Self::Elem) -> String;
    /// Integer representative, when the element has one that fits.
    fn to_i64(&self, a: &Self::Elem) -> Option<i64>;

    fn is_field(&self) -> bool {
        self.spec().is_field()
    }
    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.valuation(a) == Some(0)
    }
    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }
    /// `a += b * c`
    fn add_mul(&self, a: &mut Self::Elem, b: &Self::Elem, c: &Self::Elem) {
        *a = self.add(a, &self.mul(b, c));
    }
    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
    fn sign(&self, positive: bool) -> Self::Elem {
        if positive {
            self.one()
        } else {
            self.neg(&self.one())
        }
    }
}

/// `Z/p^k`; with `k = 1` this is the prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModRing {
    p: u64,
    k: u32,
    modulus: u64,
    field: bool,
}

impl ModRing {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        CoefficientSpec::local_ring(p, k)?;
        Ok(ModRing {
            p,
            k,
            modulus: p.pow(k),
            field: k == 1,
        })
    }

    pub fn prime_field(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The residue field `F_p`.
    pub fn residue_field(&self) -> ModRing {
        ModRing {
            p: self.p,
            k: 1,
            modulus: self.p,
            field: true,
        }
    }

    /// The ring `Z/p^j` for another exponent (used for trace lifting).
    pub fn with_exponent(&self, k: u32) -> Result<ModRing> {
        ModRing::new(self.p, k)
    }

    #[inline]
    pub fn reduce_u128(&self, v: u128) -> u64 {
        (v % self.modulus as u128) as u64
    }
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

impl Ring for ModRing {
    type Elem = u64;

    fn spec(&self) -> CoefficientSpec {
        if self.k == 1 {
            CoefficientSpec::PrimeField(self.p)
        } else {
            CoefficientSpec::LocalRing {
                p: self.p,
                k: self.k,
            }
        }
    }
    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1 % self.modulus
    }
    fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.modulus as i128) as u64
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = *a as u128 + *b as u128;
        if s >= self.modulus as u128 {
            (s - self.modulus as u128) as u64
        } else {
            s as u64
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.modulus - (b - a)
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        if self.modulus < 1 << 32 {
            (a * b) % self.modulus
        } else {
            self.reduce_u128(*a as u128 * *b as u128)
        }
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.modulus - a
        }
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 || a % self.p == 0 {
            return None;
        }
        inv_mod(*a, self.modulus)
    }
    #[inline]
    fn is_unit(&self, a: &u64) -> bool {
        a % self.p != 0
    }
    fn valuation(&self, a: &u64) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        let mut v = 0;
        let mut x = *a;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        Some(v)
    }
    fn div_exact(&self, a: &u64, b: &u64) -> Option<u64> {
        if *a == 0 {
            return Some(0);
        }
        let vb = self.valuation(b)?;
        let va = self.valuation(a)?;
        if va < vb {
            return None;
        }
        let pv = self.p.pow(vb);
        let ua = a / pv;
        let ub = b / pv;
        let ub_inv = inv_mod(ub % self.modulus, self.modulus)?;
        Some(self.mul(&(ua % self.modulus), &ub_inv))
    }
    fn random<G: rand::Rng + ?Sized>(&self, rng: &mut G) -> u64 {
        rng.gen_range(0..self.modulus)
    }
    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
    fn to_i64(&self, a: &u64) -> Option<i64> {
        let half = self.modulus / 2;
        Some(if *a > half {
            *a as i64 - self.modulus as i64
        } else {
            *a as i64
        })
    }
    fn is_field(&self) -> bool {
        self.field
    }
}

/// The field of rational numbers with arbitrary-precision entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> CoefficientSpec {
        CoefficientSpec::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_unit(&self, a: &BigRational) -> bool {
        !a.is_zero()
    }
    fn valuation(&self, a: &BigRational) -> Option<u32> {
        (!a.is_zero()).then_some(0)
    }
    fn div_exact(&self, a: &BigRational, b: &BigRational) -> Option<BigRational> {
        if b.is_zero() {
            return a.is_zero().then(BigRational::zero);
        }
        Some(a / b)
    }
    fn random<G: rand::Rng + ?Sized>(&self, rng: &mut G) -> BigRational {
        self.from_i64(rng.gen_range(-3..=3))
    }
    fn format(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn to_i64(&self, a: &BigRational) -> Option<i64> {
        if a.is_integer() {
            a.numer().to_i64()
        } else {
            None
        }
    }
    fn is_field(&self) -> bool {
        true
    }
}

/// Absolute value helper used when reporting rational sizes.
pub fn rational_height(a: &BigRational) -> u64 {
    let n = a.numer().abs().bits();
    let d = a.denom().bits();
    n.max(d)
}


/// Evaluates `$body` with `$r` bound to the ring named by a
/// [`CoefficientSpec`], so generic code can be driven by a runtime spec.
#[macro_export]
macro_rules! with_ring {
    ($spec:expr, |$r:ident| $body:expr) => {
        match $spec {
            $crate::CoefficientSpec::Rationals => {
                let $r = $crate::Rationals;
                $body
            }
            $crate::CoefficientSpec::PrimeField(p) => {
                let $r = $crate::ModRing::new(p, 1).expect("validated spec");
                $body
            }
            $crate::CoefficientSpec::LocalRing { p, k } => {
                let $r = $crate::ModRing::new(p, k).expect("validated spec");
                $body
            }
        }
    };
}
