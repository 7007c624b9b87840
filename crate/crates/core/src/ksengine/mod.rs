//! Krull-Schmidt decompositions of minimal injective complexes: strict
//! endomorphism algebras, radicals, lifted idempotents, splitting,
//! isomorphism tests and dense parts.

mod algebra;
mod decompose;
mod endo;
mod split;

pub use algebra::{Algebra, Quotient, SplitSearch};
pub use decompose::{
    decompose, decompose_with, dense_part, iso_test, lift_iso_on_dense, DenseIso, DensePart, Decomposition, IsoResult,
    LocalCertificate, Summand,
};
pub use endo::{end_algebra, hom0_generators, is_null_homotopic, EndAlgebra, StrictEnd};
pub use split::{invert_chain_map, newton_idempotent, split_idempotent, TriSolver};

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::poly::{factor_over_prime_field, split_over_rationals};
use crate::linalg::{Matrix, Poly};
use crate::ring::{ModRing, Rationals, Ring};

/// A field over which polynomials can be split and radicals computed.
pub trait SplitField: Ring {
    fn characteristic(&self) -> u64;

    /// Coprime factors with multiplicities; the flag says whether every
    /// factor is certified irreducible.
    fn split_poly<G: Rng + ?Sized>(&self, f: &Poly<Self>, rng: &mut G) -> Result<(Vec<(Poly<Self>, usize)>, bool)>;

    /// `(Tr(A^{p^i}) mod p^{i+1}) / p^i` for the integer lift `A` of a
    /// matrix over `F_p`.
    fn trace_lift(&self, m: &Matrix<Self>, i: u32) -> Self::Elem;
}

impl SplitField for ModRing {
    fn characteristic(&self) -> u64 {
        self.p()
    }

    fn split_poly<G: Rng + ?Sized>(&self, f: &Poly<Self>, rng: &mut G) -> Result<(Vec<(Poly<Self>, usize)>, bool)> {
        Ok((factor_over_prime_field(f, rng)?, true))
    }

    fn trace_lift(&self, m: &Matrix<Self>, i: u32) -> u64 {
        let p = self.p();
        let big = ModRing::new(p, i + 1).expect("small exponent");
        let lifted = m.map_ring(&big, |x| *x);
        let t = lifted.pow(p.pow(i)).expect("square").trace();
        (t / p.pow(i)) % p
    }
}

impl SplitField for Rationals {
    fn characteristic(&self) -> u64 {
        0
    }

    fn split_poly<G: Rng + ?Sized>(&self, f: &Poly<Self>, rng: &mut G) -> Result<(Vec<(Poly<Self>, usize)>, bool)> {
        let s = split_over_rationals(f, rng)?;
        Ok((s.factors, s.complete))
    }

    fn trace_lift(&self, m: &Matrix<Self>, _i: u32) -> Self::Elem {
        m.trace()
    }
}

/// A coefficient ring with a residue field: fields are their own residue
/// field, `Z/p^k` reduces to `F_p`.
pub trait KsRing: Ring {
    type Field: SplitField;
    fn residue(&self) -> Self::Field;
    fn to_residue(&self, a: &Self::Elem) -> <Self::Field as Ring>::Elem;
    /// Some preimage of a residue.
    fn from_residue(&self, a: &<Self::Field as Ring>::Elem) -> Self::Elem;
}

impl KsRing for ModRing {
    type Field = ModRing;
    fn residue(&self) -> ModRing {
        self.residue_field()
    }
    fn to_residue(&self, a: &u64) -> u64 {
        a % self.p()
    }
    fn from_residue(&self, a: &u64) -> u64 {
        *a
    }
}

impl KsRing for Rationals {
    type Field = Rationals;
    fn residue(&self) -> Rationals {
        Rationals
    }
    fn to_residue(&self, a: &Self::Elem) -> Self::Elem {
        a.clone()
    }
    fn from_residue(&self, a: &Self::Elem) -> Self::Elem {
        a.clone()
    }
}

pub(crate) fn internal(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
