//! Exact computation of derived pushforwards of constant sheaves along
//! cellular maps of finite cell complexes, their Krull-Schmidt
//! decompositions, and the dense summands they contain.
//!
//! Constructible complexes are modelled as bounded complexes of
//! representations of face posets. The workhorse representation is
//! [`shcomplex::InjComplex`], a complex of sums of indecomposable
//! injectives, on which pushforward is relabelling and sections are
//! restriction.

pub mod cellposet;
pub mod error;
pub mod fixtures;
pub mod geomext;
pub mod ksengine;
pub mod linalg;
pub mod report;
pub mod ring;
pub mod shcomplex;
pub mod sixfunctors;

pub use error::{Error, Result};
pub use ring::{CoefficientSpec, ModRing, Rationals, Ring};
