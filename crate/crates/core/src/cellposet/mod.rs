//! Finite cell complexes, face posets, cellular maps, open sets and
//! stratifications.

pub mod build;
mod complex;
pub mod homology;
mod map;

pub use complex::{CellComplex, FacePoset, OpenSet, SimplicialJson, Stratification, Stratum};
pub use map::{permutation_sign, CellularMap, VertexMapJson};
