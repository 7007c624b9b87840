//! Exact linear algebra over the supported coefficient rings.

pub mod elim;
mod matrix;
pub mod poly;
mod reduce;
pub mod sparse;

pub use elim::{FreeComplex, Reduction};
pub use matrix::Matrix;
pub use poly::Poly;
pub use reduce::{subquotient_structure, LocalSmith, RowReduction};
pub use sparse::{SparseMat, SparseVec};
