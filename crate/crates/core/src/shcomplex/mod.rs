//! Complexes of representations of face posets: injective models,
//! explicit representation complexes, Hom complexes and duality.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

mod hom;
mod inj;
mod proj;
mod rep;

pub use hom::{hom_complex, hom_complex_in, hom_dims, HomComplex};
pub use inj::{free_cohomology, ChainMap, InjComplex};
pub use proj::{hom_from_projective, projective_resolution, ProjComplex, ProjectiveResolution};
pub use rep::RepComplex;

/// Graded cohomology: per degree, the exponents of the cyclic summands
/// (`Λ/p^e`, with `e = k` meaning free over `Z/p^k`; all ones over a field).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedDims {
    pub structure: BTreeMap<i32, Vec<u32>>,
}

impl GradedDims {
    pub fn from_structure(s: &BTreeMap<i32, Vec<u32>>) -> Self {
        GradedDims {
            structure: s
                .iter()
                .filter(|(_, v)| !v.is_empty())
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// From plain dimensions over a field.
    pub fn from_dims(d: impl IntoIterator<Item = (i32, usize)>) -> Self {
        GradedDims {
            structure: d
                .into_iter()
                .filter(|(_, n)| *n > 0)
                .map(|(k, n)| (k, vec![1; n]))
                .collect(),
        }
    }

    /// Number of cyclic summands in degree `n`.
    pub fn dim(&self, n: i32) -> usize {
        self.structure.get(&n).map_or(0, Vec::len)
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.structure.iter().map(|(k, v)| (*k, v.len())).collect()
    }

    /// Total number of cyclic summands.
    pub fn total(&self) -> usize {
        self.structure.values().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.structure.is_empty()
    }

    /// Degrees with nonzero cohomology.
    pub fn degrees(&self) -> Vec<i32> {
        self.structure.keys().copied().collect()
    }

    pub fn shift(&self, n: i32) -> Self {
        GradedDims {
            structure: self
                .structure
                .iter()
                .map(|(k, v)| (k - n, v.clone()))
                .collect(),
        }
    }

    /// Dense vector of dimensions for degrees `lo..=hi`.
    pub fn dims_range(&self, lo: i32, hi: i32) -> Vec<usize> {
        (lo..=hi).map(|n| self.dim(n)).collect()
    }
}

impl fmt::Display for GradedDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .structure
            .iter()
            .map(|(k, v)| {
                if v.iter().all(|&e| e == 1) {
                    format!("H^{k}={}", v.len())
                } else {
                    format!("H^{k}={v:?}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}
