use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite regular cell complex with signed incidences.
///
/// A complex need not be closed under taking faces: restricting to an open
/// (up-closed) set of cells yields a non-compact complex whose cellular
/// chains are the Borel-Moore chains of the open subspace.
#[derive(Clone, Debug)]
pub struct CellComplex {
    dims: Vec<usize>,
    facets: Vec<Vec<(usize, i8)>>,
    cofacets: Vec<Vec<(usize, i8)>>,
    faces: Vec<Vec<usize>>,
    cofaces: Vec<Vec<usize>>,
    simplices: Option<Vec<Vec<usize>>>,
    index: Option<HashMap<Vec<usize>, usize>>,
    closed: bool,
}

/// The face order of a complex. Up-sets are the open sets of the model.
#[derive(Clone, Copy, Debug)]
pub struct FacePoset<'a> {
    complex: &'a CellComplex,
}

impl CellComplex {
    /// Closure of a list of simplices given as vertex lists.
    pub fn from_simplices(simplices: &[Vec<usize>]) -> Result<Self> {
        let mut all: Vec<Vec<usize>> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for s in simplices {
            let mut s = s.clone();
            s.sort_unstable();
            let before = s.len();
            s.dedup();
            if s.len() != before {
                return Err(Error::InvalidComplex(format!(
                    "simplex {s:?} repeats a vertex"
                )));
            }
            if s.is_empty() {
                continue;
            }
            if s.len() > 30 {
                return Err(Error::InvalidComplex("simplex dimension above 29".into()));
            }
            if !seen.insert(s.clone()) {
                continue;
            }
            // enumerate all nonempty faces
            let n = s.len();
            for mask in 1u32..(1 << n) {
                let f: Vec<usize> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| s[i])
                    .collect();
                if seen.insert(f.clone()) || f.len() == n {
                    all.push(f);
                }
            }
        }
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all.dedup();
        Ok(Self::from_sorted_simplices(all))
    }

    /// Assumes the list is face-closed, sorted by (dimension, lex) and
    /// duplicate-free.
    fn from_sorted_simplices(all: Vec<Vec<usize>>) -> Self {
        let index: HashMap<Vec<usize>, usize> = all
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let facets: Vec<Vec<(usize, i8)>> = all
            .iter()
            .map(|s| {
                if s.len() == 1 {
                    return Vec::new();
                }
                (0..s.len())
                    .map(|i| {
                        let mut f = s.clone();
                        f.remove(i);
                        (index[&f], if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect()
            })
            .collect();
        let dims = all.iter().map(|s| s.len() - 1).collect();
        Self::assemble(dims, facets, Some(all), Some(index), true)
    }

    fn assemble(
        dims: Vec<usize>,
        facets: Vec<Vec<(usize, i8)>>,
        simplices: Option<Vec<Vec<usize>>>,
        index: Option<HashMap<Vec<usize>, usize>>,
        closed: bool,
    ) -> Self {
        let n = dims.len();
        let mut cofacets = vec![Vec::new(); n];
        for (t, fs) in facets.iter().enumerate() {
            for &(s, sign) in fs {
                cofacets[s].push((t, sign));
            }
        }
        // faces by increasing dimension: each cell's closure from its facets
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| dims[i]);
        let mut faces: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &c in &order {
            let mut f = vec![c];
            for &(s, _) in &facets[c] {
                f.extend_from_slice(&faces[s]);
            }
            f.sort_unstable();
            f.dedup();
            faces[c] = f;
        }
        let mut cofaces = vec![Vec::new(); n];
        for (c, fs) in faces.iter().enumerate() {
            for &s in fs {
                cofaces[s].push(c);
            }
        }
        CellComplex {
            dims,
            facets,
            cofacets,
            faces,
            cofaces,
            simplices,
            index,
            closed,
        }
    }

    /// A regular CW complex from explicit cells: `facets[c]` lists the
    /// codimension-one faces of cell `c` with incidence signs.
    ///
    /// Checks grading, `∂∂ = 0`, and that every closed cell's boundary has the
    /// homology of a sphere of the right dimension.
    pub fn from_cells(dims: Vec<usize>, facets: Vec<Vec<(usize, i8)>>) -> Result<Self> {
        if dims.len() != facets.len() {
            return Err(Error::InvalidComplex(
                "dims and facets differ in length".into(),
            ));
        }
        for (c, fs) in facets.iter().enumerate() {
            for &(s, sign) in fs {
                if s >= dims.len() || dims[s] + 1 != dims[c] {
                    return Err(Error::InvalidComplex(format!(
                        "cell {c}: facet {s} has the wrong dimension"
                    )));
                }
                if sign != 1 && sign != -1 {
                    return Err(Error::InvalidComplex(format!(
                        "cell {c}: incidence sign {sign}"
                    )));
                }
            }
            if dims[c] > 0 && fs.is_empty() {
                return Err(Error::InvalidComplex(format!(
                    "cell {c} of positive dimension has no facets"
                )));
            }
        }
        let k = Self::assemble(dims, facets, None, None, true);
        k.check_boundary_squared()?;
        k.check_regular()?;
        Ok(k)
    }

    fn check_boundary_squared(&self) -> Result<()> {
        for c in 0..self.len() {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for &(s, a) in &self.facets[c] {
                for &(t, b) in &self.facets[s] {
                    *acc.entry(t).or_default() += (a * b) as i64;
                }
            }
            if acc.values().any(|&v| v != 0) {
                return Err(Error::InvalidComplex(format!(
                    "boundary of boundary of cell {c} is nonzero"
                )));
            }
        }
        Ok(())
    }

    fn check_regular(&self) -> Result<()> {
        use crate::cellposet::homology::reduced_boundary_homology_f2;
        for c in 0..self.len() {
            if self.dims[c] == 0 {
                continue;
            }
            let h = reduced_boundary_homology_f2(self, c);
            let d = self.dims[c] - 1;
            let sphere: Vec<usize> = (0..=d).map(|i| usize::from(i == d)).collect();
            if h != sphere {
                return Err(Error::InvalidComplex(format!(
                    "boundary of cell {c} is not a {d}-sphere (reduced homology {h:?})"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dim(&self, c: usize) -> usize {
        self.dims[c]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Maximal cell dimension (0 for the empty complex).
    pub fn dimension(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    pub fn facets(&self, c: usize) -> &[(usize, i8)] {
        &self.facets[c]
    }

    pub fn cofacets(&self, c: usize) -> &[(usize, i8)] {
        &self.cofacets[c]
    }

    /// All faces of `c` in the complex, including `c`, sorted.
    pub fn faces(&self, c: usize) -> &[usize] {
        &self.faces[c]
    }

    /// All cofaces of `c`, including `c`, sorted.
    pub fn cofaces(&self, c: usize) -> &[usize] {
        &self.cofaces[c]
    }

    /// `a ≤ b` in the face order.
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.faces[b].binary_search(&a).is_ok()
    }

    /// Incidence sign of a facet pair, 0 if `s` is not a facet of `c`.
    pub fn incidence(&self, c: usize, s: usize) -> i8 {
        self.facets[c].iter().find(|f| f.0 == s).map_or(0, |f| f.1)
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn is_simplicial(&self) -> bool {
        self.simplices.is_some()
    }

    /// Vertex list of a cell of a simplicial complex.
    pub fn simplex(&self, c: usize) -> Option<&[usize]> {
        self.simplices.as_ref().map(|s| s[c].as_slice())
    }

    pub fn simplices(&self) -> Option<&[Vec<usize>]> {
        self.simplices.as_deref()
    }

    /// Cell index of a simplex given by its vertex set.
    pub fn find_simplex(&self, vertices: &[usize]) -> Option<usize> {
        let mut v = vertices.to_vec();
        v.sort_unstable();
        v.dedup();
        self.index.as_ref()?.get(&v).copied()
    }

    /// Largest vertex label plus one (simplicial complexes only).
    pub fn vertex_bound(&self) -> usize {
        self.simplices.as_ref().map_or(0, |s| {
            s.iter()
                .flat_map(|x| x.iter())
                .copied()
                .max()
                .map_or(0, |m| m + 1)
        })
    }

    pub fn cells_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.dims[c] == d).collect()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.dimension() + 1];
        for &d in &self.dims {
            f[d] += 1;
        }
        if self.is_empty() {
            f.clear();
        }
        f
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .map(|&d| if d % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    pub fn poset(&self) -> FacePoset<'_> {
        FacePoset { complex: self }
    }

    /// The open subcomplex on an up-closed set of cells, with the map from
    /// new to old cell indices.
    pub fn restrict_open(&self, u: &OpenSet) -> Result<(CellComplex, Vec<usize>)> {
        u.validate(self)?;
        let keep: Vec<usize> = u.cells().to_vec();
        let mut new_index = vec![usize::MAX; self.len()];
        for (i, &c) in keep.iter().enumerate() {
            new_index[c] = i;
        }
        let dims = keep.iter().map(|&c| self.dims[c]).collect();
        let facets = keep
            .iter()
            .map(|&c| {
                self.facets[c]
                    .iter()
                    .filter(|f| new_index[f.0] != usize::MAX)
                    .map(|&(s, sign)| (new_index[s], sign))
                    .collect()
            })
            .collect();
        let simplices = self
            .simplices
            .as_ref()
            .map(|s| keep.iter().map(|&c| s[c].clone()).collect::<Vec<_>>());
        let index = simplices
            .as_ref()
            .map(|s: &Vec<Vec<usize>>| s.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect());
        let closed = self.closed && keep.len() == self.len();
        Ok((Self::assemble(dims, facets, simplices, index, closed), keep))
    }

    /// The closed subcomplex on a down-closed set of cells.
    pub fn restrict_closed(&self, cells: &[usize]) -> Result<(CellComplex, Vec<usize>)> {
        let mut keep = cells.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut new_index = vec![usize::MAX; self.len()];
        for (i, &c) in keep.iter().enumerate() {
            new_index[c] = i;
        }
        for &c in &keep {
            if self.faces[c].iter().any(|&f| new_index[f] == usize::MAX) {
                return Err(Error::InvalidSubset(format!(
                    "cell set is not closed under faces at {c}"
                )));
            }
        }
        let dims = keep.iter().map(|&c| self.dims[c]).collect();
        let facets = keep
            .iter()
            .map(|&c| {
                self.facets[c]
                    .iter()
                    .map(|&(s, sign)| (new_index[s], sign))
                    .collect()
            })
            .collect();
        let simplices = self
            .simplices
            .as_ref()
            .map(|s| keep.iter().map(|&c| s[c].clone()).collect::<Vec<_>>());
        let index = simplices
            .as_ref()
            .map(|s: &Vec<Vec<usize>>| s.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect());
        Ok((
            Self::assemble(dims, facets, simplices, index, self.closed),
            keep,
        ))
    }

    /// The closure of this complex as a simplicial complex (for open
    /// simplicial complexes), with the map from own cells to closure cells.
    pub fn closure(&self) -> Result<(CellComplex, Vec<usize>)> {
        let s = self.simplices.as_ref().ok_or_else(|| {
            Error::InvalidComplex("closure needs a simplicial presentation".into())
        })?;
        let k = CellComplex::from_simplices(s)?;
        let map = s
            .iter()
            .map(|x| k.find_simplex(x).expect("face of itself"))
            .collect();
        Ok((k, map))
    }

    /// Simplicial complex JSON form `{"vertices": N, "simplices": [...]}`.
    pub fn to_json(&self) -> Result<SimplicialJson> {
        let s = self
            .simplices
            .as_ref()
            .ok_or_else(|| Error::InvalidComplex("not simplicial".into()))?;
        // maximal simplices suffice
        let simplices = (0..self.len())
            .filter(|&c| self.cofaces[c].len() == 1)
            .map(|c| s[c].clone())
            .collect();
        Ok(SimplicialJson {
            vertices: self.vertex_bound(),
            simplices,
        })
    }

    pub fn from_json(j: &SimplicialJson) -> Result<Self> {
        if let Some(bad) = j.simplices.iter().flatten().find(|&&v| v >= j.vertices) {
            return Err(Error::Format(format!(
                "vertex {bad} out of range 0..{}",
                j.vertices
            )));
        }
        Self::from_simplices(&j.simplices)
    }
}

/// JSON form of a simplicial complex.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SimplicialJson {
    pub vertices: usize,
    pub simplices: Vec<Vec<usize>>,
}

impl<'a> FacePoset<'a> {
    pub fn complex(&self) -> &'a CellComplex {
        self.complex
    }

    pub fn len(&self) -> usize {
        self.complex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complex.is_empty()
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.complex.le(a, b)
    }

    /// Covering pairs `(lower, upper)`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|c| self.complex.facets(c).iter().map(move |&(s, _)| (s, c)))
            .collect()
    }

    /// Number of elements in a longest chain.
    pub fn height(&self) -> usize {
        let mut h = vec![0usize; self.len()];
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&c| self.complex.dim(c));
        for &c in &order {
            h[c] = 1 + self
                .complex
                .facets(c)
                .iter()
                .map(|f| h[f.0])
                .max()
                .unwrap_or(0);
        }
        h.into_iter().max().unwrap_or(0)
    }

    pub fn open_star(&self, c: usize) -> OpenSet {
        OpenSet {
            cells: self.complex.cofaces(c).to_vec(),
        }
    }

    /// Maximal chains of the order complex, as sorted cell lists.
    pub fn chains(&self, max_len: Option<usize>) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..self.len()).map(|c| vec![c]).collect();
        while let Some(ch) = stack.pop() {
            let last = *ch.last().unwrap();
            if max_len.is_none_or(|m| ch.len() < m) {
                for &(t, _) in self.complex.cofacets(last) {
                    let mut n = ch.clone();
                    n.push(t);
                    stack.push(n);
                }
            }
            out.push(ch);
        }
        out
    }
}

/// An up-closed set of cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenSet {
    cells: Vec<usize>,
}

impl OpenSet {
    /// Checks up-closedness.
    pub fn new(k: &CellComplex, cells: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut cells: Vec<usize> = cells.into_iter().collect();
        cells.sort_unstable();
        cells.dedup();
        let u = OpenSet { cells };
        u.validate(k)?;
        Ok(u)
    }

    /// Smallest open set containing the given cells.
    pub fn generated(k: &CellComplex, cells: impl IntoIterator<Item = usize>) -> Self {
        let mut out: Vec<usize> = cells
            .into_iter()
            .flat_map(|c| k.cofaces(c).iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        OpenSet { cells: out }
    }

    pub fn all(k: &CellComplex) -> Self {
        OpenSet {
            cells: (0..k.len()).collect(),
        }
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn contains(&self, c: usize) -> bool {
        self.cells.binary_search(&c).is_ok()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &c in &self.cells {
            m[c] = true;
        }
        m
    }

    fn validate(&self, k: &CellComplex) -> Result<()> {
        let m = self.mask(k.len());
        for &c in &self.cells {
            if c >= k.len() {
                return Err(Error::InvalidSubset(format!("cell {c} out of range")));
            }
            if let Some(&(t, _)) = k.cofacets(c).iter().find(|t| !m[t.0]) {
                return Err(Error::InvalidSubset(format!(
                    "not up-closed: {c} < {t} but {t} missing"
                )));
            }
        }
        Ok(())
    }

    /// The closed (down-closed) complement.
    pub fn complement_closed(&self, k: &CellComplex) -> Vec<usize> {
        let m = self.mask(k.len());
        (0..k.len()).filter(|&c| !m[c]).collect()
    }

    pub fn intersect(&self, other: &OpenSet) -> OpenSet {
        OpenSet {
            cells: self
                .cells
                .iter()
                .copied()
                .filter(|&c| other.contains(c))
                .collect(),
        }
    }
}

/// Ordered partition of the cells into strata, the first open, each initial
/// union open, with declared complex dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stratification {
    pub strata: Vec<Stratum>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub cells: Vec<usize>,
    pub complex_dim: usize,
}

impl Stratification {
    pub fn new(k: &CellComplex, strata: Vec<Stratum>) -> Result<Self> {
        let s = Stratification { strata };
        s.validate(k)?;
        Ok(s)
    }

    /// The trivial stratification: everything in one open stratum.
    pub fn trivial(k: &CellComplex) -> Self {
        Stratification {
            strata: vec![Stratum {
                cells: (0..k.len()).collect(),
                complex_dim: k.dimension() / 2,
            }],
        }
    }

    /// Two strata: an open set and its closed complement.
    pub fn open_closed(k: &CellComplex, u: &OpenSet, closed_dim: usize) -> Result<Self> {
        Self::new(
            k,
            vec![
                Stratum {
                    cells: u.cells().to_vec(),
                    complex_dim: k.dimension() / 2,
                },
                Stratum {
                    cells: u.complement_closed(k),
                    complex_dim: closed_dim,
                },
            ],
        )
    }

    pub fn validate(&self, k: &CellComplex) -> Result<()> {
        let mut seen = vec![false; k.len()];
        let mut union = Vec::new();
        for (i, s) in self.strata.iter().enumerate() {
            for &c in &s.cells {
                if c >= k.len() || seen[c] {
                    return Err(Error::InvalidSubset(format!(
                        "stratum {i}: cell {c} out of range or repeated"
                    )));
                }
                seen[c] = true;
                union.push(c);
            }
            OpenSet::new(k, union.iter().copied()).map_err(|e| {
                Error::InvalidSubset(format!("strata 0..={i} do not form an open set: {e}"))
            })?;
            let top = s.cells.iter().map(|&c| k.dim(c)).max().unwrap_or(0);
            if !s.cells.is_empty() && top != 2 * s.complex_dim {
                return Err(Error::InvalidSubset(format!(
                    "stratum {i}: declared complex dimension {} but top cell dimension {top}",
                    s.complex_dim
                )));
            }
        }
        if seen.iter().any(|x| !x) {
            return Err(Error::InvalidSubset(
                "strata do not cover every cell".into(),
            ));
        }
        Ok(())
    }

    /// Index of the stratum containing each cell.
    pub fn stratum_of(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (i, s) in self.strata.iter().enumerate() {
            for &c in &s.cells {
                out[c] = i;
            }
        }
        out
    }

    /// Lowest-dimensional cell of each stratum, used as its representative.
    pub fn representatives(&self, k: &CellComplex) -> Vec<usize> {
        self.strata
            .iter()
            .map(|s| {
                *s.cells
                    .iter()
                    .min_by_key(|&&c| (k.dim(c), c))
                    .expect("nonempty stratum")
            })
            .collect()
    }
}
