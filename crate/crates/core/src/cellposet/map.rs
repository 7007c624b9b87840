use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cellposet::{CellComplex, OpenSet};
use crate::error::{Error, Result};

/// An order-preserving, dimension-non-increasing map of face posets.
#[derive(Clone, Debug)]
pub struct CellularMap {
    source: Arc<CellComplex>,
    target: Arc<CellComplex>,
    cells: Vec<usize>,
    vertex_map: Option<Vec<usize>>,
    /// User assertion that the map models a smooth proper surjection.
    pub smooth_proper: bool,
}

/// JSON form `{"vertex_map": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VertexMapJson {
    pub vertex_map: Vec<usize>,
}

impl CellularMap {
    /// From an explicit cell assignment; checks order preservation and
    /// dimensions.
    pub fn new(
        source: Arc<CellComplex>,
        target: Arc<CellComplex>,
        cells: Vec<usize>,
    ) -> Result<Self> {
        if cells.len() != source.len() {
            return Err(Error::InvalidMap(format!(
                "{} images for {} cells",
                cells.len(),
                source.len()
            )));
        }
        for (c, &t) in cells.iter().enumerate() {
            if t >= target.len() {
                return Err(Error::InvalidMap(format!("cell {c} maps out of range")));
            }
            if target.dim(t) > source.dim(c) {
                return Err(Error::InvalidMap(format!(
                    "cell {c} maps to a cell of higher dimension"
                )));
            }
            for &(s, _) in source.facets(c) {
                if !target.le(cells[s], t) {
                    return Err(Error::InvalidMap(format!(
                        "not order preserving at {s} < {c}"
                    )));
                }
            }
        }
        Ok(CellularMap {
            source,
            target,
            cells,
            vertex_map: None,
            smooth_proper: false,
        })
    }

    /// Simplicial map from a vertex map (indexed by source vertex label).
    pub fn from_vertex_map(
        source: Arc<CellComplex>,
        target: Arc<CellComplex>,
        vertex_map: Vec<usize>,
    ) -> Result<Self> {
        let simp = source
            .simplices()
            .ok_or_else(|| Error::InvalidMap("source is not simplicial".into()))?;
        if !target.is_simplicial() {
            return Err(Error::InvalidMap("target is not simplicial".into()));
        }
        let mut cells = Vec::with_capacity(source.len());
        for (c, s) in simp.iter().enumerate() {
            let img: Vec<usize> = s
                .iter()
                .map(|&v| {
                    vertex_map
                        .get(v)
                        .copied()
                        .ok_or_else(|| Error::InvalidMap(format!("vertex {v} has no image")))
                })
                .collect::<Result<_>>()?;
            let t = target.find_simplex(&img).ok_or_else(|| {
                Error::InvalidMap(format!(
                    "cell {c} = {s:?} maps to {img:?}, not a simplex of the target"
                ))
            })?;
            cells.push(t);
        }
        let mut m = Self::new(source, target, cells)?;
        m.vertex_map = Some(vertex_map);
        Ok(m)
    }

    pub fn identity(k: Arc<CellComplex>) -> Self {
        let cells = (0..k.len()).collect();
        let vertex_map = k.is_simplicial().then(|| (0..k.vertex_bound()).collect());
        CellularMap {
            source: k.clone(),
            target: k,
            cells,
            vertex_map,
            smooth_proper: true,
        }
    }

    /// The map to the one-point complex.
    pub fn to_point(k: Arc<CellComplex>) -> Self {
        let pt = Arc::new(CellComplex::from_simplices(&[vec![0]]).expect("point"));
        let vertex_map = k.is_simplicial().then(|| vec![0; k.vertex_bound()]);
        CellularMap {
            cells: vec![0; k.len()],
            source: k,
            target: pt,
            vertex_map,
            smooth_proper: false,
        }
    }

    pub fn with_smooth_proper(mut self, flag: bool) -> Self {
        self.smooth_proper = flag;
        self
    }

    pub fn source(&self) -> &Arc<CellComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<CellComplex> {
        &self.target
    }

    /// Image cell of a source cell.
    pub fn apply(&self, c: usize) -> usize {
        self.cells[c]
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn vertex_map(&self) -> Option<&[usize]> {
        self.vertex_map.as_deref()
    }

    /// Finite complexes: every cellular map is proper.
    pub fn is_proper(&self) -> bool {
        true
    }

    /// Preimage of an open set of the target (open by order preservation).
    pub fn preimage(&self, u: &OpenSet) -> OpenSet {
        let m = u.mask(self.target.len());
        OpenSet::new(
            &self.source,
            (0..self.source.len()).filter(|&c| m[self.cells[c]]),
        )
        .expect("preimage of an up-set")
    }

    /// Restriction over an open set of the target: `f^{-1}(U) -> U`.
    pub fn restrict_over(&self, u: &OpenSet) -> Result<(CellularMap, Vec<usize>, Vec<usize>)> {
        let pre = self.preimage(u);
        let (src, src_cells) = self.source.restrict_open(&pre)?;
        let (tgt, tgt_cells) = self.target.restrict_open(u)?;
        let mut tindex = vec![usize::MAX; self.target.len()];
        for (i, &c) in tgt_cells.iter().enumerate() {
            tindex[c] = i;
        }
        let cells = src_cells.iter().map(|&c| tindex[self.cells[c]]).collect();
        let mut m = CellularMap::new(Arc::new(src), Arc::new(tgt), cells)?;
        m.vertex_map = self.vertex_map.clone();
        m.smooth_proper = self.smooth_proper;
        Ok((m, src_cells, tgt_cells))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &CellularMap) -> Result<CellularMap> {
        if self.target.len() != other.source.len() {
            return Err(Error::InvalidMap(
                "composition of non-composable maps".into(),
            ));
        }
        let cells = self.cells.iter().map(|&c| other.cells[c]).collect();
        let mut m = CellularMap::new(self.source.clone(), other.target.clone(), cells)?;
        if let (Some(a), Some(b)) = (&self.vertex_map, &other.vertex_map) {
            m.vertex_map = Some(
                a.iter()
                    .map(|&v| b.get(v).copied().unwrap_or(usize::MAX))
                    .collect(),
            );
        }
        Ok(m)
    }

    /// Whether the map is a bijection of face posets onto its target.
    pub fn is_poset_isomorphism(&self) -> bool {
        if self.source.len() != self.target.len() {
            return false;
        }
        let mut seen = vec![false; self.target.len()];
        for &t in &self.cells {
            if seen[t] {
                return false;
            }
            seen[t] = true;
        }
        (0..self.source.len()).all(|c| self.source.dim(c) == self.target.dim(self.cells[c]))
    }

    /// Orientation sign of a cell mapping onto a cell of the same dimension
    /// (simplicial maps), 0 when the dimension drops.
    pub fn degree_sign(&self, c: usize) -> i64 {
        let t = self.cells[c];
        if self.target.dim(t) != self.source.dim(c) {
            return 0;
        }
        let (Some(vm), Some(s)) = (&self.vertex_map, self.source.simplex(c)) else {
            return 1;
        };
        let img: Vec<usize> = s.iter().map(|&v| vm[v]).collect();
        permutation_sign(&img)
    }

    pub fn to_json(&self) -> Result<VertexMapJson> {
        Ok(VertexMapJson {
            vertex_map: self
                .vertex_map
                .clone()
                .ok_or_else(|| Error::InvalidMap("no vertex map".into()))?,
        })
    }
}

/// Sign of the permutation sorting a list of distinct keys.
pub fn permutation_sign(v: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}
