use std::sync::Arc;

use crate::cellposet::{CellComplex, OpenSet, Stratification};
use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::shcomplex::InjComplex;
use crate::sixfunctors::constant_sheaf;

/// Intersection complex by iterated pushforward and truncation along the
/// strata, normalized to the constant sheaf in degree 0 on the open stratum
/// (fields only).
pub fn deligne_ic<R: Ring>(ring: &R, k: &Arc<CellComplex>, strat: &Stratification) -> Result<InjComplex<R>> {
    if !ring.is_field() {
        return Err(Error::NotAField(ring.spec().to_string()));
    }
    strat.validate(k)?;
    let top = strat.strata[0].complex_dim;
    let one = constant_sheaf(ring, k);
    let mut union: Vec<usize> = strat.strata[0].cells.clone();
    let (sub, mut cells) = open_sub(k, &union)?;
    let mut current = one.restrict_open(sub, &cells);
    for s in &strat.strata[1..] {
        if s.complex_dim > top {
            return Err(Error::InvalidSubset("a closed stratum is bigger than the open one".into()));
        }
        union.extend_from_slice(&s.cells);
        let (next, next_cells) = open_sub(k, &union)?;
        let mut pos = vec![usize::MAX; k.len()];
        for (i, &c) in next_cells.iter().enumerate() {
            pos[c] = i;
        }
        let inclusion: Vec<usize> = cells.iter().map(|&c| pos[c]).collect();
        let pushed = current.relabel(next.clone(), &inclusion);
        let c = (top - s.complex_dim) as i32;
        current = pushed.to_rep().truncate_le(c - 1)?.injective_model().minimize();
        cells = next_cells;
    }
    Ok(current.relabel(k.clone(), &cells).minimize())
}

fn open_sub(k: &CellComplex, cells: &[usize]) -> Result<(Arc<CellComplex>, Vec<usize>)> {
    let u = OpenSet::new(k, cells.iter().copied())?;
    let (sub, keep) = k.restrict_open(&u)?;
    Ok((Arc::new(sub), keep))
}
