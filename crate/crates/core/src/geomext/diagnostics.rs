use serde::Serialize;

use crate::cellposet::{CellComplex, Stratification};
use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::shcomplex::{GradedDims, InjComplex};

/// Stalk and costalk of one stratum at its representative cell. Costalks
/// are point costalks: shifted up by the dimension of the cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StalkRow {
    pub stratum: usize,
    pub cell: usize,
    pub complex_dim: usize,
    pub stalk: GradedDims,
    pub costalk: GradedDims,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StalkTable {
    pub rows: Vec<StalkRow>,
}

impl StalkTable {
    pub fn new<R: Ring>(f: &InjComplex<R>, strat: &Stratification) -> Self {
        let k = f.space();
        let rows = strat
            .representatives(k)
            .into_iter()
            .enumerate()
            .map(|(i, c)| StalkRow {
                stratum: i,
                cell: c,
                complex_dim: strat.strata[i].complex_dim,
                stalk: f.stalk(c),
                costalk: f.costalk(c).shift(-(k.dim(c) as i32)),
            })
            .collect();
        StalkTable { rows }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Zero,
    Even,
    Odd,
    Mixed,
}

impl Parity {
    fn of(g: &GradedDims) -> Self {
        let ds = g.degrees();
        if ds.is_empty() {
            Parity::Zero
        } else if ds.iter().all(|d| d % 2 == 0) {
            Parity::Even
        } else if ds.iter().all(|d| d % 2 != 0) {
            Parity::Odd
        } else {
            Parity::Mixed
        }
    }

    fn agrees(self, other: Parity) -> bool {
        self == Parity::Zero || other == Parity::Zero || self == other
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumParity {
    pub stratum: usize,
    pub stalk: Parity,
    pub costalk: Parity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParityReport {
    pub table: StalkTable,
    pub strata: Vec<StratumParity>,
    /// Stalks and costalks all concentrated in one common parity.
    pub even: bool,
    pub odd: bool,
}

impl ParityReport {
    pub fn is_parity(&self) -> bool {
        self.even || self.odd
    }
}

pub fn parity_report<R: Ring>(f: &InjComplex<R>, strat: &Stratification) -> ParityReport {
    let table = StalkTable::new(f, strat);
    let strata: Vec<StratumParity> = table
        .rows
        .iter()
        .map(|r| StratumParity { stratum: r.stratum, stalk: Parity::of(&r.stalk), costalk: Parity::of(&r.costalk) })
        .collect();
    let all = |p: Parity| strata.iter().all(|s| s.stalk.agrees(p) && s.costalk.agrees(p));
    let (even, odd) = (all(Parity::Even), all(Parity::Odd));
    ParityReport { table, strata, even, odd }
}

/// Range of shifts `s` with stalk degrees `≤ s - d_S` and point costalk
/// degrees `≥ s + d_S` on every stratum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerversityReport {
    pub table: StalkTable,
    pub lower: Option<i32>,
    pub upper: Option<i32>,
    /// The smallest admissible shift.
    pub shift: Option<i32>,
}

impl PerversityReport {
    pub fn is_perverse_up_to_shift(&self) -> bool {
        self.shift.is_some()
    }
}

pub fn perversity_report<R: Ring>(f: &InjComplex<R>, strat: &Stratification) -> PerversityReport {
    let table = StalkTable::new(f, strat);
    let mut lower: Option<i32> = None;
    let mut upper: Option<i32> = None;
    for r in &table.rows {
        let d = r.complex_dim as i32;
        if let Some(&top) = r.stalk.degrees().last() {
            lower = Some(lower.map_or(top + d, |l| l.max(top + d)));
        }
        if let Some(&bottom) = r.costalk.degrees().first() {
            upper = Some(upper.map_or(bottom - d, |u| u.min(bottom - d)));
        }
    }
    let shift = match (lower, upper) {
        (Some(l), Some(u)) if l <= u => Some(l),
        (Some(l), None) => Some(l),
        (None, Some(u)) => Some(u),
        (None, None) => Some(0),
        _ => None,
    };
    PerversityReport { table, lower, upper, shift }
}

/// The extension is not perverse for any shift, so no resolution of the
/// space is semismall.
pub fn semismall_obstruction<R: Ring>(e: &InjComplex<R>, strat: &Stratification) -> bool {
    !perversity_report(e, strat).is_perverse_up_to_shift()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StalkBoundReport {
    pub holds: bool,
    /// `(stratum, degree, extension rank, fibre rank)` where the bound fails.
    pub violations: Vec<(usize, i32, usize, usize)>,
    /// Per stratum: whether the bound is an equality in every degree.
    pub equal: Vec<bool>,
}

/// Checks per stratum and degree that the stalks of `e` are bounded by a
/// fibre cohomology table (the stalks of the pushforward it came from).
pub fn stalk_bound_check<R: Ring>(e: &InjComplex<R>, fibre: &StalkTable) -> Result<StalkBoundReport> {
    let k: &CellComplex = e.space();
    let mut violations = Vec::new();
    let mut equal = Vec::new();
    for row in &fibre.rows {
        if row.cell >= k.len() {
            return Err(Error::ShapeMismatch(format!("cell {} is not in the space", row.cell)));
        }
        let a = e.stalk(row.cell);
        let mut degrees: Vec<i32> = a.degrees();
        degrees.extend(row.stalk.degrees());
        degrees.sort_unstable();
        degrees.dedup();
        for &n in &degrees {
            if a.dim(n) > row.stalk.dim(n) {
                violations.push((row.stratum, n, a.dim(n), row.stalk.dim(n)));
            }
        }
        equal.push(a.dims() == row.stalk.dims());
    }
    Ok(StalkBoundReport { holds: violations.is_empty(), violations, equal })
}
