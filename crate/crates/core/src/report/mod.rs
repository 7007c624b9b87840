//! Versioned JSON and plain-text reports of pipeline runs.
//!
//! Reports contain no timestamps or paths beyond what the run
//! configuration names, so identical configurations give byte-identical
//! output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cellposet::{OpenSet, Stratification};
use crate::error::Result;
use crate::geomext::{ExtensionCertificates, GeometricExtension, StalkTable};
use crate::ksengine::Decomposition;
use crate::ring::{CoefficientSpec, Ring};

mod run;
pub use run::{run, COMMANDS};

pub const SCHEMA_VERSION: u32 = 1;

/// Everything that determines a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Canonical coefficient spec: `Q`, `F<p>` or `Z/<p^k>`.
    pub coeffs: String,
    pub seed: u64,
    pub subdivision_bound: usize,
    /// Truncation convention of the intersection complex.
    pub ic_truncation: String,
    pub fixture: String,
    pub strat: Option<String>,
    pub out: Option<String>,
    /// Subcommand options, by name.
    #[serde(default)]
    pub options: BTreeMap<String, String>,
}

pub const IC_TRUNCATION: &str = "stalk degrees below complex codimension";

impl RunConfig {
    pub fn new(coeffs: &str, fixture: &str) -> Result<Self> {
        let spec: CoefficientSpec = coeffs.parse()?;
        Ok(RunConfig {
            coeffs: spec.to_string(),
            seed: 0,
            subdivision_bound: 4,
            ic_truncation: IC_TRUNCATION.into(),
            fixture: fixture.into(),
            strat: None,
            out: None,
            options: BTreeMap::new(),
        })
    }

    pub fn spec(&self) -> Result<CoefficientSpec> {
        self.coeffs.parse()
    }
}

/// Outcome class of a run; maps to the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Undecided,
    CertificateFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::CertificateFailure => 2,
            Status::Undecided => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummandReport {
    pub stalk_table: StalkTable,
    pub support: Vec<usize>,
    pub support_closed: bool,
    pub certificate: String,
    /// Whether the summand meets the declared open set.
    pub dense: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub summand_count: usize,
    pub sum_is_identity: bool,
    pub orthogonal: bool,
    pub undecided: bool,
    pub summands: Vec<SummandReport>,
}

impl DecompositionReport {
    pub fn new<R: Ring>(d: &Decomposition<R>, strat: &Stratification, open: Option<&OpenSet>) -> Self {
        let summands = d
            .summands
            .iter()
            .map(|s| SummandReport {
                stalk_table: StalkTable::new(&s.complex, strat),
                support: s.support.clone(),
                support_closed: s.support_closed,
                certificate: format!("{:?}", s.certificate),
                dense: open.map(|u| s.meets(u)),
            })
            .collect();
        DecompositionReport {
            summand_count: d.len(),
            sum_is_identity: d.sum_is_identity,
            orthogonal: d.orthogonal,
            undecided: d.undecided,
            summands,
        }
    }

    pub fn status(&self) -> Status {
        if !self.sum_is_identity || !self.orthogonal {
            Status::CertificateFailure
        } else if self.undecided {
            Status::Undecided
        } else {
            Status::Ok
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionReport {
    pub provenance: String,
    pub stalk_table: StalkTable,
    pub support: Vec<usize>,
    pub certificates: ExtensionCertificates,
    pub dense_summands: Vec<usize>,
    pub lower_summands: Vec<usize>,
}

impl ExtensionReport {
    pub fn new<R: Ring>(e: &GeometricExtension<R>, strat: &Stratification) -> Self {
        ExtensionReport {
            provenance: e.provenance.clone(),
            stalk_table: StalkTable::new(e.complex(), strat),
            support: e.summand().support.clone(),
            certificates: e.certificates.clone(),
            dense_summands: e.dense.kept.clone(),
            lower_summands: e.dense.discarded.clone(),
        }
    }

    pub fn status(&self) -> Status {
        let c = &self.certificates;
        if c.undecided {
            Status::Undecided
        } else if c.all_hold() {
            Status::Ok
        } else {
            Status::CertificateFailure
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionReport>,
    pub tables: BTreeMap<String, StalkTable>,
    pub verdicts: BTreeMap<String, serde_json::Value>,
    /// Human-readable evidence for failed or undecided checks.
    pub witnesses: Vec<String>,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config: config.clone(),
            status: Status::Ok,
            extension: None,
            decomposition: None,
            tables: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            witnesses: Vec::new(),
        }
    }

    /// Raises the status to at least `s`.
    pub fn escalate(&mut self, s: Status) {
        self.status = self.status.max(s);
    }

    pub fn verdict(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("serializable verdict");
        self.verdicts.insert(name.into(), v);
    }

    /// Records a boolean check, escalating on failure.
    pub fn check(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> String) {
        self.verdict(name, ok);
        if !ok {
            self.witnesses.push(format!("{name}: {}", witness()));
            self.escalate(Status::CertificateFailure);
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable report");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(out, "{} on {} over {} (seed {})", self.command, c.fixture, c.coeffs, c.seed);
        let _ = writeln!(out, "status: {:?}", self.status);
        if let Some(e) = &self.extension {
            let _ = writeln!(out, "\nextension from {}", e.provenance);
            out.push_str(&render_table(&e.stalk_table));
            let _ = writeln!(out, "support: {} cells", e.support.len());
            let _ = writeln!(out, "certificates: {:?}", e.certificates);
            if !e.lower_summands.is_empty() {
                let _ = writeln!(out, "lower-stratum summands: {:?}", e.lower_summands);
            }
        }
        if let Some(d) = &self.decomposition {
            let _ = writeln!(out, "\n{} summands", d.summand_count);
            for (i, s) in d.summands.iter().enumerate() {
                let dense = match s.dense {
                    Some(true) => ", dense",
                    Some(false) => ", off the open set",
                    None => "",
                };
                let _ = writeln!(
                    out,
                    "\nsummand {i}: {} support cells{}{}, {}",
                    s.support.len(),
                    if s.support_closed { ", closed" } else { "" },
                    dense,
                    s.certificate
                );
                out.push_str(&render_table(&s.stalk_table));
            }
        }
        for (name, t) in &self.tables {
            let _ = writeln!(out, "\n{name}");
            out.push_str(&render_table(t));
        }
        if !self.verdicts.is_empty() {
            out.push('\n');
            for (k, v) in &self.verdicts {
                let _ = writeln!(out, "{k}: {v}");
            }
        }
        for w in &self.witnesses {
            let _ = writeln!(out, "witness: {w}");
        }
        out
    }
}

/// Strata as rows and degrees as columns, stalks then costalks.
pub fn render_table(t: &StalkTable) -> String {
    let degrees: Vec<i32> = {
        let mut d: Vec<i32> = t.rows.iter().flat_map(|r| r.stalk.degrees().into_iter().chain(r.costalk.degrees())).collect();
        d.sort_unstable();
        d.dedup();
        match (d.first(), d.last()) {
            (Some(&a), Some(&b)) => (a.min(0)..=b).collect(),
            _ => vec![0],
        }
    };
    let mut out = String::new();
    let head: Vec<String> = degrees.iter().map(|n| format!("{n:>3}")).collect();
    let _ = writeln!(out, "  stratum  cell  dim | stalk {} | costalk {}", head.join(""), head.join(""));
    for r in &t.rows {
        let s: Vec<String> = degrees.iter().map(|&n| format!("{:>3}", r.stalk.dim(n))).collect();
        let c: Vec<String> = degrees.iter().map(|&n| format!("{:>3}", r.costalk.dim(n))).collect();
        let _ = writeln!(
            out,
            "  {:>7} {:>5} {:>4} |       {} |         {}",
            r.stratum,
            r.cell,
            r.complex_dim,
            s.join(""),
            c.join("")
        );
    }
    out
}
