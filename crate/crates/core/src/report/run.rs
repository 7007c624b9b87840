use crate::cellposet::build::subdivide_map;
use crate::cellposet::{CellularMap, OpenSet, Stratification};
use crate::error::{Error, Result};
use crate::fixtures::i2::boundary_cycle;
use crate::fixtures::resolution::identity_resolution;
use crate::fixtures::{validated_fixture, Fixture};
use crate::geomext::{
    compare_resolutions, condition_d_check, deligne_ic, geometric_extension, monodromy, parity_report,
    perversity_report, semismall_obstruction, stalk_bound_check, ResolutionSpec, StalkTable,
};
use crate::ksengine::{decompose_with, iso_test, IsoResult, KsRing};
use crate::sixfunctors::{constant_sheaf, dualizing_complex, pushforward_constant};

use super::{DecompositionReport, ExtensionReport, Report, RunConfig, Status};

pub const COMMANDS: &[&str] = &["pushforward", "decompose", "geomext", "ic", "compare", "dualize", "monodromy", "report"];

struct Run<'a> {
    config: &'a RunConfig,
    fixture: Fixture,
    strat: Stratification,
}

impl Run<'_> {
    fn option<T: std::str::FromStr>(&self, name: &str, default: T) -> Result<T> {
        match self.config.options.get(name) {
            Some(v) => v.parse().map_err(|_| Error::Format(format!("bad value {v:?} for {name}"))),
            None => Ok(default),
        }
    }

    fn resolution(&self, i: usize) -> Result<ResolutionSpec> {
        let fallback;
        let r = match self.fixture.resolutions.get(i) {
            Some(r) => r,
            None if i == 0 && self.fixture.resolutions.is_empty() => {
                fallback = identity_resolution(&self.fixture.complex);
                &fallback
            }
            None => {
                return Err(Error::Precondition(format!(
                    "{} has {} resolutions",
                    self.config.fixture,
                    self.fixture.resolutions.len()
                )))
            }
        };
        let mut spec = ResolutionSpec::from_fixture(r);
        spec.map = subdivide_map(&spec.map, self.config.subdivision_bound)?;
        Ok(spec)
    }

    /// The map pushed forward: the chosen resolution, else the fixture map,
    /// else the first resolution, else the identity.
    fn map(&self) -> Result<(CellularMap, Option<OpenSet>)> {
        if self.config.options.contains_key("resolution") {
            let s = self.resolution(self.option("resolution", 0)?)?;
            return Ok((s.map, Some(s.open)));
        }
        match &self.fixture.map {
            Some(m) => Ok((subdivide_map(m, self.config.subdivision_bound)?, None)),
            None => {
                let s = self.resolution(0)?;
                Ok((s.map, Some(s.open)))
            }
        }
    }

    fn fallback_map(&self) -> Result<(CellularMap, Option<OpenSet>)> {
        match &self.fixture.map {
            Some(m) => Ok((subdivide_map(m, self.config.subdivision_bound)?, None)),
            None => Err(Error::Precondition(format!("{} has no map", self.config.fixture))),
        }
    }
}

/// Runs one pipeline on the configured fixture. `strat` overrides the
/// fixture's own stratification.
pub fn run(command: &str, config: &RunConfig, strat: Option<Stratification>) -> Result<Report> {
    let fixture = validated_fixture(&config.fixture)?;
    let strat = match strat {
        Some(s) => {
            s.validate(&fixture.complex)?;
            s
        }
        None => fixture.strat.clone(),
    };
    let r = Run { config, fixture, strat };
    crate::with_ring!(config.spec()?, |ring| pipeline(command, &r, &ring))
}

fn pipeline<R: KsRing>(command: &str, r: &Run, ring: &R) -> Result<Report> {
    let mut rep = Report::new(command, r.config);
    let seed = r.config.seed;
    match command {
        "pushforward" => {
            let (map, _) = r.map()?;
            let p = pushforward_constant(ring, &map)?;
            rep.tables.insert("pushforward".into(), StalkTable::new(&p, &r.strat));
            rep.verdict("hypercohomology", p.hypercohomology());
            rep.verdict("source_cells", map.source().len());
        }
        "decompose" => {
            let (map, open) = r.map()?;
            let p = pushforward_constant(ring, &map)?;
            let d = decompose_with(&p, seed)?;
            let dr = DecompositionReport::new(&d, &r.strat, open.as_ref());
            rep.escalate(dr.status());
            rep.decomposition = Some(dr);
        }
        "geomext" => {
            let e = geometric_extension(&r.resolution(r.option("resolution", 0)?)?, ring, seed)?;
            let er = ExtensionReport::new(&e, &r.strat);
            rep.escalate(er.status());
            rep.verdict("summand_count", e.decomposition.len());
            rep.verdict("geom_cohomology", e.complex().hypercohomology());
            rep.extension = Some(er);
        }
        "ic" => {
            let ic = deligne_ic(ring, &r.fixture.complex, &r.strat)?;
            rep.tables.insert("ic".into(), StalkTable::new(&ic, &r.strat));
            let par = parity_report(&ic, &r.strat);
            rep.verdict("parity", (par.even, par.odd));
            rep.verdict("perverse_shift", perversity_report(&ic, &r.strat).shift);
        }
        "compare" => {
            let a = r.resolution(r.option("first", 0)?)?;
            let b = r.resolution(r.option("second", 1)?)?;
            let c = compare_resolutions(&a, &b, ring, seed)?;
            rep.verdict("first", &c.first.provenance);
            rep.verdict("second", &c.second.provenance);
            rep.tables.insert("first".into(), StalkTable::new(c.first.complex(), &r.strat));
            rep.tables.insert("second".into(), StalkTable::new(c.second.complex(), &r.strat));
            match &c.verdict {
                IsoResult::Isomorphic { .. } => rep.verdict("verdict", "isomorphic"),
                IsoResult::Distinct(w) => {
                    rep.verdict("verdict", "distinct");
                    rep.witnesses.push(w.clone());
                    rep.escalate(Status::CertificateFailure);
                }
                IsoResult::Undecided(w) => {
                    rep.verdict("verdict", "undecided");
                    rep.witnesses.push(w.clone());
                    rep.escalate(Status::Undecided);
                }
            }
            if let Some(t) = c.triangle_commutes {
                rep.check("unit_triangle", t, || "composite of units is null-homotopic".into());
            }
        }
        "dualize" => {
            let k = &r.fixture.complex;
            let one = constant_sheaf(ring, k);
            let omega = dualizing_complex(ring, k).minimize();
            let d_one = one.dual().minimize();
            rep.check("dual_of_constant_is_dualizing", iso_test(&d_one, &omega)?.is_iso(), || "D(1) vs omega".into());
            rep.check("double_dual_of_constant", iso_test(&d_one.dual().minimize(), &one)?.is_iso(), || {
                "DD(1) vs 1".into()
            });
            let (map, _) = r.map()?;
            let p = pushforward_constant(ring, &map)?;
            let dd = p.dual().minimize().dual().minimize();
            rep.check("double_dual_of_pushforward", iso_test(&dd, &p)?.is_iso(), || "DD(P) vs P".into());
            rep.tables.insert("dual_of_constant".into(), StalkTable::new(&d_one, &r.strat));
        }
        "monodromy" => {
            let (map, _) = r.map().or_else(|_| r.fallback_map())?;
            let p = pushforward_constant(ring, &map)?;
            let cells: Vec<usize> = match r.config.options.get("cycle") {
                Some(s) => s
                    .split(',')
                    .map(|x| x.trim().parse().map_err(|_| Error::Format(format!("bad cell {x:?}"))))
                    .collect::<Result<_>>()?,
                None if r.fixture.marked.contains_key("centre") => boundary_cycle(&r.fixture.complex),
                None => return Err(Error::Precondition(format!("a cycle is required for {}", r.config.fixture))),
            };
            let m = monodromy(&p, &cells, r.option("degree", 1)?)?;
            rep.verdict("cycle", &cells);
            rep.verdict("trivial", m.is_trivial());
            rep.verdict("canonical_form", m.canonical.rows());
            rep.verdict("invariant_factors", &m.canonical.invariant_factors);
            rep.verdict("canonical_method", m.canonical.method);
            if !m.canonical.certified {
                rep.witnesses.push("canonical form not certified".into());
                rep.escalate(Status::Undecided);
            }
        }
        "report" => {
            for i in 0..r.fixture.resolutions.len().max(1) {
                let spec = r.resolution(i)?;
                let e = geometric_extension(&spec, ring, seed)?;
                let er = ExtensionReport::new(&e, &r.strat);
                rep.escalate(er.status());
                let key = format!("resolution {i}: {}", spec.name);
                let fibre = StalkTable::new(&e.pushforward, &r.strat);
                let b = stalk_bound_check(e.complex(), &fibre)?;
                rep.check(&format!("{key}: stalk bound"), b.holds, || format!("{:?}", b.violations));
                let par = parity_report(e.complex(), &r.strat);
                rep.verdict(&format!("{key}: parity"), (par.even, par.odd));
                rep.verdict(&format!("{key}: perverse shift"), perversity_report(e.complex(), &r.strat).shift);
                rep.verdict(&format!("{key}: semismall obstruction"), semismall_obstruction(e.complex(), &r.strat));
                if spec.smooth_proper {
                    let d = condition_d_check(&spec.map, &spec.open, ring, seed)?;
                    rep.check(&format!("{key}: dense supports"), d.holds, || format!("{:?}", d.violations));
                }
                rep.tables.insert(key, er.stalk_table.clone());
                if i == 0 {
                    rep.extension = Some(er);
                }
            }
        }
        other => return Err(Error::Precondition(format!("unknown command {other:?}; expected one of {COMMANDS:?}"))),
    }
    Ok(rep)
}
