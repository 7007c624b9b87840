use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use geomext::cellposet::Stratification;
use geomext::report::{Report, RunConfig};

#[derive(Parser)]
#[command(name = "geomext", version, about = "Pushforwards, decompositions and geometric extensions on finite cell complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Coefficients: Q, F<p> or Z/<p^k>.
    #[arg(long, default_value = "F2")]
    coeffs: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixture expression, e.g. cone(rp3).
    #[arg(long)]
    fixture: String,
    /// Stratification JSON file; defaults to the fixture's own.
    #[arg(long)]
    strat: Option<PathBuf>,
    /// Directory for <command>.json and <command>.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    subdivision_bound: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Derived pushforward of the constant sheaf along the fixture map.
    Pushforward {
        #[command(flatten)]
        common: Common,
        /// Use the n-th resolution instead of the fixture map.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Krull-Schmidt decomposition of the pushforward.
    Decompose {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Geometric extension along a resolution of the fixture.
    Geomext {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        resolution: usize,
    },
    /// Intersection complex by pushforward and truncation.
    Ic {
        #[command(flatten)]
        common: Common,
    },
    /// Compares the extensions of two resolutions of the fixture.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        first: usize,
        #[arg(long, default_value_t = 1)]
        second: usize,
    },
    /// Verdier duality checks on the constant sheaf and the pushforward.
    Dualize {
        #[command(flatten)]
        common: Common,
    },
    /// Monodromy of a cohomology sheaf of the pushforward around a cycle.
    Monodromy {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        degree: i32,
        /// Comma-separated cells alternating vertex, edge; defaults to the
        /// boundary of the disk for family fixtures.
        #[arg(long)]
        cycle: Option<String>,
        #[arg(long, default_value_t = 0)]
        resolution: usize,
    },
    /// Extension, diagnostics and stalk bounds for every resolution.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Pushforward { .. } => "pushforward",
            Command::Decompose { .. } => "decompose",
            Command::Geomext { .. } => "geomext",
            Command::Ic { .. } => "ic",
            Command::Compare { .. } => "compare",
            Command::Dualize { .. } => "dualize",
            Command::Monodromy { .. } => "monodromy",
            Command::Report { .. } => "report",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Pushforward { common, .. }
            | Command::Decompose { common, .. }
            | Command::Geomext { common, .. }
            | Command::Ic { common }
            | Command::Compare { common, .. }
            | Command::Dualize { common }
            | Command::Monodromy { common, .. }
            | Command::Report { common } => common,
        }
    }

    fn options(&self) -> Vec<(&'static str, String)> {
        match self {
            Command::Pushforward { resolution, .. } | Command::Decompose { resolution, .. } => {
                resolution.iter().map(|r| ("resolution", r.to_string())).collect()
            }
            Command::Geomext { resolution, .. } => vec![("resolution", resolution.to_string())],
            Command::Compare { first, second, .. } => vec![("first", first.to_string()), ("second", second.to_string())],
            Command::Monodromy { degree, cycle, resolution, .. } => {
                let mut v = vec![("degree", degree.to_string()), ("resolution", resolution.to_string())];
                v.extend(cycle.iter().map(|c| ("cycle", c.clone())));
                v
            }
            _ => vec![],
        }
    }
}

fn run(cmd: &Command) -> Result<Report> {
    let c = cmd.common();
    let mut config = RunConfig::new(&c.coeffs, &c.fixture)?;
    config.seed = c.seed;
    config.subdivision_bound = c.subdivision_bound;
    config.strat = c.strat.as_ref().map(|p| p.display().to_string());
    config.out = c.out.as_ref().map(|p| p.display().to_string());
    config.options = cmd.options().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let strat = match &c.strat {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Some(serde_json::from_str::<Stratification>(&text)?)
        }
        None => None,
    };
    Ok(geomext::report::run(cmd.name(), &config, strat)?)
}

fn write_outputs(cmd: &Command, rep: &Report) -> Result<()> {
    if let Some(dir) = &cmd.common().out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.json", cmd.name())), rep.to_json())?;
        std::fs::write(dir.join(format!("{}.txt", cmd.name())), rep.to_text())?;
    }
    print!("{}", rep.to_text());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli.command).and_then(|rep| write_outputs(&cli.command, &rep).map(|_| rep)) {
        Ok(rep) => ExitCode::from(rep.status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
