use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use mimofade::output::{emit, Format};
use mimofade::scenario::{Scenario, BUNDLED};
use mimofade::tables::{self, InfoUnit};
use mimofade::validation::run_validation;

/// Second-order statistics of MIMO Rayleigh eigen-channels and mutual
/// information, with a Monte Carlo validator.
#[derive(Parser)]
#[command(name = "mimofade", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario TOML file or bundled scenario name.
    #[arg(long, default_value = "iso-4x4")]
    scenario: String,
    /// Directory for output files; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the simulated path length.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EigenTable {
    Corr,
    Level,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ImiTable {
    Corr,
    Moments,
    Level,
}

#[derive(Subcommand)]
enum Command {
    /// Subchannel correlation ρ_h over the scenario lags.
    ChannelCorr(Common),
    /// Eigen-channel correlation and level-crossing tables.
    EigenStats {
        #[command(flatten)]
        common: Common,
        /// Only this table; all tables if omitted.
        #[arg(long, value_enum)]
        table: Option<EigenTable>,
    },
    /// Mutual-information correlation, moments and level-crossing tables.
    ImiStats {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        table: Option<ImiTable>,
        /// Report means, variances and thresholds in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// High-SNR Taylor coefficients and largest low/high-SNR gaps.
    Table1 {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Simulate the scenario and compare every analytic quantity against it.
    /// Exits with status 1 if any asserted comparison fails.
    Validate(Common),
    /// Print a bundled scenario as TOML, or list them.
    Scenario { name: Option<String> },
}

fn load(c: &Common) -> anyhow::Result<Scenario> {
    let mut s = Scenario::load(&c.scenario)?;
    if let Some(seed) = c.seed {
        s.seed = seed;
    }
    if let Some(n) = c.samples {
        s.samples = n;
        // Round-trip through the checker so bad overrides are reported.
        s = Scenario::from_toml(&s.to_toml()?)?;
    }
    Ok(s)
}

fn note(path: Option<PathBuf>) {
    if let Some(p) = path {
        eprintln!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::ChannelCorr(c) => {
            let s = load(&c)?;
            note(emit(&tables::channel_corr(&s)?, "channel_corr", c.out.as_deref(), c.format)?);
        }
        Command::EigenStats { common: c, table } => {
            let s = load(&c)?;
            let dir = c.out.as_deref();
            if table != Some(EigenTable::Level) {
                note(emit(&tables::eigen_corr_table(&s)?, "eigen_corr", dir, c.format)?);
            }
            if table != Some(EigenTable::Corr) {
                note(emit(&tables::eigen_level_table(&s)?, "eigen_level", dir, c.format)?);
            }
        }
        Command::ImiStats { common: c, table, bits } => {
            let s = load(&c)?;
            let dir = c.out.as_deref();
            let unit = if bits { InfoUnit::Bits } else { InfoUnit::Nats };
            let want = |t| table.is_none() || table == Some(t);
            if want(ImiTable::Corr) {
                note(emit(&tables::imi_corr_table(&s)?, "imi_corr", dir, c.format)?);
            }
            if want(ImiTable::Moments) {
                note(emit(&tables::imi_moments_table(&s, unit)?, "imi_moments", dir, c.format)?);
            }
            if want(ImiTable::Level) {
                note(emit(&tables::imi_level_table(&s, unit)?, "imi_level", dir, c.format)?);
            }
        }
        Command::Table1 { out, format } => {
            note(emit(&tables::table1()?, "table1", out.as_deref(), format)?);
        }
        Command::Validate(c) => {
            let s = load(&c)?;
            let (report, secs) = run_validation(&s)?;
            note(emit(&report.entries, "validation", c.out.as_deref(), c.format)?);
            let failed: Vec<_> = report.failures().map(|e| e.id.as_str()).collect();
            eprintln!(
                "{}: {} entries, {} asserted failures, {:.1} s",
                report.scenario,
                report.entries.len(),
                failed.len(),
                secs
            );
            if !failed.is_empty() {
                eprintln!("failed: {}", failed.join(", "));
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Scenario { name: None } => {
            for (n, _) in BUNDLED {
                println!("{n}");
            }
        }
        Command::Scenario { name: Some(n) } => {
            let (_, text) = BUNDLED.iter().find(|(b, _)| *b == n).with_context(|| format!("no bundled scenario `{n}`"))?;
            print!("{text}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
