mod commands;
mod config;
mod output;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::Config;
use output::OutputDir;

/// Batch runner for heavy-quark SU(2) string-breaking simulations.
///
/// Every subcommand reads its section of an optional TOML config (missing
/// keys take their defaults; see `--dump-config`), writes CSV/JSON into the
/// output directory, and records a manifest with the resolved config and a
/// SHA-256 of each file.
#[derive(Debug, Parser)]
#[command(name = "stringbreak", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Vacuum energies of truncated and untruncated models over a (g, m) grid.
    Vacuum(Common),
    /// Optimizes the two ansatz angles over a range of lattice sizes.
    VqeScan(Common),
    /// Single-meson band and speed-of-light fit.
    Dispersion(Common),
    /// Trotter evolution of a string, with observables, P(n) and samples.
    Evolve(Common),
    /// Gate counts and CNOT depths under every counting convention.
    Compile(Common),
    /// Qubit-model spectrum against the projected fermion model.
    ReferenceCompare(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML config; sections are named after the subcommand with `_`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for independent runs (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed for measurement sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the resolved config section and exit.
    #[arg(long)]
    dump_config: bool,
}

fn dump<C: serde::Serialize>(section: &str, c: &C) -> Result<()> {
    let mut table = toml::Table::new();
    table.insert(section.into(), toml::Value::try_from(c)?);
    print!("{}", toml::to_string(&table)?);
    Ok(())
}

fn run(command: Command) -> Result<()> {
    let (name, section, common) = match &command {
        Command::Vacuum(c) => ("vacuum", "vacuum", c),
        Command::VqeScan(c) => ("vqe-scan", "vqe_scan", c),
        Command::Dispersion(c) => ("dispersion", "dispersion", c),
        Command::Evolve(c) => ("evolve", "evolve", c),
        Command::Compile(c) => ("compile", "compile", c),
        Command::ReferenceCompare(c) => ("reference-compare", "reference_compare", c),
    };
    let config = Config::load(common.config.as_deref())?;
    if common.dump_config {
        return match &command {
            Command::Vacuum(_) => dump(section, &config.vacuum),
            Command::VqeScan(_) => dump(section, &config.vqe_scan),
            Command::Dispersion(_) => dump(section, &config.dispersion),
            Command::Evolve(_) => dump(section, &config.evolve),
            Command::Compile(_) => dump(section, &config.compile),
            Command::ReferenceCompare(_) => dump(section, &config.reference_compare),
        };
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = common.jobs {
        anyhow::ensure!(j > 0, "--jobs must be positive");
        builder = builder.num_threads(j);
    }
    let pool = builder.build().context("starting worker pool")?;
    let mut out = OutputDir::create(&common.out)?;
    let seed = common.seed;
    pool.install(|| -> Result<()> {
        match &command {
            Command::Vacuum(_) => commands::vacuum(&config.vacuum, &mut out),
            Command::VqeScan(_) => commands::vqe_scan(&config.vqe_scan, &mut out),
            Command::Dispersion(_) => commands::dispersion(&config.dispersion, &mut out),
            Command::Evolve(_) => commands::evolve(&config.evolve, seed, &mut out),
            Command::Compile(_) => commands::compile(&config.compile, &mut out),
            Command::ReferenceCompare(_) => commands::reference_compare(&config.reference_compare, &mut out),
        }
    })
    .with_context(|| format!("{name} failed"))?;
    let manifest = match &command {
        Command::Vacuum(_) => out.finish(name, section, &config.vacuum, seed),
        Command::VqeScan(_) => out.finish(name, section, &config.vqe_scan, seed),
        Command::Dispersion(_) => out.finish(name, section, &config.dispersion, seed),
        Command::Evolve(_) => out.finish(name, section, &config.evolve, seed),
        Command::Compile(_) => out.finish(name, section, &config.compile, seed),
        Command::ReferenceCompare(_) => out.finish(name, section, &config.reference_compare, seed),
    }?;
    eprintln!("wrote {}", manifest.display());
    Ok(())
}

fn main() -> Result<()> {
    run(Cli::parse().command)
}
