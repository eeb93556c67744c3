//! `levsim`: self-trapped levitated-nanosphere optomechanics from the command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::CliError;
use output::Outputs;

#[derive(Parser)]
#[command(name = "levsim", version, about)]
struct Cli {
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration (a `.meta.json` sidecar is also accepted).
    #[arg(short, long)]
    config: PathBuf,
    /// Directory receiving the output files.
    #[arg(short, long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// List every equilibrium at the operating point.
    Equilibrium(Common),
    /// Cooling-rate and phonon-number map over the `grid` section.
    Map(Common),
    /// Displacement spectrum at the operating point.
    Spectrum(Common),
    /// One-dimensional sweep described by the `sweep` section.
    Sweep(Common),
    /// Stable-equilibrium count and bistability locus over the `grid` section.
    Bistability(Common),
    /// Fit a thermal Lorentzian to a measured time series.
    Fitpsd(Common),
    /// Coupling, trap frequency and `g~` against sphere radius.
    Sphere(Common),
}

impl Command {
    fn parts(&self) -> (&'static str, &Common) {
        match self {
            Command::Equilibrium(c) => ("equilibrium", c),
            Command::Map(c) => ("map", c),
            Command::Spectrum(c) => ("spectrum", c),
            Command::Sweep(c) => ("sweep", c),
            Command::Bistability(c) => ("bistability", c),
            Command::Fitpsd(c) => ("fitpsd", c),
            Command::Sphere(c) => ("sphere", c),
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("`--threads` must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let (name, common) = cli.command.parts();
    let cfg = RunConfig::load(&common.config)?;
    let mut out = Outputs::new(&common.out)?;
    let summary = match &cli.command {
        Command::Equilibrium(_) => commands::equilibrium(&cfg, &mut out)?,
        Command::Map(_) => commands::map(&cfg, &mut out)?,
        Command::Spectrum(_) => commands::spectrum(&cfg, &mut out)?,
        Command::Sweep(_) => commands::sweep(&cfg, &mut out)?,
        Command::Bistability(_) => commands::bistability(&cfg, &mut out)?,
        Command::Fitpsd(_) => commands::fitpsd(&cfg, &mut out)?,
        Command::Sphere(_) => commands::sphere(&cfg, &mut out)?,
    };
    out.finish(&cfg, name)?;
    commands::print(&summary)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("levsim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
