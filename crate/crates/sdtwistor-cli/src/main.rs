//! Batch front end: eigenvalue tables, full verification reports, disk
//! dumps, admissibility, monopole dumps and ASD checks.

mod commands;
mod config;
mod error;
mod report;

use clap::{Parser, Subcommand};
use config::{Overrides, RunConfig};
use error::CliError;
use report::OutDir;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sdtwistor", version, about = "Verification pipeline for de Sitter monopoles and their disk families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration (schema "sdtwistor.run/v1"); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for reports and tables.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Random seed for sample points (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Band limit L (overrides the config).
    #[arg(long, global = true)]
    band_limit: Option<usize>,
    /// Multiplier applied to every tolerance (overrides the config).
    #[arg(long, global = true)]
    tolerance_scale: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Eigenvalue table of the hemisphere and Funk transforms.
    Eigen,
    /// Run every residual check on the configured generator.
    Verify,
    /// Disk boundary dumps, membership residuals and projection plot data.
    Disks,
    /// Admissibility margin and non-admissibility witness.
    Admissible,
    /// Harmonic coefficients of V and f on a time grid.
    MonopoleDump,
    /// Self-dual Weyl residuals at sample points.
    AsdCheck,
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let o = Overrides { seed: cli.seed, band_limit: cli.band_limit, tolerance_scale: cli.tolerance_scale };
    let cfg = RunConfig::load(cli.config.as_deref(), &o)?;
    let out = OutDir::create(&cli.out)?;
    match cli.command {
        Command::Eigen => commands::eigen(&cfg, &out),
        Command::Verify => commands::verify(&cfg, &out),
        Command::Disks => commands::disks(&cfg, &out),
        Command::Admissible => commands::admissible(&cfg, &out),
        Command::MonopoleDump => commands::monopole_dump(&cfg, &out),
        Command::AsdCheck => commands::asd_check(&cfg, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed; see the report in {}", cli.out.display());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
