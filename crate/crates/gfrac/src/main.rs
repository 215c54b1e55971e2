use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gfrac::cli::{cmd_lambda, cmd_solve, cmd_verify, parse_grid, RunConfig};

/// Radial solver and verification suite for a nonlocal Neumann problem
/// with Orlicz-type growth on the unit ball.
#[derive(Parser)]
#[command(name = "gfrac", version, about)]
struct Cli {
    /// JSON configuration file; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Young function, e.g. power:2, powerlog:2, doublepower:2,3,
    /// tabulated:<csv>.
    #[arg(long, global = true)]
    family: Option<String>,
    /// Grid override, e.g. N=2,s=0.5,M=32,E=8,Rout=4,Kang=32.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Nonlinearity exponent p > 2.
    #[arg(long, global = true)]
    p: Option<f64>,
    /// RNG seed for all randomized pieces.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for reports and profiles.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a property suite and write an itemized JSON summary.
    Verify {
        /// One of: young, grid, modular, cone, radial, all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Mountain-pass solve with fixed-point cross-check and certificate.
    Solve,
    /// Constrained infimum Λ and the nonconstancy threshold verdict.
    Lambda,
}

fn build_run_config(cli: &Cli) -> gfrac::Result<RunConfig> {
    let mut run = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(f) = &cli.family {
        run.family = f.clone();
    }
    if let Some(g) = &cli.grid {
        run.grid = parse_grid(g, run.grid)?;
    }
    if let Some(p) = cli.p {
        run.p = p;
    }
    if let Some(seed) = cli.seed {
        run.seed = seed;
    }
    Ok(run)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_run_config(&cli).and_then(|run| match &cli.command {
        Command::Verify { suite } => cmd_verify(suite, &run, &cli.out),
        Command::Solve => cmd_solve(&run, &cli.out),
        Command::Lambda => cmd_lambda(&run, &cli.out),
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
