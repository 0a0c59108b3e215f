use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use commands::{cmd_elliptic, cmd_optimize, cmd_sensitivity, cmd_validate, cmd_winkler, config_or_default, Output};
use config::RunConfig;

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

/// Contact models for thin elastic layers of variable thickness.
#[derive(Debug, Parser)]
#[command(name = "thinlayer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compressible layer: Winkler contact region, force and pressure field.
    Winkler(RunArgs),
    /// Incompressible bilayer: elliptic contact solution.
    Elliptic(RunArgs),
    /// Pressure and force variation caused by thickness variations.
    Sensitivity(RunArgs),
    /// Effective thicknesses under the available averaging weights.
    Optimize(RunArgs),
    /// Run the verification suite and print a pass/fail table.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Directory for JSON reports and CSV field dumps.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Lattice resolution, overriding `solver.grid`.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Optional config whose `[[layers]]` maps replace the shipped sample.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Coarse lattice `N` of the convergence pair `(N, 2N)`.
    #[arg(long)]
    grid: Option<usize>,
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("THINLAYER_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .with_context(|| format!("THINLAYER_THREADS = {v:?}: expected a positive integer"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run_single(args: &RunArgs, f: fn(&RunConfig, Option<usize>, &Output) -> Result<String>) -> Result<ExitCode> {
    let cfg = RunConfig::load(&args.config)?;
    let out = Output::new(args.out.clone())?;
    print!("{}", f(&cfg, args.grid, &out)?);
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads()?;
    match &cli.command {
        Command::Winkler(a) => run_single(a, cmd_winkler),
        Command::Elliptic(a) => run_single(a, cmd_elliptic),
        Command::Sensitivity(a) => run_single(a, cmd_sensitivity),
        Command::Optimize(a) => run_single(a, cmd_optimize),
        Command::Validate(a) => {
            let cfg = config_or_default(a.config.as_deref())?;
            let out = Output::new(a.out.clone())?;
            let report = cmd_validate(&cfg, a.grid, &out)?;
            for o in &report.outcomes {
                println!("{o}");
            }
            let total = report.outcomes.len();
            println!("{} of {total} criteria passed (lattices {}² and {}²)", total - report.failures(), report.cells, report.fine_cells);
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VALIDATION)
            })
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<thinlayer_core::Error>() {
        Some(thinlayer_core::Error::Solver { .. }) => EXIT_SOLVER,
        _ => EXIT_CONFIG,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
