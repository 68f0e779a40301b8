//! `habwave` — spreading speeds, fronts, and stationary states for
//! growth–dispersal dynamics on heterogeneous habitats.
//!
//! Every subcommand reads a TOML configuration, writes its artifacts plus a
//! `manifest.json` into the output directory, and exits with code 0 when all
//! requested work passed, 1 when a diagnostic ran and failed, 2 when the
//! evidence was inconclusive (for example, a requested window never
//! intersected the grid), and 3 on configuration or hypothesis errors.

mod commands;
mod config;
mod manifest;
mod svg;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "habwave",
    version,
    about = "Growth-dispersal dynamics on heterogeneous habitats"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write SVG plots (CSV stays authoritative).
    #[arg(long)]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Spreading speeds of the linearized dynamics, with decay certificates.
    Speed(CommonArgs),
    /// Iterate the evolution operator and evaluate the configured diagnostics.
    Simulate(CommonArgs),
    /// Monotone descent to a stationary state below a cap.
    FixedPoint {
        #[command(flatten)]
        args: CommonArgs,
        /// Certify nonexistence of nontrivial stationary states instead.
        #[arg(long)]
        refute: bool,
    },
    /// Built-in habitat whose leftward speed retreats yet a stationary pulse survives.
    Counterexample {
        /// Optional TOML configuration (grid and tolerance overrides).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (created if missing).
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write SVG plots.
        #[arg(long)]
        svg: bool,
    },
    /// Run the internal cross-validation checks.
    Check {
        /// Output directory for the check report (created if missing).
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Execute the runs of a sweep file in parallel, one directory per run.
    Sweep {
        /// Sweep TOML file with one [[runs]] table per job.
        #[arg(long)]
        config: PathBuf,
        /// Parent output directory; each run writes to <out>/<name>.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads (default: one per core).
        #[arg(long)]
        jobs: Option<usize>,
        /// Also write SVG plots.
        #[arg(long)]
        svg: bool,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(status) => std::process::exit(status.exit_code()),
        Err(e) => {
            eprintln!("habwave: {e}");
            std::process::exit(3);
        }
    }
}

fn run(cli: Cli) -> habwave_core::Result<manifest::Status> {
    match cli.command {
        Command::Speed(args) => {
            let cfg = RunConfig::load(&args.config)?;
            commands::run_speed(&cfg, &args.out, args.svg)
        }
        Command::Simulate(args) => {
            let cfg = RunConfig::load(&args.config)?;
            commands::run_simulate(&cfg, &args.out, args.svg)
        }
        Command::FixedPoint { args, refute } => {
            let cfg = RunConfig::load(&args.config)?;
            commands::run_fixed_point(&cfg, &args.out, args.svg, refute)
        }
        Command::Counterexample { config, out, svg } => {
            let cfg = match &config {
                Some(path) => Some(RunConfig::load(path)?),
                None => None,
            };
            commands::run_counterexample(cfg.as_ref(), &out, svg)
        }
        Command::Check { out } => commands::run_check(&out),
        Command::Sweep { config, out, jobs, svg } => {
            commands::run_sweep(&config, &out, jobs, svg)
        }
    }
}
