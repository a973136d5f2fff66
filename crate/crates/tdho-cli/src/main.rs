//! Command-line front end: every experiment as a subcommand emitting CSV
//! (or JSON) for external plotting. Deterministic given a config; exit
//! code 0 only when all internal certificates pass.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;

use config::Config;

#[derive(Parser)]
#[command(
    name = "tdho",
    version,
    about = "Time-dependent harmonic oscillator experiments (angle-action solver)"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunArgs {
    /// Key-value config file (`key = value` lines, `#` comments)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override or add a config key, e.g. --set t1=30 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Output file (default: <subcommand>.csv in the working directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format where supported: csv | json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Grid resolution for map scans
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one run: oracle (q, p, psi, I) plus approximants and bounds
    Solve(RunArgs),
    /// Locate the interlaced zeros of q and q-dot with gap certificates
    Zeros(RunArgs),
    /// Stability chart over (omega_bar, eta) with the analytic boundary
    FloquetMap(RunArgs),
    /// Adiabatic end-to-end scaling of the action across a slow ramp
    Adiabatic(RunArgs),
    /// Cross-validate the monodromy trace against the angle-action route
    TraceCheck(RunArgs),
    /// Ermakov amplitude equation and exact-invariant drift report
    ErmakovCheck(RunArgs),
}

fn load(args: &RunArgs) -> Result<Config> {
    let mut cfg = match &args.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    cfg.apply_overrides(&args.sets)?;
    commands::prepare_out_dir(&args.out)?;
    Ok(cfg)
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Solve(a) => commands::cmd_solve(&load(a)?, &a.out, &a.format),
        Cmd::Zeros(a) => commands::cmd_zeros(&load(a)?, &a.out),
        Cmd::FloquetMap(a) => commands::cmd_floquet_map(&load(a)?, &a.out, a.resolution),
        Cmd::Adiabatic(a) => commands::cmd_adiabatic(&load(a)?, &a.out, &a.format),
        Cmd::TraceCheck(a) => commands::cmd_trace_check(&load(a)?, &a.out),
        Cmd::ErmakovCheck(a) => commands::cmd_ermakov_check(&load(a)?, &a.out),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2), // a certificate failed
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
