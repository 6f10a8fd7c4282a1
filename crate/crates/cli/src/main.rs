//! Command-line front end for the two-mode lossy coupler.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage or configuration
//! error.

mod commands;
mod config;
mod output;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigOverlay, ExperimentConfig, RateValue};

#[derive(Parser)]
#[command(
    name = "lossy-coupler",
    version,
    about = "Exact evolution of two coupled decaying bosonic modes: coincidence experiments, loss sweeps, spectra, and cross-method validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coincidence rate vs distance by closed form, exact pipeline, RK4, and
    /// optionally Monte-Carlo trajectories
    CoincidenceScan(ScanOpts),
    /// Closed-form coincidence over a gamma_a/g grid (long CSV)
    SweepGamma(SweepOpts),
    /// Cross-method validation report (text; JSON with --output)
    Validate(ValidateOpts),
    /// Analytic eigenvalues with residuals (Jordan orders at the EP)
    EigenReport(CommonOpts),
}

#[derive(Args)]
struct CommonOpts {
    /// Flat `key = value` configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Coupling strength (inverse distance units)
    #[arg(long)]
    g: Option<f64>,
    /// Loss rate of mode a; plain number or multiple of g like `0.75*g`
    #[arg(long, value_parser = RateValue::parse)]
    gamma_a: Option<RateValue>,
    /// Loss rate of mode b; plain number or multiple of g like `0.75*g`
    #[arg(long, value_parser = RateValue::parse)]
    gamma_b: Option<RateValue>,
    /// Per-mode photon-number cutoff (>= 2)
    #[arg(long)]
    n_max: Option<usize>,
    /// Largest propagation distance (default pi/g)
    #[arg(long)]
    z_max: Option<f64>,
    /// Number of grid points over [0, z_max]
    #[arg(long)]
    z_points: Option<usize>,
    /// Master seed for trajectory sampling
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte-Carlo trajectories
    #[arg(long)]
    n_traj: Option<usize>,
}

#[derive(Args)]
struct ScanOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Add Monte-Carlo coincidence and standard-error columns
    #[arg(long)]
    with_mc: bool,
    /// Dump H_eff, U(z_max), R, R^-1 beside the output file
    #[arg(long)]
    dump: bool,
}

#[derive(Args)]
struct SweepOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Comma-separated gamma_a/g values (default 0 to 2.5 in steps of 0.05)
    #[arg(long)]
    gamma_a_values: Option<String>,
}

#[derive(Args)]
struct ValidateOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Test hook: scale every tolerance to zero so checks fail
    #[arg(long, hide = true)]
    corrupt_tolerances: bool,
}

fn resolve_config(opts: &CommonOpts) -> Result<ExperimentConfig, String> {
    let file_overlay = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config '{}': {e}", path.display()))?;
            ConfigOverlay::parse_file(&text)
                .map_err(|e| format!("config '{}': {e}", path.display()))?
        }
        None => ConfigOverlay::default(),
    };
    let flag_overlay = ConfigOverlay {
        g: opts.g,
        gamma_a: opts.gamma_a,
        gamma_b: opts.gamma_b,
        n_max: opts.n_max,
        z_max: opts.z_max,
        z_points: opts.z_points,
        seed: opts.seed,
        n_traj: opts.n_traj,
        output_path: opts.output.clone(),
    };
    flag_overlay.over(file_overlay).resolve()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::CoincidenceScan(opts) => resolve_config(&opts.common)
            .and_then(|cfg| commands::scan::run(&cfg, opts.with_mc, opts.dump).map(|()| true)),
        Command::SweepGamma(opts) => resolve_config(&opts.common).and_then(|cfg| {
            let values = match &opts.gamma_a_values {
                Some(text) => commands::sweep::parse_gamma_values(text)?,
                None => commands::sweep::default_gamma_values(),
            };
            commands::sweep::run(&cfg, &values).map(|()| true)
        }),
        Command::Validate(opts) => resolve_config(&opts.common).and_then(|cfg| {
            commands::validate::run(&cfg, opts.corrupt_tolerances)
                .map(|report| report.overall_pass)
        }),
        Command::EigenReport(opts) => {
            resolve_config(opts).and_then(|cfg| commands::eigen::run(&cfg).map(|()| true))
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
