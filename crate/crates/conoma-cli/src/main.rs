//! `conoma` — outage curves, cross-validation and diversity estimates for
//! cooperative NOMA relay selection, from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 insufficient data for the requested estimate.

mod commands;
mod experiment;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use experiment::Preset;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INSUFFICIENT_DATA: i32 = 3;

#[derive(Parser)]
#[command(
    name = "conoma",
    version,
    about = "Cooperative NOMA relay selection: seeded outage simulation and closed-form analytics"
)]
struct Cli {
    /// Worker threads for the Monte Carlo engine (0 = one per core).
    /// Results are bit-identical for any thread count.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep outage probability over an SNR grid and emit CSV
    Sweep(SweepArgs),
    /// Cross-validate the closed forms against simulation and quadrature
    Verify(VerifyArgs),
    /// Estimate diversity order from outage curves
    Diversity(DiversityArgs),
}

#[derive(Args, Clone)]
pub struct ScenarioArgs {
    /// Number of candidate relays N
    #[arg(long)]
    n_relays: Option<usize>,

    /// Power fraction of user 1's signal (user 2 gets 1 - alpha1_sq)
    #[arg(long)]
    alpha1_sq: Option<f64>,

    /// Rate target of user 1, bits per channel use
    #[arg(long)]
    r1: Option<f64>,

    /// Rate target of user 2, bits per channel use
    #[arg(long)]
    r2: Option<f64>,

    /// SNR grid in dB, formatted start:stop:step
    #[arg(long)]
    snr_db: Option<String>,

    /// Monte Carlo trials per SNR point
    #[arg(long)]
    trials: Option<u64>,

    /// Master seed; fixes every random draw of the campaign
    #[arg(long)]
    seed: Option<u64>,

    /// Comma-separated strategies: two_stage,max_min,oracle,random,oma
    #[arg(long)]
    strategies: Option<String>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,

    /// Figure preset: fig1 (NOMA vs OMA, N=3) or fig2 (two-stage vs max-min, N=10)
    #[arg(long, value_enum)]
    preset: Option<Preset>,

    /// Declarative experiment file (JSON); explicit flags override its fields
    #[arg(long)]
    experiment: Option<PathBuf>,

    /// Write the per-cell CSV here
    #[arg(long)]
    out: Option<PathBuf>,

    /// Print aggregated statistics as JSON instead of the summary table
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Trials per Monte Carlo comparison point
    #[arg(long, default_value_t = 100_000)]
    trials: u64,

    /// Master seed for the stochastic checks
    #[arg(long, default_value_t = 20240)]
    seed: u64,

    /// Print the full machine-readable report as JSON
    #[arg(long)]
    json: bool,

    /// Fault-injection hook: scale xi1 on the analytic side (anything
    /// but 1.0 must fail verification)
    #[arg(long, default_value_t = 1.0, hide = true)]
    inject_xi1_scale: f64,
}

#[derive(Args)]
pub struct DiversityArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,

    /// Print the estimates as JSON
    #[arg(long)]
    json: bool,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot build thread pool: {e}");
            std::process::exit(EXIT_USAGE);
        }
    };
    let code = pool.install(|| match cli.command {
        Command::Sweep(args) => commands::sweep(args),
        Command::Verify(args) => commands::verify(args),
        Command::Diversity(args) => commands::diversity(args),
    });
    std::process::exit(code);
}
