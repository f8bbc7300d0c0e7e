//! `hycoa`: command-line front end for the hycoa library.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "hycoa", version, about = "Coalgebraic hybrid logic workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Evaluate a formula in a model, at one state or globally.
    Check,
    /// Check that a model file or a formula is well formed.
    Validate,
    /// Check a frame against pure axioms.
    FrameCheck,
    /// Check a proof script.
    Prove,
    /// Search for a named model of a problem file.
    Sat,
    /// Decide a one-step problem file.
    Onestep,
}

#[derive(clap::Args, Debug, Default, Clone)]
pub struct Opts {
    /// Model file (for `sat`: where to write the model found).
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    #[arg(long, global = true)]
    pub formula: Option<String>,
    /// State name for `check`; without it the formula is checked globally.
    #[arg(long, global = true)]
    pub state: Option<String>,
    /// File of pure axioms, one per line.
    #[arg(long, global = true)]
    pub axioms: Option<PathBuf>,
    #[arg(long, global = true)]
    pub proof: Option<PathBuf>,
    #[arg(long, global = true)]
    pub problem: Option<PathBuf>,
    /// Shipped signature name or signature file.
    #[arg(long, global = true)]
    pub sig: Option<String>,
    /// Shipped rule set name or rule file.
    #[arg(long, global = true)]
    pub rules: Option<String>,
    #[arg(long, global = true)]
    pub max_states: Option<usize>,
    #[arg(long, global = true)]
    pub max_mult: Option<u64>,
    /// Seed for randomized procedures. No subcommand draws random numbers
    /// at present; the value is echoed in the report.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Human,
    Machine,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = commands::name(cli.command);
    let env_bounds = std::env::var("HYCOA_BOUNDS").ok();
    let report = commands::run(cli.command, &cli.opts, env_bounds.as_deref()).unwrap_or_else(|e| Report::error(name, format!("{e:#}")));
    let report = match cli.opts.seed {
        Some(seed) => report.detail("seed", seed),
        None => report,
    };
    match cli.opts.format {
        Format::Human if report.error.is_some() => eprint!("{}", report.human()),
        Format::Human => print!("{}", report.human()),
        Format::Machine => print!("{}", report.machine()),
    }
    ExitCode::from(report.verdict.exit_code() as u8)
}
