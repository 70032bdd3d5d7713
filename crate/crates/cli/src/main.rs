//! `shorlab`: run order-finding experiments, coset fidelity traces,
//! resource tables and midpoint splits from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shorlab::Variant;

/// Exit status for bad flags or inputs.
pub const EXIT_INPUT: u8 = 1;
/// Exit status when a run completed but produced no result.
pub const EXIT_FAILED: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "shorlab",
    version,
    about = "Simulate optimized Shor order-finding circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run order finding and derive factors of N.
    Factor(FactorArgs),
    /// Trace coset-addition fidelity against exact modular addition.
    Fidelity(FidelityArgs),
    /// Print qubit and step counts for every variant.
    Resources(ResourcesArgs),
    /// Show the midpoint split of a multiplier.
    Split(SplitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SizeGuard {
    /// Allow moduli of 2^10 and above.
    #[arg(long)]
    pub allow_large: bool,
    /// Qubit budget replacing the default modulus-size guard.
    #[arg(long, env = "SHORLAB_MAX_QUBITS", hide_env_values = true)]
    pub max_qubits: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    #[arg(short = 'N', long = "modulus")]
    pub modulus: u64,
    /// Base; defaults to the smallest integer >= 2 coprime with N.
    #[arg(short = 'a', long = "base")]
    pub base: Option<u64>,
    #[arg(long, default_value = "standard")]
    pub variant: Variant,
    #[arg(long, default_value_t = 20)]
    pub trials: u64,
    /// Coset rung count (coset variant only).
    #[arg(long)]
    pub xmax: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Fail if a short multiplication exceeds its footprint bound.
    #[arg(long)]
    pub strict_footprint: bool,
    #[command(flatten)]
    pub guard: SizeGuard,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[arg(short = 'N', long = "modulus", default_value_t = 21)]
    pub modulus: u64,
    /// Rung count; defaults to 1000 n^2.
    #[arg(long)]
    pub xmax: Option<u64>,
    /// Number of additions; defaults to 4 n^2.
    #[arg(long)]
    pub adds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ResourcesArgs {
    /// Bit length n of the modulus.
    #[arg(long, short = 'n')]
    pub bits: u32,
    /// Work qubits of the modular adder.
    #[arg(long, default_value_t = 1)]
    pub work_qubits: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(short = 'N', long = "modulus")]
    pub modulus: u64,
    #[arg(short = 'a', long = "base")]
    pub base: u64,
    #[command(flatten)]
    pub output: Output,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Factor(args) => commands::factor(&args),
        Command::Fidelity(args) => commands::fidelity(&args),
        Command::Resources(args) => commands::resources(&args),
        Command::Split(args) => commands::split(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
