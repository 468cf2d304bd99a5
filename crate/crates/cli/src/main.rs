mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "magicsim", version, about = "Simulators and magic monotones for stabilizer circuits with magic-state inputs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output file (stdout when absent).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads for sampling (all cores when absent).
    #[arg(long, env = "MAGICSIM_WORKERS")]
    workers: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate a Born probability or Pauli expectation with the dyadic sampler.
    Estimate(commands::EstimateArgs),
    /// Sample measurement bit strings with the stabilizer-rank sampler.
    Sample(commands::SampleArgs),
    /// Biased constant-time estimate with a rigorous error interval.
    Constrained(commands::ConstrainedArgs),
    /// Magic monotones of a product of identical single-qubit states.
    Monotone(commands::MonotoneArgs),
    /// Lower bounds on distillation cost and asymptotic rates.
    Distill(commands::DistillArgs),
    /// Time the main kernels.
    Bench(commands::BenchArgs),
    /// Cross-check the engines against the dense reference.
    Selftest(commands::SelftestArgs),
}

#[derive(Debug)]
pub struct CliError {
    code: u8,
    kind: &'static str,
    message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError { code: 2, kind: "validation", message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { code: 1, kind: "io", message: message.into() }
    }

    pub fn failed(message: impl Into<String>) -> Self {
        CliError { code: 1, kind: "failed", message: message.into() }
    }
}

impl From<magicsim::Error> for CliError {
    fn from(e: magicsim::Error) -> Self {
        match e {
            magicsim::Error::LpFailure(_) => CliError { code: 1, kind: "solver", message: e.to_string() },
            _ => CliError::validation(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report(&CliError::validation(e.to_string().trim_end()));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Estimate(a) => commands::estimate(a),
        Command::Sample(a) => commands::sample(a),
        Command::Constrained(a) => commands::constrained(a),
        Command::Monotone(a) => commands::monotone(a),
        Command::Distill(a) => commands::distill(a),
        Command::Bench(a) => commands::bench(a),
        Command::Selftest(a) => commands::selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::from(e.code)
        }
    }
}

fn report(e: &CliError) {
    let diag = serde_json::json!({ "status": "error", "kind": e.kind, "message": e.message });
    eprintln!("{diag}");
}
