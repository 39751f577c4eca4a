//! `permlab`: permanents, exact Schur permanents, ensemble sampling,
//! geodesic sweeps and statistics batteries from the command line.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 capability or limit
//! exceeded, 4 numeric failure.

mod commands;
mod formats;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use permlab_core::ensembles::EnsembleKind;
use permlab_core::exec;
use permlab_core::geodesic::GeodesicTarget;
use permlab_core::modular::DEFAULT_PRIME_BITS;
use permlab_core::Error;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub const USAGE: u8 = 2;
    pub const LIMIT: u8 = 3;
    pub const NUMERIC: u8 = 4;

    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: Self::USAGE, message: message.into() }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        CliError { code: Self::NUMERIC, message: message.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::usage(format!("{}: {e}", path.display()))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EmptyMatrix | Error::NotSquare { .. } | Error::InvalidParameter(_) | Error::Format(_) => {
                CliError::USAGE
            }
            Error::OracleDimensionExceeded { .. }
            | Error::DimensionTooLarge { .. }
            | Error::DivisionByTwoUnavailable
            | Error::TooManyBlocks { .. }
            | Error::InsufficientPrimes { .. }
            | Error::NoNthRoot { .. } => CliError::LIMIT,
            _ => CliError::NUMERIC,
        };
        CliError { code, message: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Naive,
    Ryser,
    Glynn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Domain {
    /// Exact for integer files, otherwise the file's own domain.
    Auto,
    Complex,
    Real,
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatTest {
    /// Moments of the real part, imaginary part and magnitude.
    Moments,
    /// Rayleigh and Weibull fits of the magnitudes.
    Rayleigh,
    /// Exponential law of the squared magnitudes.
    Exponential,
    /// Circularly-symmetric complex Gaussian battery.
    Gaussian,
    /// Alpha-stable fits of the real parts.
    Stable,
    /// Normality of the log-magnitudes.
    Lognormal,
    /// Anti-concentration probabilities for k = 0..3.
    Anticoncentration,
}

impl StatTest {
    pub fn name(self) -> &'static str {
        match self {
            StatTest::Moments => "moments",
            StatTest::Rayleigh => "rayleigh",
            StatTest::Exponential => "exponential",
            StatTest::Gaussian => "gaussian",
            StatTest::Stable => "stable",
            StatTest::Lognormal => "lognormal",
            StatTest::Anticoncentration => "anticoncentration",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "permlab", version, about = "Matrix permanents and the statistics of random-matrix permanents")]
struct Cli {
    /// Worker threads; defaults to the number of logical cores. Outputs do
    /// not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Permanent of a perm-matrix-v1 file.
    Perm {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "ryser")]
        method: Method,
        #[arg(long, value_enum, default_value = "auto")]
        domain: Domain,
    },
    /// Exact permanent of the n x n Schur matrix.
    Schur {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_PRIME_BITS)]
        prime_bits: u32,
        /// Report file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Permanents of sampled ensemble matrices, written as CSV.
    Sample {
        #[arg(long, value_parser = parse_ensemble)]
        ensemble: EnsembleKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "ryser")]
        method: Method,
        #[arg(long)]
        out: PathBuf,
    },
    /// Permanents along the geodesic from I to the cycle or DFT matrix.
    Geodesic {
        #[arg(long, value_parser = parse_target)]
        target: GeodesicTarget,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Statistics batteries on a sample or trace file with its manifest.
    Stats {
        file: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', required = true, num_args = 0..)]
        tests: Vec<StatTest>,
        /// Report file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_ensemble(s: &str) -> Result<EnsembleKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_target(s: &str) -> Result<GeodesicTarget, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Perm { file, method, domain } => commands::cmd_perm(&file, method, domain),
        Command::Schur { n, prime_bits, out } => commands::cmd_schur(n, prime_bits, out.as_deref()),
        Command::Sample { ensemble, n, count, seed, method, out } => {
            commands::cmd_sample(ensemble, n, count, seed, method, &out)
        }
        Command::Geodesic { target, n, steps, out } => commands::cmd_geodesic(target, n, steps, &out),
        Command::Stats { file, tests, out } => commands::cmd_stats(&file, &tests, out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(CliError::USAGE);
        }
        Some(t) => t,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    match exec::with_workers(threads, || run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
