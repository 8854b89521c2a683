//! `betalpp`: last passage percolation and beta-Laguerre experiments.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 on numeric failure.

mod commands;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "betalpp", version, about = "Exponential LPP and beta-Laguerre lower-tail experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed; the BETALPP_SEED environment variable overrides it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Result file; a manifest is written to `<output>.manifest.json`.
    /// Results go to stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Largest eigenvalues of the bidiagonal beta-Laguerre model.
    SampleLaguerre(commands::SampleLaguerre),
    /// Point-to-point and point-to-line passage times on seeded fields.
    Lpp(commands::Lpp),
    /// KS check of point-to-line times against half the beta = 1 edge.
    VerifyLoe(commands::Verify),
    /// KS check of point-to-point times against the beta = 2 edge.
    VerifyLue(commands::Verify),
    /// Lower-tail probability of the largest eigenvalue.
    Tail(commands::Tail),
    /// Tail estimates over a grid and the fitted exponent.
    FitTail(commands::FitTail),
    /// Coupled trace of T_n with running scaled extremes.
    Lil(commands::Lil),
    /// Dyadic region scans over independent fields.
    Dyadic(commands::Dyadic),
    /// Gershgorin bound against the top singular value.
    Gershgorin(commands::Gershgorin),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(betalpp::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<betalpp::Error> for CliError {
    fn from(e: betalpp::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(betalpp::Error::NumericFailure { .. }) => 2,
            _ => 1,
        }
    }
}

fn resolve_seed(common: &mut Common) -> Result<(), CliError> {
    if let Ok(s) = std::env::var("BETALPP_SEED") {
        common.seed = s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("BETALPP_SEED must be an unsigned 64-bit integer, got {s:?}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut common = match &cli.command {
        Command::SampleLaguerre(c) => c.common.clone(),
        Command::Lpp(c) => c.common.clone(),
        Command::VerifyLoe(c) | Command::VerifyLue(c) => c.common.clone(),
        Command::Tail(c) => c.common.clone(),
        Command::FitTail(c) => c.common.clone(),
        Command::Lil(c) => c.common.clone(),
        Command::Dyadic(c) => c.common.clone(),
        Command::Gershgorin(c) => c.common.clone(),
    };
    resolve_seed(&mut common)?;
    let threads = match common.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))?;
    pool.install(|| {
        let ctx = commands::Ctx { common: &common, threads };
        match &cli.command {
            Command::SampleLaguerre(c) => c.run(&ctx),
            Command::Lpp(c) => c.run(&ctx),
            Command::VerifyLoe(c) => c.run(&ctx, "verify-loe"),
            Command::VerifyLue(c) => c.run(&ctx, "verify-lue"),
            Command::Tail(c) => c.run(&ctx),
            Command::FitTail(c) => c.run(&ctx),
            Command::Lil(c) => c.run(&ctx),
            Command::Dyadic(c) => c.run(&ctx),
            Command::Gershgorin(c) => c.run(&ctx),
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("betalpp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_failures_exit_with_two() {
        let numeric = CliError::Core(betalpp::Error::NumericFailure { message: "stall".into(), lo: 0.0, hi: 1.0 });
        assert_eq!(numeric.exit_code(), 2);
        assert_eq!(CliError::Core(betalpp::Error::Usage("x".into())).exit_code(), 1);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
