//! `moshlab` command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure (or a failed computation),
//! 2 configuration error, 3 I/O error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::{Kind, Params};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot access {path}: {source}", path = .0.display(), source = .1)]
    Io(PathBuf, std::io::Error),
    #[error("computation failed: {0}")]
    Compute(moshlab::Error),
    #[error("validation failed")]
    ValidationFailed,
}

impl From<moshlab::Error> for CliError {
    fn from(e: moshlab::Error) -> Self {
        match e {
            moshlab::Error::InvalidArgument(msg) => CliError::Config(msg),
            e => CliError::Compute(e),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::ValidationFailed | CliError::Compute(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(..) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "moshlab", version, about = "Diffraction in time under a constant force: density maps, Wigner maps and validation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Run {
    /// TOML file with any of the parameter keys; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: Params,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Density of the released shutter beam on an (x, t) grid
    ShutterDensity(Run),
    /// Density time series at a fixed detector position
    Detector(Run),
    /// Wigner function of the shutter beam on an (x, p) grid
    WignerMap(Run),
    /// Density of a released trap eigenstate on an (x, t) grid
    BoxDensity(Run),
    /// Density of a released Tonks-Girardeau gas on an (x, t) grid
    TonksDensity(Run),
    /// Compare closed forms with the independent oracles
    Validate {
        #[arg(long, default_value = "quick")]
        level: moshlab::validate::Level,
        /// Where to write the JSON report
        #[arg(long, default_value = "validation_report.json")]
        report: PathBuf,
        /// Multiply the Faddeyeva function by 1 + EPS (sensitivity check)
        #[arg(long, value_name = "EPS", allow_negative_numbers = true)]
        perturb_w: Option<f64>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn worker_count(flag: Option<usize>, file: Option<usize>) -> Result<Option<usize>, CliError> {
    let env = match std::env::var("MOSHLAB_THREADS") {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| CliError::Config(format!("MOSHLAB_THREADS = `{v}` is not a count")))?),
        Err(_) => None,
    };
    match flag.or(env).or(file) {
        Some(0) => Err(CliError::Config("thread count must be at least 1".into())),
        n => Ok(n),
    }
}

fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> Result<T, CliError> + Send) -> Result<T, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(job)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (kind, run) = match cli.command {
        Command::Validate { level, report, perturb_w, threads } => {
            let threads = worker_count(threads, None)?;
            return in_pool(threads, || commands::validate(level, &report, perturb_w));
        }
        Command::ShutterDensity(r) => (Kind::Shutter, r),
        Command::Detector(r) => (Kind::Detector, r),
        Command::WignerMap(r) => (Kind::Wigner, r),
        Command::BoxDensity(r) => (Kind::Box, r),
        Command::TonksDensity(r) => (Kind::Tonks, r),
    };
    let file = match &run.config {
        Some(path) => Params::from_file(path)?,
        None => Params::default(),
    };
    let threads = worker_count(run.params.threads, file.threads)?;
    let params = run.params.over(file).over(kind.defaults());
    in_pool(threads, || commands::export(kind, params))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("moshlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
