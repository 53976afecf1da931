//! Command-line driver: configs, experiment commands and their artifacts.

mod commands;
pub mod config;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::error::Error;
pub use config::ExperimentConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("invalid value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },

    #[error("missing config key `{0}`")]
    MissingKey(String),

    #[error("config syntax: {0}")]
    Syntax(String),

    #[error(transparent)]
    Lib(#[from] Error),

    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Lib(Error::Io(e))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Lib(Error::Csv(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::UnknownKey(_) | Self::BadValue { .. } | Self::MissingKey(_) | Self::Syntax(_) => EXIT_VALIDATION,
            Self::File { .. } => EXIT_IO,
            Self::Lib(e) => match e {
                Error::DegenerateSample(_)
                | Error::Resolution { .. }
                | Error::DegenerateMeasure(_)
                | Error::DegeneratePartition(_) => EXIT_DEGENERATE,
                Error::Io(_) | Error::Csv(_) => EXIT_IO,
                _ => EXIT_VALIDATION,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Serialize a wave to `wave.txt`.
    GenWave,
    /// Label, mesh and classify a field; CSV summaries and an SVG plot.
    NodalStats,
    /// Window moments of F_x(y) against Gaussian moments.
    Moments,
    /// Mixed moments of the wave packets b_k.
    BkMoments,
    /// Empirical characteristic function of f.
    Charfn,
    /// Tail of the doubling index over random centers.
    Doubling,
    /// Fraction of B(R) where |f| is small.
    Smallvalues,
    /// Pushforward distance and covariance against the Gaussian field.
    Compare,
    /// Kac–Rice zero-set density of a spectral measure.
    Kacrice,
    /// Ensemble nodal-domain density.
    NsEstimate,
    /// Integral-geometric sandwich for the nodal volume.
    Sandwich,
    /// Global against windowed nodal-domain density.
    Semilocal,
    /// Spread of the per-trial nodal-domain density.
    Discrepancy,
    /// Zero sets of the all-ones planar sum against the J_0 circles.
    Fig1,
}

#[derive(Debug, Parser)]
#[command(name = "monowave", version, about = "Monochromatic waves, their nodal sets, and Gaussian comparison fields")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// Flat `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Worker thread cap; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,

    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Extra `key=value` settings applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// Builds the effective config: defaults, then the file, then `--set`, then flags.
pub fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = ExperimentConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::File {
            path: path.clone(),
            source,
        })?;
        config.apply(&config::parse_pairs(&text)?)?;
    }
    let extra = config::parse_pairs(&cli.set.join("\n"))?;
    config.apply(&extra)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

/// Runs one command; returns the paths of the artifacts written.
pub fn run(command: Command, config: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let out = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out).map_err(|source| CliError::File {
        path: out.clone(),
        source,
    })?;
    commands::dispatch(command, config, &out)
}

/// Parses arguments, runs, reports, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_VALIDATION;
        }
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = load_config(&cli).and_then(|c| run(cli.command, &c));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
