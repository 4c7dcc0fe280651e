//! `triphoton` command-line front end.
//!
//! ```text
//! triphoton [--config PATH] figure1   [--out DIR] [--physical-mask[=BOOL]]
//! triphoton [--config PATH] correlate --state w111|ghz12 --domain time|space --order 2|3
//! triphoton [--config PATH] modes     [--out DIR]
//! triphoton [--config PATH] sweep     --param KEY --values v1,v2,...
//! ```
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or schema error,
//! 3 numerical or degenerate-input error, 4 a state failed its expected
//! entanglement signature in `modes`.

mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{
    cmd_correlate, cmd_figure1, cmd_modes, cmd_sweep, Domain, RunSummary, SweepParam,
};
pub use config::{parse_config, ConfigError, ExperimentConfig, OutputFormat};

use crate::correlators::{Engine, StateKind};

pub const DEFAULT_CONFIG_PATH: &str = "./triphoton.json";
pub const THREADS_ENV: &str = "TRIPHOTON_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Schema(#[from] ConfigError),
    #[error("numerical error: {0}")]
    Numerical(crate::Error),
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("expected state property violated: {0}")]
    PropertyViolation(String),
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Configuration(msg) => CliError::Usage(msg),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) | CliError::Schema(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::PropertyViolation(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "triphoton",
    version,
    about = "Correlation functions of W-like and GHZ-like triphoton states"
)]
pub struct Cli {
    /// JSON experiment configuration; defaults are used when the default
    /// path does not exist.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StateArg {
    W111,
    Ghz12,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EngineArg {
    Fft,
    Direct,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Third-order surface, conditional slice and second-order curve of the
    /// three-mode state.
    Figure1 {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Drop samples with negative delays from the written files.
        #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value = "true")]
        physical_mask: bool,
    },
    /// One correlation function of one state.
    Correlate {
        #[arg(long, value_enum)]
        state: StateArg,
        #[arg(long, value_enum)]
        domain: Domain,
        #[arg(long)]
        order: u8,
        #[arg(long, value_enum, default_value = "fft")]
        engine: EngineArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value = "true")]
        physical_mask: bool,
    },
    /// Frequency-bin states, one-photon loss and negativity report.
    Modes {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summary metrics over a list of parameter values.
    Sweep {
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, CliError> {
    let (path, explicit) = match path {
        Some(p) => (p.to_path_buf(), true),
        None => (PathBuf::from(DEFAULT_CONFIG_PATH), false),
    };
    match std::fs::read(&path) {
        Ok(bytes) => Ok(parse_config(&bytes)?),
        Err(e) if !explicit && e.kind() == std::io::ErrorKind::NotFound => {
            Ok(ExperimentConfig::default())
        }
        Err(source) => Err(CliError::Io { path, source }),
    }
}

/// Applies `TRIPHOTON_THREADS` (0 or unset = rayon default) to the global pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a nonnegative integer, got {raw:?}"
        ))
    })?;
    if n > 0 {
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

/// Runs a parsed command line and returns the summary printed to stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    configure_threads()?;
    let cfg = load_config(cli.config.as_deref())?;
    let out_dir = |out: Option<PathBuf>| out.unwrap_or_else(|| cfg.output_dir.clone());
    let summary = match cli.command {
        Command::Figure1 { out, physical_mask } => cmd_figure1(&cfg, &out_dir(out), physical_mask)?,
        Command::Correlate {
            state,
            domain,
            order,
            engine,
            out,
            physical_mask,
        } => {
            let state = match state {
                StateArg::W111 => StateKind::W111,
                StateArg::Ghz12 => StateKind::Ghz12,
            };
            let engine = match engine {
                EngineArg::Fft => Engine::Fft,
                EngineArg::Direct => Engine::Direct,
            };
            cmd_correlate(
                &cfg,
                state,
                domain,
                order,
                engine,
                &out_dir(out),
                physical_mask,
            )?
        }
        Command::Modes { out } => cmd_modes(&cfg, &out_dir(out))?,
        Command::Sweep { param, values, out } => {
            let param = SweepParam::parse(&param)?;
            cmd_sweep(&cfg, param, &values, &out_dir(out))?
        }
    };
    Ok(summary.to_json())
}
