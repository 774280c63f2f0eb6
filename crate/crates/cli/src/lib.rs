//! The `gaitforge` command line: sweeps, height fields, PMP runs and the
//! cross-method comparison, each writing CSV, JSON and SVG into `--out`.

pub mod args;
mod compare;
mod heightfield;
mod io;
mod pmp;
pub mod svg;
mod sweep;

use std::path::PathBuf;

use gaitforge_core::config::{FrameChoice, ModelConfig};
use gaitforge_core::connection::BodyFrameSpec;
use gaitforge_core::models::Swimmer;
use gaitforge_core::GaitError;
use serde::Serialize;

pub use args::Cli;
use args::{Command, Common};

/// Version of every JSON report layout; bump on breaking changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or parameters (exit code 2).
    Usage(String),
    /// Runtime failure (exit code 1).
    Failure(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<GaitError> for CliError {
    fn from(e: GaitError) -> Self {
        match e {
            GaitError::InvalidParams(_) | GaitError::Config(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

/// How a command ended when it did not error out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// The solver did not converge; the report says so (exit code 1).
    NotConverged,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::NotConverged => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Swimmer, frame and seed after merging flags over the config file.
#[derive(Clone)]
pub(crate) struct Setup {
    pub swimmer: Swimmer,
    pub frame: BodyFrameSpec,
    pub seed: u64,
    pub out: PathBuf,
}

/// Model description copied into every JSON report.
#[derive(Serialize)]
pub(crate) struct ModelInfo {
    pub swimmer: Swimmer,
    pub frame: BodyFrameSpec,
    pub seed: u64,
}

impl Setup {
    /// Frame precedence: `--frame`, then the config, then `default`.
    pub fn new(common: &Common, default: FrameChoice) -> CliResult<Self> {
        let config = match &common.model_config {
            Some(p) => ModelConfig::load(p)?,
            None => ModelConfig::default(),
        };
        let choice = match &common.frame {
            Some(s) => s.parse::<FrameChoice>()?,
            None => config.frame.unwrap_or(default),
        };
        let frame = choice.resolve(&config.swimmer)?;
        std::fs::create_dir_all(&common.out)
            .map_err(|e| CliError::Usage(format!("cannot create output directory {}: {e}", common.out.display())))?;
        Ok(Setup {
            swimmer: config.swimmer,
            frame,
            seed: common.seed.unwrap_or(config.seed),
            out: common.out.clone(),
        })
    }

    pub fn info(&self) -> ModelInfo {
        ModelInfo { swimmer: self.swimmer, frame: self.frame, seed: self.seed }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

pub fn run(cli: Cli) -> CliResult<Status> {
    match cli.command {
        Command::Sweep(a) => sweep::run(&a),
        Command::Heightfield(a) => heightfield::run(&a),
        Command::Pmp(a) => pmp::run(&a),
        Command::Compare(a) => compare::run(&a),
    }
}

/// Caps the rayon pool at `GAITFORGE_THREADS` when set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("GAITFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("GAITFORGE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Failure(format!("thread pool: {e}")))
}
