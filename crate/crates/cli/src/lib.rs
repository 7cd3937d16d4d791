//! Command-line front end for `selbias-core`: scenario files, effect
//! reports, sweeps to CSV, calibration reports and sampler validation.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 degenerate stratum,
//! 4 I/O error, 5 validation flags.

pub mod commands;
pub mod output;
pub mod scenario;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use commands::{Source, DEFAULT_SAMPLES, DEFAULT_SEED};
use scenario::ScenarioError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Scenario { path: String, source: ScenarioError },
    #[error(transparent)]
    Model(#[from] selbias_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
    #[error("{0} cell(s) exceed the z threshold")]
    ValidationFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use selbias_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Scenario { .. } => 2,
            CliError::Model(E::DegenerateStratum(_) | E::OddsUndefined(_)) => 3,
            CliError::Model(_) => 2,
            CliError::Io { .. } | CliError::Output(_) => 4,
            CliError::ValidationFailed(_) => 5,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "selbias",
    version,
    about = "Selection bias in responsibility analyses of road accidents"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct ModelArgs {
    /// Scenario file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Built-in preset; its base model is used.
    #[arg(long)]
    pub preset: Option<String>,
}

impl ModelArgs {
    fn source(self) -> Result<Source, CliError> {
        Source::from_flags(self.scenario, self.preset)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Effect measures and relative risks per exposure level and stratum.
    Effects {
        #[command(flatten)]
        model: ModelArgs,
        /// Decimals in the report.
        #[arg(long)]
        precision: Option<usize>,
    },
    /// Evaluate a preset or scenario grid and write CSV.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// Output path, `-` for stdout.
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Compare a seeded sample against the exact joint table.
    Validate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Scenario whose exact table the sample is compared with.
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Calibrated intercepts and achieved prevalences.
    Calibrate {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// List preset names.
    Presets,
}

pub fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Effects { model, precision } => {
            commands::effects_cmd(&model.source()?, precision, out)
        }
        Command::Sweep { model, out: path } => {
            let rows = commands::sweep_cmd(&model.source()?, &path, out)?;
            if path != "-" {
                writeln!(err, "wrote {rows} rows to {path}")?;
            }
            Ok(())
        }
        Command::Validate {
            model,
            n,
            seed,
            against,
        } => commands::validate_cmd(&model.source()?, against.as_deref(), n, seed, out),
        Command::Calibrate { model } => commands::calibrate_cmd(&model.source()?, out, err),
        Command::Presets => commands::presets_cmd(out),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
