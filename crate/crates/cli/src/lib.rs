//! `fracmax` command-line driver: config loading, the four subcommands and
//! the exit-code contract.
//!
//! | command        | 0       | 1         | 2                  | 3             |
//! |----------------|---------|-----------|--------------------|---------------|
//! | `solve`        | success |           | usage/config error | numeric error |
//! | `verify`       | all pass| violation | usage/config error | numeric error |
//! | `convergence`  | success |           | usage/config error | numeric error |
//! | `kernel-table` | success |           | usage/config error | numeric error |

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod config;
pub mod output;

pub use config::{load_config, parse_config, ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "fracmax",
    version,
    about = "Time-space fractional diffusion: solve and verify maximum principles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// JSON run configuration
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides the config's "output")
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the configured problem; writes solution.csv and solution.json
    Solve(Common),
    /// Run the property suites; writes verify_report.json
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Mesh-refinement studies; writes convergence.csv
    Convergence(Common),
    /// Kernel samples and L1 distances; writes kernel_samples.csv and kernel_l1.csv
    KernelTable(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Nonneg,
    Boundary,
    Weak,
    Identities,
    All,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Usage(String),
    Numeric(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<fracmax::Error> for CliError {
    fn from(e: fracmax::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

fn output_dir(common: &Common, config: &RunConfig) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

fn prepare(common: &Common) -> Result<(RunConfig, PathBuf), CliError> {
    let config = load_config(&common.config)?;
    let dir = output_dir(common, &config);
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok((config, dir))
}

/// Runs a parsed command; `Ok(code)` is 0, or 1 for a verification failure.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Solve(common) => {
            let (config, dir) = prepare(common)?;
            commands::solve::run(&config, &dir).map(|()| 0)
        }
        Command::Verify { common, suite } => {
            let (config, dir) = prepare(common)?;
            let passed = commands::verify::run(&config, *suite, &dir)?;
            Ok(if passed { 0 } else { 1 })
        }
        Command::Convergence(common) => {
            let (config, dir) = prepare(common)?;
            commands::convergence::run(&config, &dir).map(|()| 0)
        }
        Command::KernelTable(common) => {
            let (config, dir) = prepare(common)?;
            commands::kernel_table::run(&config, &dir).map(|()| 0)
        }
    }
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fracmax: {e}");
            e.exit_code()
        }
    }
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
