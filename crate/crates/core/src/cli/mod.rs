//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical tolerance
//! failure, 1 anything else.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};

use crate::error::ZakError;
pub use config::{Format, Method, Overrides, RunConfig, StateSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical tolerance failure: {m}"),
            CliError::Other(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<ZakError> for CliError {
    fn from(e: ZakError) -> Self {
        let msg = e.to_string();
        match e {
            ZakError::Truncation { .. } | ZakError::Unnormalized { .. } | ZakError::DegenerateLogical { .. } => {
                CliError::Numerical(msg)
            }
            ZakError::Io(_) => CliError::Other(msg),
            _ => CliError::Config(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "zakgkp", version, about = "Zak-transform numerics for GKP codes")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the modular wavefunction of a state (heatmap data).
    Zakplot,
    /// Grids of X(j·dx) Z(k·dy) ψ for 0 ≤ j ≤ jmax, 0 ≤ k ≤ kmax.
    ShiftArray {
        #[arg(long)]
        jmax: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
        /// Position step (default a/3, so `jmax = 3` spans one patch width).
        #[arg(long)]
        dx: Option<f64>,
        /// Momentum step (default (2π/a)/3, so `kmax = 3` spans one patch height).
        #[arg(long)]
        dy: Option<f64>,
    },
    /// Logical-qubit report for a state.
    Logical,
    /// Logical fidelity and purity of approximate codewords over a list of Δ.
    Sweep {
        /// Comma-separated Δ values (default 0.5,0.4,0.3,0.2,0.1).
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
        /// Target logical index (default 0).
        #[arg(long)]
        target: Option<usize>,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&cli.overrides)?;
    match &cli.command {
        Command::Zakplot => commands::zakplot(&cfg, stdout),
        Command::ShiftArray { jmax, kmax, dx, dy } => {
            let jmax = cfg.command_value("jmax", *jmax, 3)?;
            let kmax = cfg.command_value("kmax", *kmax, 3)?;
            let a = 2.0 * cfg.alpha;
            let dx = cfg.command_value("dx", *dx, a / 3.0)?;
            let dy = cfg.command_value("dy", *dy, 2.0 * std::f64::consts::PI / a / 3.0)?;
            commands::shift_array(&cfg, jmax, kmax, dx, dy, stdout)
        }
        Command::Logical => commands::logical(&cfg, stdout),
        Command::Sweep { deltas, target } => {
            let deltas = match (deltas, cfg.extra.get("deltas")) {
                (Some(d), _) => d.clone(),
                (None, Some(s)) => s
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<f64>()
                            .map_err(|_| CliError::Config(format!("invalid delta '{x}'")))
                    })
                    .collect::<Result<_, _>>()?,
                (None, None) => vec![0.5, 0.4, 0.3, 0.2, 0.1],
            };
            let target = cfg.command_value("target", *target, 0)?;
            commands::sweep(&cfg, &deltas, target, stdout)
        }
    }
}
