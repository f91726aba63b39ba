mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use superchan::{Branch, Implementation, Shots};

/// Superposed depolarizing channels: coherent-information sweeps, Bloch images,
/// dual states and simulated qutrit tomography.
#[derive(Debug, Parser)]
#[command(name = "superchan", version)]
pub struct Cli {
    /// Directory receiving the output files.
    #[arg(long, global = true, env = "SUPERCHAN_OUT", default_value = ".")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximal coherent information of every channel model over an alpha grid.
    Sweep(SweepArgs),
    /// Sampled Bloch image of the post-selected channel and its fitted ellipsoid.
    Bloch(BlochArgs),
    /// Simulated qutrit process tomography of one arm.
    Tomo(TomoArgs),
    /// Dual (Choi) state of a channel model.
    Choi(ChoiArgs),
    /// Sums of every pair of arm unitaries.
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChoiModel {
    Qubit,
    Postselected,
    QutritA,
    QutritB,
    Mz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    None,
    Default,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `start:stop:step` or a comma-separated list.
    #[arg(long, default_value = "0:1:0.05")]
    pub grid: String,
    #[arg(long = "impl", default_value = "coherent")]
    pub implementation: Implementation,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BlochArgs {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long = "impl", default_value = "coherent")]
    pub implementation: Implementation,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct TomoArgs {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long = "impl", default_value = "coherent")]
    pub implementation: Implementation,
    #[arg(long, default_value = "a")]
    pub branch: Branch,
    /// Shots per setting, or `inf` for exact probabilities.
    #[arg(long, default_value = "1e5")]
    pub shots: Shots,
    #[arg(long, required_unless_present = "counts")]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "none")]
    pub systematics: Preset,
    /// Path-phase standard deviation in radians (overrides the preset).
    #[arg(long)]
    pub phase_jitter: Option<f64>,
    /// Rotation-axis tilt in radians (overrides the preset).
    #[arg(long)]
    pub axis_error: Option<f64>,
    /// Fraction of V intensity lost per arm (overrides the preset).
    #[arg(long)]
    pub absorbance: Option<f64>,
    /// Reconstruct from an existing counts CSV instead of simulating.
    #[arg(long, conflicts_with_all = ["shots", "seed", "systematics", "phase_jitter", "axis_error", "absorbance"])]
    pub counts: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChoiArgs {
    #[arg(long, value_enum)]
    pub model: ChoiModel,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long = "impl", default_value = "coherent")]
    pub implementation: Implementation,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long = "impl", default_value = "coherent")]
    pub implementation: Implementation,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = match &e {
                CliError::Usage(m) | CliError::Numerical(m) => m,
            };
            eprintln!("error: {msg}");
            ExitCode::from(e.code())
        }
    }
}
