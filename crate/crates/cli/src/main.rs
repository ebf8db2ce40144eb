//! `mirrornoise`: spectra, steady states, simulations and audits from a
//! plain-text parameter file. Tables go to `--out` (or stdout) as
//! comma-separated values; every file output gets a JSON manifest next
//! to it.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mirrornoise::{Error, Grid, NoiseKind};
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "mirrornoise", version, about = "Phase-noise spectrum of a cavity with a Brownian end mirror")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Parameter file (`key = value` lines).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output table; stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Thermal noise model.
    #[arg(long, global = true, value_name = "exact|diosi|classical")]
    pub model: Option<NoiseKind>,

    /// Frequency grid in rad/s.
    #[arg(long, global = true, value_name = "lin:MIN:MAX:N | log:MIN:MAX:N")]
    pub grid: Option<Grid>,

    /// Master seed for the simulator.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Number of trajectories.
    #[arg(long, global = true, value_name = "N")]
    pub traj: Option<usize>,

    /// Time step in units of 1/omega_S.
    #[arg(long, global = true, value_name = "F")]
    pub dt: Option<f64>,

    /// Steps per trajectory.
    #[arg(long, global = true, value_name = "N")]
    pub steps: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form homodyne spectrum at the resonance-locked operating point.
    Spectrum,
    /// All steady states at the configured drive frequency.
    SteadyState {
        /// Report the resonance-locked operating point instead.
        #[arg(long)]
        resonant: bool,
    },
    /// Steady states over a range of bare detunings.
    Sweep(SweepArgs),
    /// Monte-Carlo estimate of the output spectrum.
    Simulate(SimulateArgs),
    /// [q, p] commutator over time.
    Audit(AuditArgs),
    /// Spectra under the three noise models and their differences.
    CompareModels,
    /// Reference figure dataset; uses the bundled parameters unless --config is given.
    Fig2,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Lowest bare detuning omega_c - omega_0 (rad/s).
    #[arg(long)]
    pub delta_min: Option<f64>,
    /// Highest bare detuning (rad/s); default 40 kappa.
    #[arg(long)]
    pub delta_max: Option<f64>,
    /// Number of sweep points; default 401.
    #[arg(long)]
    pub n_delta: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Discarded initial fraction of each trajectory.
    #[arg(long)]
    pub burn_in: Option<f64>,
    /// Welch segment length in samples.
    #[arg(long)]
    pub segment: Option<usize>,
    /// Eliminate the cavity adiabatically.
    #[arg(long)]
    pub adiabatic: bool,
    /// Write trajectory 0 as raw little-endian f64 columns t,q,p,X,Y,Y_out.
    #[arg(long, value_name = "PATH")]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Horizon in seconds; default 10/omega_S.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of time points; default 201.
    #[arg(long)]
    pub n_grid: Option<usize>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(Error),
    Numerical(Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn record(&self) -> serde_json::Value {
        let (kind, err) = match self {
            Failure::Config(e) => ("config", e),
            Failure::Numerical(e) => ("numerical", e),
        };
        let keys: Vec<String> = match err {
            Error::MissingKeys(k) => k.clone(),
            Error::DuplicateKey { key, .. } | Error::UnknownKey { key, .. } => vec![key.clone()],
            _ => Vec::new(),
        };
        let line = match err {
            Error::Parse { line, .. } | Error::UnknownKey { line, .. } => Some(*line),
            Error::DuplicateKey { second, .. } => Some(*second),
            _ => None,
        };
        json!({
            "error": {
                "kind": kind,
                "message": err.to_string(),
                "keys": keys,
                "line": line,
                "exit_code": self.code(),
            }
        })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e)
        } else {
            Failure::Numerical(e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.record());
            ExitCode::from(f.code())
        }
    }
}
