use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stepharm::PotentialConfig;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "stepharm", version, about = "Bound states, delay times and wave packets of the step-harmonic potential")]
pub struct Cli {
    #[command(flatten)]
    pub units: Units,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write the table here instead of standard output. CSV files get a
    /// `<path>.manifest.json` sidecar.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Either `--beta0` alone (ħ = m = κ = 1) or physical constants with `--u0`.
#[derive(Clone, Debug, Default, Args)]
pub struct Units {
    /// Dimensionless step height β₀ = U₀/(ħω) + 1/2.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub hbar: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Spring constant of the x < 0 side.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Step height.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub u0: Option<f64>,
}

impl Units {
    pub fn resolve(&self) -> Result<PotentialConfig, CliError> {
        let physical = [self.hbar, self.mass, self.kappa, self.u0];
        let any_physical = physical.iter().any(Option::is_some);
        match (self.beta0, any_physical) {
            (Some(_), true) => Err(CliError::BadArgs(
                "--beta0 cannot be combined with --hbar/--mass/--kappa/--u0".into(),
            )),
            (Some(beta0), false) => PotentialConfig::dimensionless(beta0).map_err(|e| CliError::BadArgs(e.to_string())),
            (None, true) => {
                let u0 = self
                    .u0
                    .ok_or_else(|| CliError::BadArgs("physical units need --u0".into()))?;
                PotentialConfig::new(
                    self.hbar.unwrap_or(1.0),
                    self.mass.unwrap_or(1.0),
                    self.kappa.unwrap_or(1.0),
                    u0,
                )
                .map_err(|e| CliError::BadArgs(e.to_string()))
            }
            (None, false) => Err(CliError::BadArgs("give --beta0 or --u0".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound-state levels (n, β_n, E_n/ħω, k_n).
    Levels,
    /// Delay time τω/π on a β grid.
    Delay {
        #[arg(long)]
        beta_min: f64,
        #[arg(long)]
        beta_max: f64,
        #[arg(long, default_value_t = 500)]
        steps: usize,
    },
    /// Normalized bound-state wavefunction of level n.
    Eigenfunction {
        #[arg(long, short)]
        n: usize,
        #[arg(long, default_value_t = -6.0, allow_negative_numbers = true)]
        x_min: f64,
        #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
        x_max: f64,
        #[arg(long, default_value_t = 601)]
        points: usize,
    },
    /// Evolve a reflected wave packet and measure its delay.
    Wavepacket(WavepacketArgs),
    /// Local maxima of the delay time with their widths.
    Resonances {
        #[arg(long)]
        beta_max: f64,
    },
    /// Cross-check the analytic routes against the brute-force oracles.
    Verify {
        /// Machine-readable report path.
        #[arg(long, default_value = "stepharm-verify.json")]
        report: PathBuf,
        /// Corrupt an internal constant to exercise the failure path.
        #[arg(long, value_enum)]
        inject_fault: Option<Fault>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Perturb one Lanczos coefficient of the Gamma kernel.
    Gamma,
}

#[derive(Clone, Debug, Args)]
pub struct WavepacketArgs {
    /// Central wavenumber k̃.
    #[arg(long, conflicts_with = "beta_center")]
    pub k_center: Option<f64>,
    /// Central β̃, alternative to --k-center.
    #[arg(long)]
    pub beta_center: Option<f64>,
    /// Envelope width in k; defaults to k̃/30.
    #[arg(long)]
    pub sigma_k: Option<f64>,
    /// Launch offset; defaults to 3/σ_k.
    #[arg(long)]
    pub x_start: Option<f64>,
    /// Last frame time; defaults to twice the mirror round trip.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 9)]
    pub frames: usize,
    #[arg(long, default_value_t = 801)]
    pub points: usize,
    /// Also sample x < 0 (slow: contour integrals at every node).
    #[arg(long)]
    pub include_interior: bool,
    /// Replace the reflection coefficient by 1.
    #[arg(long)]
    pub mirror: bool,
    /// Summary record path; printed to standard error when omitted.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}
