use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lis_hwi::{NoiseMethod, PilotSymbol};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "lis-hwi",
    version,
    about = "Capacity and surface-area utility of large intelligent surfaces with hardware impairments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Array gain: closed form, quadrature and its slope.
    Zeta(PointArgs),
    /// Effective noise density.
    Noise(PointArgs),
    /// Capacity over a sweep of surface sizes.
    CapacitySweep(CapacityArgs),
    /// Surface-area utility and its upper bound over a sweep.
    UtilitySweep(PointArgs),
    /// Received SNR loss over a sweep.
    SnrLossSweep(SnrLossArgs),
    /// τ at which the utility crosses zero.
    TurningPoint(TurningArgs),
    /// Splitting one surface into M units (disk form).
    Split(SplitArgs),
    /// Monte-Carlo matched filter against the exact noise density.
    ValidateMc(McArgs),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Zeta(a) | Command::Noise(a) | Command::UtilitySweep(a) => &a.common,
            Command::CapacitySweep(a) => &a.common,
            Command::SnrLossSweep(a) => &a.common,
            Command::TurningPoint(a) => &a.common,
            Command::Split(a) => &a.common,
            Command::ValidateMc(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    SmallArea,
    Disk,
}

impl From<MethodArg> for NoiseMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => NoiseMethod::ExactQuadrature,
            MethodArg::SmallArea => NoiseMethod::SmallArea,
            MethodArg::Disk => NoiseMethod::DiskClosedForm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    HalfLength,
    Area,
    Tau,
    /// Number of units; `split` only.
    MUnits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SymbolArg {
    Fixed,
    RandomPhase,
}

impl From<SymbolArg> for PilotSymbol {
    fn from(s: SymbolArg) -> Self {
        match s {
            SymbolArg::Fixed => PilotSymbol::Fixed,
            SymbolArg::RandomPhase => PilotSymbol::RandomPhase,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Distance of the user from the surface, m.
    #[arg(long, default_value_t = 2.0)]
    pub z0: f64,
    /// Noise PSD per m².
    #[arg(long, default_value_t = 1.0)]
    pub n0: f64,
    /// Transmit power, dB.
    #[arg(long = "power-db", default_value_t = 20.0, allow_hyphen_values = true)]
    pub power_db: f64,
    /// Impairment scale in f(r) = α·r^(2β).
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Impairment growth exponent.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Carrier wavelength, m. Only the Monte-Carlo field phase uses it.
    #[arg(long, default_value_t = 0.1)]
    pub wavelength: f64,
    /// Effective-noise form. Turning points differ between forms.
    #[arg(long, value_enum, default_value_t = MethodArg::Disk)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Relative tolerance of the surface integrals.
    #[arg(long = "quad-tol", default_value_t = 1e-8)]
    pub quad_tol: f64,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Monte-Carlo trials.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Monte-Carlo grid points per axis.
    #[arg(long, default_value_t = 256)]
    pub resolution: usize,
}

/// Either a single surface (one of `--half-length`, `--area`, `--tau`) or a
/// sweep (`--lo`, `--hi`, optionally `--var`, `--steps`, `--log`).
#[derive(Debug, Clone, Args)]
pub struct Domain {
    #[arg(long = "half-length")]
    pub half_length: Option<f64>,
    #[arg(long)]
    pub area: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum, default_value_t = SweepVar::Area)]
    pub var: SweepVar,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Logarithmic spacing.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub domain: Domain,
}

#[derive(Debug, Clone, Args)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub domain: Domain,
    /// Add a capacity column in bit/s/Hz.
    #[arg(long)]
    pub bits: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SnrLossArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub domain: Domain,
    /// Add the small-β shortcut next to the chosen method.
    #[arg(long = "low-beta")]
    pub low_beta: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TurningArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "tau-lo", default_value_t = 1e-3)]
    pub tau_lo: f64,
    #[arg(long = "tau-hi", default_value_t = 10.0)]
    pub tau_hi: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub common: Common,
    /// Parent surface, plus an optional `--var m-units` range.
    #[command(flatten)]
    pub domain: Domain,
    /// Unit counts, comma separated. Ignored with `--var m-units`.
    #[arg(long = "m-units", value_delimiter = ',', default_value = "1,3,5,11")]
    pub m_units: Vec<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub domain: Domain,
    #[arg(long, value_enum, default_value_t = SymbolArg::Fixed)]
    pub symbol: SymbolArg,
}
