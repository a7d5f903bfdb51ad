use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncsq_core::analytic::OscillatorParams;
use ncsq_core::fock::{FockSpace, DEFAULT_CUTOFF, SAFE_BUFFER};
use ncsq_core::verifier::ProbePair;
use ncsq_core::{make_params, ModeAmplitudes, NcParams, SqueezeParam};
use num_complex::Complex64;
use serde::Serialize;

use crate::CliError;

const AFTER_HELP: &str = "\
Output: line-delimited JSON on stdout. The first line is the run header
(schema, version, timestamp, command, params, seed); each following line is
one result row carrying \"schema\": 1. With --out FILE.csv the rows are written
as CSV instead: nested fields are flattened to dotted column names, complex
numbers split into .re and .im columns, and reals carry 17 significant digits.

Complex values use the form a+bi without spaces, e.g. 0.5+0i, -1-0.2i, 0+2i.
Angles are in radians.

Exit codes: 0 success, 1 a check failed, 2 usage or parameter error.
NCSQ_THREADS caps the number of worker threads.";

#[derive(Debug, Parser)]
#[command(name = "ncsq", version, about = "Deformed coherent and squeezed states in noncommutative phase space")]
#[command(after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived constants and constraint class of (mu, nu, hbar).
    Params(ParamsCmd),
    /// Closed-form variances, products, minima and Heisenberg bounds.
    Variance(VarianceCmd),
    /// Overlap <alpha2, beta2 | alpha, beta; z>, optionally against the Fock oracle.
    Overlap(OverlapCmd),
    /// Generalized Bogoliubov coefficients, optionally fitted from the Fock oracle.
    Bogoliubov(BogoliubovCmd),
    /// Full verifier run: operator identities and oracle crosschecks.
    Check(CheckCmd),
    /// Monte Carlo test of the coherent-state resolution of the identity.
    Overcompleteness(OvercompletenessCmd),
    /// Scan one parameter and report an analytic quantity per grid point.
    Sweep(SweepCmd),
    /// Consistency of an isotropic oscillator (m, omega) with mu/nu.
    Oscillator(OscillatorCmd),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true, required_unless_present = "natural")]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "natural")]
    pub nu: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hbar: f64,
    /// Use mu = nu = hbar = 1.
    #[arg(long, conflicts_with_all = ["mu", "nu"])]
    pub natural: bool,
}

impl ParamArgs {
    /// `(mu, nu, hbar)` after applying `--natural`.
    pub fn values(&self) -> (f64, f64, f64) {
        if self.natural {
            (1.0, 1.0, 1.0)
        } else {
            (
                self.mu.expect("required by clap"),
                self.nu.expect("required by clap"),
                self.hbar,
            )
        }
    }

    pub fn params(&self) -> Result<NcParams, CliError> {
        let (mu, nu, hbar) = self.values();
        Ok(make_params(mu, nu, hbar)?)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SqueezeArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
}

impl SqueezeArgs {
    pub fn squeeze(&self) -> Result<SqueezeParam, CliError> {
        Ok(SqueezeParam::new(self.r, self.phi)?)
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    s.parse::<Complex64>()
        .map_err(|_| format!("`{s}` is not a complex number of the form a+bi"))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KetArgs {
    #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Complex64,
    #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: Complex64,
}

impl KetArgs {
    pub fn amps(&self) -> Result<ModeAmplitudes, CliError> {
        Ok(ModeAmplitudes::new(self.alpha, self.beta)?)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BraArgs {
    #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha2: Complex64,
    #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta2: Complex64,
}

impl BraArgs {
    pub fn amps(&self) -> Result<ModeAmplitudes, CliError> {
        Ok(ModeAmplitudes::new(self.alpha2, self.beta2)?)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Write rows to this file; CSV when it ends in .csv.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Emit JSON even when --out ends in .csv.
    #[arg(long)]
    #[serde(skip)]
    pub json: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpaceArgs {
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub cutoff: usize,
    #[arg(long, default_value_t = SAFE_BUFFER)]
    pub buffer: usize,
}

impl SpaceArgs {
    pub fn space(&self) -> Result<FockSpace, CliError> {
        Ok(FockSpace::new(self.cutoff)?)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ParamsCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VarianceCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub squeeze: SqueezeArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OverlapCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub squeeze: SqueezeArgs,
    #[command(flatten)]
    pub ket: KetArgs,
    #[command(flatten)]
    pub bra: BraArgs,
    /// Also evaluate the overlap on the Fock oracle at this cutoff.
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BogoliubovCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub squeeze: SqueezeArgs,
    /// Also fit the coefficients on the Fock oracle at this cutoff.
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long, default_value_t = SAFE_BUFFER)]
    pub buffer: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub squeeze: SqueezeArgs,
    #[command(flatten)]
    pub ket: KetArgs,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OvercompletenessCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub squeeze: SqueezeArgs,
    #[command(flatten)]
    pub ket: KetArgs,
    #[command(flatten)]
    pub bra: BraArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

impl OvercompletenessCmd {
    pub fn probe(&self) -> Result<ProbePair, CliError> {
        Ok(ProbePair::new(self.bra.amps()?, self.ket.amps()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    R,
    Phi,
    Theta,
    Mu,
    Nu,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub squeeze: SqueezeArgs,
    /// Variable to scan.
    #[arg(long, value_enum)]
    pub var: SweepVar,
    #[arg(long, allow_hyphen_values = true)]
    pub start: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub stop: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub step: f64,
    /// Reported field, e.g. prod_xpx, dx2, gain_x, min_XP.
    #[arg(long, default_value = "prod_xpx")]
    pub quantity: String,
    /// Fix theta instead of deriving it from mu and nu; mu/nu sets the
    /// aspect only. Admits theta = 0.
    #[arg(long)]
    pub theta: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OscillatorCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub m: f64,
    #[arg(long)]
    pub omega: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

impl OscillatorCmd {
    pub fn oscillator(&self) -> Result<OscillatorParams, CliError> {
        Ok(OscillatorParams::new(self.m, self.omega)?)
    }
}
