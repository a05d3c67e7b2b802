//! `ppav`: command-line front end for the `ppav-core` library.

mod commands;
mod io;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::io::CliError;
use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "ppav",
    version,
    about = "Polarized abelian varieties from metrics and symplectic forms"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Relative tolerance for numerical checks, in [1e-14, 1e-3].
    #[arg(long, env = "PPAV_TOL", default_value_t = 1e-9, global = true)]
    pub tol: f64,
    /// Seed for randomized fixtures and self-checks.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tame a (metric, skew form) pair into a complex structure.
    Tame(TameArgs),
    /// Convert a Siegel point to its complex structure and metric, and back.
    Period(PeriodArgs),
    /// Polarized abelian variety of a metric and an integral skew form.
    Ppav(PairArgs),
    /// Evaluate a theta function with characteristic.
    Theta(ThetaArgs),
    /// Characteristic classes and twisted K-pairings.
    #[command(subcommand)]
    Genus(GenusCommand),
    /// Hodge structures, Lefschetz modules and the E_tau example.
    #[command(subcommand)]
    Hodge(HodgeCommand),
    /// Multipliers for the standard symplectic lattice.
    #[command(subcommand)]
    Multiplier(MultiplierCommand),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct TameSource {
    /// JSON file with `{"metric": form, "skew": form}`.
    #[arg(long)]
    pub pair: Option<PathBuf>,
    /// Identity metric with the standard skew form in dimension 2g.
    #[arg(long, value_name = "G")]
    pub identity: Option<usize>,
    /// Metric attached to a Siegel point (JSON file), with the standard skew form.
    #[arg(long)]
    pub period: Option<PathBuf>,
    /// Metric attached to a genus-one period, with the standard skew form.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
}

#[derive(Debug, Args)]
pub struct TameArgs {
    #[command(flatten)]
    pub source: TameSource,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct PeriodSource {
    /// Siegel point JSON `{"g", "re", "im"}`.
    #[arg(long)]
    pub period: Option<PathBuf>,
    /// Genus-one period such as `0+2i`.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
}

#[derive(Debug, Args)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub source: PeriodSource,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// JSON file with a metric and an integral skew form.
    #[arg(long)]
    pub pair: PathBuf,
}

#[derive(Debug, Args)]
pub struct ThetaArgs {
    #[command(flatten)]
    pub source: PeriodSource,
    /// Characteristic `u1,..,ug:v1,..,vg` with entries 0 or 1/2.
    #[arg(long = "char")]
    pub characteristic: Option<String>,
    /// Argument as `re,im` pairs; defaults to the origin.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RingFixture {
    Cp3,
    Torus,
}

#[derive(Debug, Args)]
pub struct RingArgs {
    /// Built-in ring model.
    #[arg(long, value_enum, conflicts_with = "model")]
    pub fixture: Option<RingFixture>,
    /// Ring model JSON file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Multiplier class as basis coefficients; defaults to 1 - h^2/6 on CP3 and 1 otherwise.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum GenusCommand {
    /// A-hat polynomials in the Pontryagin classes.
    Ahat {
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Chern character in the Chern classes.
    Ch {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Twisted pairing of two classes.
    Pair {
        #[command(flatten)]
        ring: RingArgs,
        /// First class as basis coefficients.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "s")]
        x: Option<String>,
        /// Second class as basis coefficients.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "t")]
        y: Option<String>,
        /// First class as the line bundle `e^{s h}`.
        #[arg(long, allow_hyphen_values = true)]
        s: Option<i64>,
        /// Second class as the line bundle `e^{t h}`.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<i64>,
    },
    /// Exact Gram matrix and determinant of the twisted pairing on the lattice.
    Unimodular {
        #[command(flatten)]
        ring: RingArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum HodgeFixture {
    Curve,
    Weight2,
    Weight3,
    Torus,
    Etau,
}

#[derive(Debug, Subcommand)]
pub enum HodgeCommand {
    /// Weil operator, Riemann conditions and, for odd weight, the Weil Jacobian.
    Weil {
        /// Hodge structure JSON with a `polarization` entry.
        #[arg(long)]
        structure: Option<PathBuf>,
        /// Built-in structure: `curve` (needs --tau) or `weight3` (seeded).
        #[arg(long, value_enum, conflicts_with = "structure")]
        fixture: Option<HodgeFixture>,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
    },
    /// Weight-one torus attached to an even-weight polarized structure.
    Even {
        /// Hodge structure JSON with a `polarization` entry.
        #[arg(long)]
        structure: Option<PathBuf>,
        /// Built-in structure: `weight2` (seeded).
        #[arg(long, value_enum, conflicts_with = "structure")]
        fixture: Option<HodgeFixture>,
        /// Scale of the polarization for the `weight2` fixture.
        #[arg(long, default_value_t = 1)]
        scale: i64,
    },
    /// Primitive decomposition and Hodge metric on the cohomology of a torus.
    Lefschetz {
        /// Built-in module; only `torus` is available.
        #[arg(long, value_enum, default_value = "torus")]
        fixture: HodgeFixture,
        #[command(flatten)]
        source: LefschetzSource,
    },
    /// Determinant, Pluecker ratio and Wirtinger probes for E_tau.
    Etau {
        #[arg(long, default_value = "0+1i", allow_hyphen_values = true)]
        tau: String,
        /// Step for the finite-difference Wirtinger derivatives.
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct LefschetzSource {
    /// Siegel point JSON of the torus.
    #[arg(long)]
    pub period: Option<PathBuf>,
    /// Complex dimension of a seeded random torus.
    #[arg(long)]
    pub g: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum MultiplierCommand {
    /// All 2^{2g} multipliers with their characteristics and parities.
    Enum {
        #[arg(long)]
        g: usize,
    },
    /// Characteristic of the multiplier with the given basis values, or the reverse.
    Char {
        /// Values on the standard basis, each 1 or -1.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "characteristic")]
        eps: Option<String>,
        /// Characteristic `u1,..:v1,..`.
        #[arg(long = "char")]
        characteristic: Option<String>,
    },
    /// Check the cocycle law on random lattice pairs.
    Check {
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

fn run(cli: &Cli) -> Result<report::Report, CliError> {
    if !(1e-14..=1e-3).contains(&cli.tol) {
        return Err(CliError::Input(format!(
            "tolerance {} is outside [1e-14, 1e-3]",
            cli.tol
        )));
    }
    commands::dispatch(cli)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
