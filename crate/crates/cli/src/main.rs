//! `maxzonoid`: evaluation, measures, simulation, conversions, consistency
//! checks and estimation for max-stable models given as max-zonoids.

mod commands;
mod error;
mod output;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "maxzonoid", version, about = "Max-stable distributions as max-zonoids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Model specification file (TOML).
    #[arg(long, global = true, value_name = "FILE")]
    pub model: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Seed for simulation and Monte Carlo estimates.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Grid size (directions, curve points or discretization atoms).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Number of samples (simulation) or Monte Carlo draws (measures).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalKind {
    /// F(x) at points x.
    Cdf,
    /// C(u) at points u of the unit cube.
    Copula,
    /// A(t) at the first d−1 simplex coordinates t.
    Pickands,
    /// Tail dependence function h(K, x).
    Norm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    L1,
    L2,
    Linf,
}

impl From<NormArg> for maxzonoid::ReferenceNorm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::L1 => maxzonoid::ReferenceNorm::L1,
            NormArg::L2 => maxzonoid::ReferenceNorm::L2,
            NormArg::Linf => maxzonoid::ReferenceNorm::LInf,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate cdf, copula, Pickands function or tail dependence at CSV rows.
    Eval {
        #[arg(long, value_name = "FILE")]
        points: PathBuf,
        #[arg(long, value_enum, default_value_t = EvalKind::Cdf)]
        what: EvalKind,
    },
    /// Extremal coefficients, χ, Spearman's ρ_S, Kendall's τ and multivariate ρ.
    Measures {
        /// Largest subset size for extremal coefficients.
        #[arg(long, default_value_t = 4)]
        max_subset: usize,
    },
    /// Exact simulation; writes a sample CSV.
    Simulate,
    /// Polygon ↔ spectral conversion, or a validation report.
    Spectral {
        /// Write the model as a spectral measure.
        #[arg(long, conflicts_with = "to_polygon")]
        to_atoms: bool,
        /// Write a planar model as a polygon.
        #[arg(long)]
        to_polygon: bool,
        /// Reference norm for --to-atoms.
        #[arg(long, value_enum, default_value_t = NormArg::L1)]
        norm: NormArg,
    },
    /// Consistency verdict for an extremal-coefficient table.
    CheckTheta,
    /// Spectral model reproducing a consistent extremal-coefficient table.
    ConstructTheta,
    /// Empirical spectral measure and normalized zonoid, or the planar
    /// half-plane estimator.
    Estimate {
        /// Sample CSV (one column per coordinate).
        #[arg(long, value_name = "FILE", required_unless_present = "halfplanes")]
        data: Option<PathBuf>,
        /// Threshold s on the reference norm.
        #[arg(long, requires = "data")]
        threshold: Option<f64>,
        #[arg(long, value_enum, default_value_t = NormArg::L1)]
        norm: NormArg,
        /// CSV with columns u1,u2,value of tail-dependence estimates.
        #[arg(long, value_name = "FILE", conflicts_with = "data")]
        halfplanes: Option<PathBuf>,
    },
    /// Points of the planar quantile curve {F = α}.
    Quantile {
        #[arg(long)]
        alpha: f64,
    },
    /// Hausdorff distance between the estimate at each threshold and the model.
    Converge {
        #[arg(long, value_name = "FILE")]
        data: PathBuf,
        /// Comma-separated increasing thresholds.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        thresholds: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
