use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "xel", version, about = "Smoothed expectile empirical likelihood estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Unpenalized fit (A1 or A2) with an optional Wilks test.
    Fit(FitArgs),
    /// Adaptive LASSO fit (L1 or L2) and the submodel Wilks test.
    Select(SelectArgs),
    /// BIC over a grid of penalty levels a·n^{-5/6} or a·n^{-6/7}.
    Sweep(SweepArgs),
    /// Monte Carlo study over a preset grid or a single custom cell.
    Simulate(SimulateArgs),
    /// Empirical τ of the observed responses.
    Tau(TauArgs),
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// Expectile level, or `auto` for the empirical rule on the observed responses.
    #[arg(long, default_value = "0.5")]
    pub tau: String,
    /// Smoothing bandwidth [default: n^{-1/4}].
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, default_value = "epanechnikov")]
    pub kernel: String,
    /// Stopping tolerance on the step norm.
    #[arg(long, default_value_t = 1e-2)]
    pub nu: f64,
    /// Coefficients below this magnitude are frozen at zero.
    #[arg(long = "eps-zero", default_value_t = 1e-4)]
    pub eps_zero: f64,
    #[arg(long = "max-iter", default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Centre and scale the covariates before fitting.
    #[arg(long)]
    pub standardize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnpenalizedAlgorithm {
    A1,
    A2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PenalizedAlgorithm {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PilotArg {
    Same,
    Split,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct FitArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "a2")]
    pub algorithm: UnpenalizedAlgorithm,
    /// Comma-separated β for a Wilks test with df = p.
    #[arg(long)]
    pub hypothesis: Option<String>,
    /// Directory for fit.json (stdout otherwise).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SelectArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "l2")]
    pub algorithm: PenalizedAlgorithm,
    /// Penalty level [default: n^{-5/6}].
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 2.5)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value = "same")]
    pub pilot: PilotArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridKind {
    /// η = a·n^{-5/6}
    N56,
    /// η = a·n^{-6/7}
    N67,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "n56")]
    pub grid: GridKind,
    /// Comma-separated multipliers a.
    #[arg(long = "a", default_value = "1,2,3,4,5,6,7,8")]
    pub a_values: String,
    #[arg(long, default_value_t = 2.5)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value = "same")]
    pub pilot: PilotArg,
    /// Directory for sweep.json and sweep.csv (JSON on stdout otherwise).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimPilotArg {
    Independent,
    Same,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SimulateArgs {
    /// table1, table1-swapped, table2, fig-coverage or fig-selection; a single
    /// custom cell is built from --n and friends when absent.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads [default: all cores]. Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Directory for simulate.json and simulate.csv (JSON on stdout otherwise).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write replication 0 of the first cell as dump.csv (needs --out).
    #[arg(long)]
    pub dump: bool,
    #[arg(long, value_enum, default_value = "independent")]
    pub pilot: SimPilotArg,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub p: usize,
    /// Comma-separated β⁰ [default: β₃ = 1, β₅ = 2, zero elsewhere].
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long, default_value = "d1")]
    pub design: String,
    /// `exp` or `normal`.
    #[arg(long, default_value = "exp")]
    pub errors: String,
    /// `complete`, `covariate`, or a constant response probability.
    #[arg(long, default_value = "complete")]
    pub missing: String,
    /// Comma-separated subset of a1,a2,l1,l2.
    #[arg(long)]
    pub algorithms: Option<String>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long = "eps-zero")]
    pub eps_zero: Option<f64>,
    #[arg(long)]
    pub kernel: Option<String>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct TauArgs {
    pub input: PathBuf,
}
