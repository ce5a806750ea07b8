use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use charvol::estimators::EstimatorKind;

#[derive(Debug, Parser)]
#[command(
    name = "charvol",
    version,
    about = "Jump-robust integrated volatility estimation"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Master random seed; a random one is drawn and echoed when omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo runs (default: all cores).
    #[arg(long, global = true, env = "CHARVOL_THREADS")]
    pub threads: Option<usize>,
    /// Output file (directory for `simulate`); standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the stochastic-volatility model with stable jumps.
    Simulate(SimulateArgs),
    /// Estimate daily integrated variance from a price CSV.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo study.
    Montecarlo(MonteCarloArgs),
    /// Evaluate the χ constants and bias functionals.
    Theory(TheoryArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Observations per day, `1/Δ`.
    #[arg(long)]
    pub grid: Option<f64>,
    #[arg(long)]
    pub days: Option<usize>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub cir_kappa: Option<f64>,
    #[arg(long)]
    pub cir_theta: Option<f64>,
    #[arg(long)]
    pub cir_sigma: Option<f64>,
    #[arg(long)]
    pub substeps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ValueColumnArg {
    Price,
    Logprice,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EstimateArgs {
    /// Price CSV.
    pub input: PathBuf,
    /// Estimators (comma separated): rv, tc, bv, cf, cf-debiased, panel.
    #[arg(long = "estimator", value_delimiter = ',', value_parser = parse_kind)]
    pub estimators: Vec<EstimatorKind>,
    /// Block size, required by the characteristic-function estimators.
    #[arg(long)]
    pub kn: Option<usize>,
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Fixed CF argument instead of the bipower-scaled daily choice.
    #[arg(long)]
    pub u: Option<f64>,
    #[arg(long)]
    pub kappa: Option<u8>,
    #[arg(long)]
    pub level: Option<f64>,
    /// Grid spacing in days, overriding the time column.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub time_column: Option<String>,
    #[arg(long, value_enum)]
    pub value_column: Option<ValueColumnArg>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MonteCarloArgs {
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long = "estimator", value_delimiter = ',', value_parser = parse_kind)]
    pub estimators: Vec<EstimatorKind>,
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long)]
    pub level: Option<f64>,
    /// Also write a JSON report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Include per-replication errors in the JSON report.
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TheoryArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    /// Report χ(β) only.
    #[arg(long)]
    pub chi: bool,
    /// Scale of a CF-standardized symmetric stable jump component.
    #[arg(long, conflicts_with_all = ["gamma_plus", "gamma_minus"])]
    pub gamma: Option<f64>,
    #[arg(long, requires = "gamma_minus")]
    pub gamma_plus: Option<f64>,
    #[arg(long, requires = "gamma_plus")]
    pub gamma_minus: Option<f64>,
    #[arg(long)]
    pub u: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Horizon in days.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Block size for rate diagnostics.
    #[arg(long)]
    pub kn: Option<usize>,
}

fn parse_kind(s: &str) -> Result<EstimatorKind, String> {
    s.parse().map_err(|e: charvol::Error| e.to_string())
}
