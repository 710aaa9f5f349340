use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "persist-lab",
    version,
    about = "Persistence probabilities and passage times of AR(1) chains",
    allow_negative_numbers = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Exact Laplace tables (closed forms for theta < 0, recursion for theta > 0)
    Exact,
    /// Monte Carlo persistence table
    Mc,
    /// Quadrature (density propagation) persistence table
    Quad,
    /// Zeroes, coefficients and intervals of the spectral decomposition
    Spectral,
    /// Weights a_n = n [z^n] log phi
    Weights,
    /// Discrete Van Dantzig solver for a mass function given by --mass
    Dvd,
    /// Check one of the factorization identities
    Verify {
        #[arg(value_enum)]
        identity: Identity,
    },
    /// Log-convexity / log-concavity diagnostics and decay rates
    Shape,
    /// Exploratory experiments
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum Experiment {
    /// Sign tables of the weights a_n for negative drifts
    Signs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    TheoremA,
    VanDantzig,
    Kalouze,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyArg {
    Laplace,
    Gaussian,
    Uniform,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleArg {
    Trapezoid,
    Simpson,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Exact,
    Quad,
    Mc,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Drift parameter (decimal or a/b; exact rational arithmetic where available)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Laplace positive-part mass P[X > 0]
    #[arg(long, global = true, default_value = "0.5")]
    pub rho: String,
    /// Laplace rate of the negative part
    #[arg(long, global = true, default_value_t = 1.0)]
    pub a: f64,
    /// Laplace rate of the positive part
    #[arg(long, global = true, default_value_t = 1.0)]
    pub b: f64,
    /// Gaussian scale
    #[arg(long, global = true, default_value_t = 1.0)]
    pub sigma: f64,
    /// Uniform lower end
    #[arg(long, global = true, default_value_t = -1.0, allow_hyphen_values = true)]
    pub lo: f64,
    /// Uniform upper end
    #[arg(long, global = true, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, global = true, value_enum, default_value_t = FamilyArg::Laplace)]
    pub family: FamilyArg,
    /// Series truncation order (dvd)
    #[arg(long, global = true, default_value_t = 64)]
    pub order: usize,
    /// Largest index reported
    #[arg(long, global = true, default_value_t = 20)]
    pub n: usize,
    #[arg(long, global = true, default_value_t = 100_000)]
    pub paths: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Paths per random stream
    #[arg(long, global = true, default_value_t = 10_000)]
    pub block_size: u64,
    /// Start state of the chain (mc)
    #[arg(long, global = true, default_value_t = 0.0)]
    pub x0: f64,
    /// Simulation horizon (mc); defaults to --n
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Tolerance for q-products and bisection
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    /// Number of spectral terms
    #[arg(long, global = true, default_value_t = 20)]
    pub depth: usize,
    /// Quadrature grid intervals
    #[arg(long, global = true, default_value_t = 2048)]
    pub grid: usize,
    /// Quadrature domain; defaults to a certified tail cut
    #[arg(long, global = true)]
    pub zmax: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = RuleArg::Simpson)]
    pub rule: RuleArg,
    /// Also run the quadrature on a doubled grid
    #[arg(long, global = true)]
    pub richardson: bool,
    /// Comma-separated mass function s_0,s_1,... (dvd)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mass: Option<String>,
    /// Table source for shape and verify
    #[arg(long, global = true, value_enum)]
    pub source: Option<Source>,
    /// Relative slack of shape comparisons; defaults by source
    #[arg(long, global = true)]
    pub slack: Option<f64>,
    /// First index tested by shape
    #[arg(long, global = true, default_value_t = 0)]
    pub start: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (a CSV gets a PATH.manifest.json sidecar)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit tab-separated (n, value) pairs instead of CSV/JSON
    #[arg(long, global = true)]
    pub plot_data: bool,
}
