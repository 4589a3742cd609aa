use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "flipscore", version, about = "Sign-flip score tests for generalized linear models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Test coefficients of a GLM fitted to a CSV file.
    Test(TestArgs),
    /// Run a simulation scenario and write its rejection curve.
    Simulate(SimulateArgs),
    /// Reproduce the warp-breaks wool comparison with every method.
    Warpbreaks(WarpbreaksArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Basic,
    Effective,
    Parametric,
    Sandwich,
    Quasi,
    All,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    /// Headered CSV file.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub response: String,
    /// Tested columns or dummy names, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub tested: Vec<String>,
    /// Nuisance columns or dummy names, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub nuisance: Vec<String>,
    /// Add an intercept to the nuisance set.
    #[arg(long)]
    pub intercept: bool,
    /// gaussian, poisson or binomial.
    #[arg(long, default_value = "gaussian")]
    pub family: String,
    #[arg(long, value_enum, default_value = "effective")]
    pub method: MethodArg,
    #[arg(long, default_value = "two-sided-abs")]
    pub alternative: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Number of sign flips, identity included.
    #[arg(long, default_value_t = 5000)]
    pub w: usize,
    /// with-replacement, without-replacement or exhaustive.
    #[arg(long, default_value = "with-replacement")]
    pub mode: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Null values of the tested coefficients, comma separated.
    #[arg(long = "null", value_delimiter = ',', allow_hyphen_values = true)]
    pub null_value: Vec<f64>,
    /// Weight matrix of the quadratic statistic: identity or inv-effective-info.
    #[arg(long, default_value = "identity")]
    pub vhat: String,
    /// Emit JSON instead of the text report.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub scenario: Option<String>,
    /// key = value configuration file; flags given here override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub w: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Curve CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WarpbreaksArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub w: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Use an external copy of the data instead of the embedded one.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}
