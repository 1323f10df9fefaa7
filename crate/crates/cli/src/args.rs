use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::parse;

#[derive(Debug, Parser)]
#[command(name = "kacroots", version, about = "Real-root statistics of Kac random polynomials")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "KACROOTS_THREADS")]
    pub threads: Option<usize>,

    /// key=value file supplying defaults for the subcommand's flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo mean, variance and residual of the real-root count.
    Simulate(SimulateArgs),
    /// Expected real-zero count of the Gaussian model by quadrature.
    Ek(EkArgs),
    /// Exact big-integer oracles.
    Exact {
        #[command(subcommand)]
        oracle: ExactCommand,
    },
}

/// Validates with `f` but keeps the original text, so the manifest records
/// flags exactly as given.
fn check<T: 'static>(
    f: fn(&str) -> anyhow::Result<T>,
) -> impl Fn(&str) -> Result<String, String> + Clone + Send + Sync + 'static {
    move |s: &str| f(s).map(|_| s.to_string()).map_err(|e| format!("{e:#}"))
}

fn atom_value(s: &str) -> anyhow::Result<kac_core::Atom> {
    Ok(kac_core::Atom::parse(s)?)
}

fn stat_value(s: &str) -> Result<String, String> {
    match s {
        "mean" | "residual" | "variance" | "gaps" | "near-double" => Ok(s.to_string()),
        _ => Err("expected one of mean, residual, variance, gaps, near-double".into()),
    }
}

fn method_value(s: &str) -> Result<String, String> {
    match s {
        "auto" | "exact" | "float" => Ok(s.to_string()),
        _ => Err("expected one of auto, exact, float".into()),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// bernoulli, typeI:N, gaussian or uniform.
    #[arg(long, default_value = "bernoulli", value_parser = check(atom_value))]
    pub atom: String,

    /// Comma list; items may be `2^a..2^b`, `a..b` or values like `1e3`.
    #[arg(long, value_parser = check(parse::parse_degrees))]
    pub degrees: String,

    /// Trials per degree.
    #[arg(long, default_value = "1000", value_parser = check(parse::parse_count))]
    pub trials: String,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Statistics to collect (comma list or repeated).
    #[arg(long, value_delimiter = ',', default_value = "mean", value_parser = stat_value)]
    pub stat: Vec<String>,

    /// ε in the bulk interval (1/(N+1), 1 − n^(−2+ε)].
    #[arg(long, default_value_t = 0.125)]
    pub epsilon: f64,

    /// Near-double threshold exponent.
    #[arg(long = "B", default_value_t = 16.0)]
    pub b: f64,

    /// Count roots in the open interval `a,b` only.
    #[arg(long, value_parser = check(parse::parse_interval))]
    pub interval: Option<String>,

    /// Root counting path.
    #[arg(long, default_value = "auto", value_parser = method_value)]
    pub method: String,

    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EkArgs {
    /// Single degree.
    #[arg(long, conflicts_with = "n_sweep", required_unless_present = "n_sweep", value_parser = check(parse::parse_count))]
    pub n: Option<String>,

    /// Comma list of degrees.
    #[arg(long, value_parser = check(parse::parse_degrees))]
    pub n_sweep: Option<String>,

    /// Integrate over `a,b` instead of the whole line.
    #[arg(long, value_parser = check(parse::parse_float_interval))]
    pub interval: Option<String>,

    /// Per-panel tolerance of the adaptive rule.
    #[arg(long, default_value_t = kac_core::ekq::DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum ExactCommand {
    /// Probability of a double root at 1, at −1 and at either.
    DoubleRoot(DoubleRootArgs),
    /// Largest point mass of the weighted sum pair.
    Anticonc(AnticoncArgs),
    /// P(|P(x)| ≤ δ) by meet in the middle.
    SmallBall(SmallBallArgs),
    /// Minimal gap of lacunary sign sums.
    Separation(SeparationArgs),
    /// Exact double-root probability at 1 against the local-limit value.
    CltCalibrate(CltArgs),
}

impl ExactCommand {
    pub fn name(&self) -> &'static str {
        match self {
            ExactCommand::DoubleRoot(_) => "double-root",
            ExactCommand::Anticonc(_) => "anticonc",
            ExactCommand::SmallBall(_) => "small-ball",
            ExactCommand::Separation(_) => "separation",
            ExactCommand::CltCalibrate(_) => "clt-calibrate",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DoubleRootArgs {
    /// Degree.
    #[arg(long, conflicts_with = "n_max", required_unless_present = "n_max")]
    pub n: Option<usize>,

    /// Report every degree 1..=n-max.
    #[arg(long)]
    pub n_max: Option<usize>,

    /// Coefficients uniform on {±1, …, ±N}.
    #[arg(long = "N", default_value_t = 1)]
    #[serde(rename = "N")]
    pub big_n: u32,

    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
}

fn weights_value(s: &str) -> anyhow::Result<kac_core::exact::Weights> {
    Ok(kac_core::exact::Weights::parse(s)?)
}

#[derive(Debug, Args, Serialize)]
pub struct AnticoncArgs {
    #[arg(long)]
    pub n: usize,

    #[arg(long = "N", default_value_t = 1)]
    #[serde(rename = "N")]
    pub big_n: u32,

    /// u: (1, i); v: (1, (−1)^(i−1) i); minus-one: ((−1)^i, (−1)^(i−1) i).
    #[arg(long, default_value = "u", value_parser = check(weights_value))]
    pub weights: String,

    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SmallBallArgs {
    #[arg(long)]
    pub n: usize,

    #[arg(long = "N", default_value_t = 1)]
    #[serde(rename = "N")]
    pub big_n: u32,

    /// Evaluation point, exact (`4/5` or `0.8`).
    #[arg(long, value_parser = check(parse::parse_rational))]
    pub x: String,

    /// Radius, exact.
    #[arg(long, value_parser = check(parse::parse_rational))]
    pub delta: String,

    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
}

fn variant_value(s: &str) -> anyhow::Result<kac_core::exact::SeparationVariant> {
    Ok(kac_core::exact::SeparationVariant::parse(s)?)
}

#[derive(Debug, Args, Serialize)]
pub struct SeparationArgs {
    /// claim1, claim2 or uniform.
    #[arg(long, value_parser = check(variant_value))]
    pub variant: String,

    #[arg(long, value_parser = check(parse::parse_rational))]
    pub x: String,

    #[arg(long = "N", default_value_t = 1)]
    #[serde(rename = "N")]
    pub big_n: u32,

    /// Number of lacunary terms.
    #[arg(long)]
    pub k: u32,

    /// Window above 1/2 admitted by claim2.
    #[arg(long, default_value = "1/50", value_parser = check(parse::parse_rational))]
    pub c0: String,

    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CltArgs {
    #[arg(long, conflicts_with = "n_max", required_unless_present = "n_max")]
    pub n: Option<usize>,

    /// Report every degree 3..=n-max.
    #[arg(long)]
    pub n_max: Option<usize>,

    #[arg(long = "N", default_value_t = 1)]
    #[serde(rename = "N")]
    pub big_n: u32,

    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub out: PathBuf,
}
