use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use paretail::second_order::{FragaTuning, RhoMode};

#[derive(Parser, Debug)]
#[command(name = "paretail", version, about = "Bias-reduced tail estimation with the extended Pareto distribution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hill, EPD-ML and Bayes estimates over a range of k for a data file.
    Estimate(EstimateArgs),
    /// Seeded Monte Carlo study.
    Simulate(SimulateArgs),
    /// Asymptotic MSE curves over a grid of lambda.
    Asymptotics(AsymptoticsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Closed,
    Mcmc,
}

/// `auto` (Fraga estimate with fallback and clamp) or `fixed:<value>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoChoice {
    Auto,
    Fixed(f64),
}

impl FromStr for RhoChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(RhoChoice::Auto);
        }
        let v = s
            .strip_prefix("fixed:")
            .ok_or_else(|| format!("expected `auto` or `fixed:<value>`, got {s:?}"))?;
        let v: f64 = v.parse().map_err(|_| format!("cannot parse rho value {v:?}"))?;
        if !(v < 0.0 && v.is_finite()) {
            return Err(format!("fixed rho must be negative, got {v}"));
        }
        Ok(RhoChoice::Fixed(v))
    }
}

impl RhoChoice {
    pub fn mode(self, k1: Option<usize>, theta: u8) -> RhoMode {
        match self {
            RhoChoice::Auto => RhoMode::Fraga {
                k1,
                tuning: if theta == 0 { FragaTuning::Log } else { FragaTuning::Power },
            },
            RhoChoice::Fixed(value) => RhoMode::Fixed { value },
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EstimateArgs {
    /// Data file: one value per line, or CSV (see --column).
    pub data: PathBuf,
    /// Zero-based CSV column holding the sample.
    #[arg(long)]
    pub column: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub k_min: usize,
    /// Defaults to n - 1.
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub k_step: usize,
    #[arg(long, default_value = "auto")]
    pub rho: RhoChoice,
    /// Order statistics used by the rho estimator; defaults to floor(n^0.975).
    #[arg(long)]
    pub rho_k1: Option<usize>,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub rho_tuning: u8,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    pub method: Method,
    /// Retained chain length after burn-in.
    #[arg(long, default_value_t = 10_000)]
    pub mcmc_iters: usize,
    #[arg(long, default_value_t = 2_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// HPD level: the interval covers 1 - alpha of the draws.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Level at which to estimate P(X > x).
    #[arg(long)]
    pub x: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SimulateArgs {
    /// TOML configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// One of frechet, burr, loggamma.
    #[arg(long)]
    pub distribution: Option<String>,
    /// Tail index of the frechet or burr design.
    #[arg(long)]
    pub xi: Option<f64>,
    /// Second-order parameter of the burr design.
    #[arg(long, allow_hyphen_values = true)]
    pub burr_rho: Option<f64>,
    /// Gamma shape of the loggamma design.
    #[arg(long)]
    pub shape: Option<f64>,
    /// Gamma rate of the loggamma design.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub k_min: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub k_step: Option<usize>,
    /// Comma-separated subset of hill, epd_ml, bayes_closed, bayes_mcmc.
    #[arg(long, value_delimiter = ',')]
    pub estimators: Option<Vec<String>>,
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub rho: Option<RhoChoice>,
    #[arg(long)]
    pub rho_k1: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub rho_tuning: Option<u8>,
    /// Tail level p; the study estimates P(X > Q(1 - p)).
    #[arg(long)]
    pub target_p: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Moving-average width for the Bayes paths; 0 disables smoothing.
    #[arg(long)]
    pub smooth: Option<usize>,
    #[arg(long)]
    pub mcmc_iters: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output prefix: writes <out>.csv, <out>.json and <out>.manifest.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AsymptoticsArgs {
    #[arg(long, default_value_t = 0.5)]
    pub xi: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub rho: f64,
    /// Explicit comma-separated lambda values; overrides the range flags.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub lambda_max: f64,
    /// Number of equally spaced points from lambda-min to lambda-max.
    #[arg(long, default_value_t = 51)]
    pub lambda_points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_choice_parsing() {
        assert_eq!("auto".parse::<RhoChoice>().unwrap(), RhoChoice::Auto);
        assert_eq!("fixed:-1".parse::<RhoChoice>().unwrap(), RhoChoice::Fixed(-1.0));
        assert!("fixed:0.5".parse::<RhoChoice>().is_err());
        assert!("fixed:abc".parse::<RhoChoice>().is_err());
        assert!("-1".parse::<RhoChoice>().is_err());
    }
}
