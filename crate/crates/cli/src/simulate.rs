//! `paretail simulate`: Monte Carlo study from a TOML file and/or flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use paretail::bayes::MetropolisConfig;
use paretail::study::{run_study, Estimator, SimDistribution, StudyConfig};

use crate::args::{Method, RhoChoice, SimulateArgs};
use crate::manifest::{digest_bytes, RunManifest};
use crate::{CliError, CliResult};

/// Configuration file layout: one table per library module, keys named
/// like the command-line flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub mc_study: StudySection,
    #[serde(default)]
    pub second_order: RhoSection,
    #[serde(default)]
    pub bayes_epd: BayesSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct StudySection {
    pub distribution: Option<String>,
    pub xi: Option<f64>,
    pub burr_rho: Option<f64>,
    pub shape: Option<f64>,
    pub rate: Option<f64>,
    pub n: Option<usize>,
    pub reps: Option<usize>,
    pub k_min: Option<usize>,
    pub k_max: Option<usize>,
    pub k_step: Option<usize>,
    pub estimators: Option<Vec<String>>,
    pub target_p: Option<f64>,
    pub seed: Option<u64>,
    pub smooth: Option<usize>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RhoSection {
    pub rho: Option<String>,
    pub rho_k1: Option<usize>,
    pub rho_tuning: Option<u8>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BayesSection {
    pub method: Option<String>,
    pub mcmc_iters: Option<usize>,
    pub burn_in: Option<usize>,
}

pub const DEFAULT_N: usize = 500;
pub const DEFAULT_REPS: usize = 1000;
pub const DEFAULT_MCMC_REPS: usize = 100;
pub const DEFAULT_OUT: &str = "study";

fn usage<T>(m: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(m.into()))
}

fn distribution(a: &SimulateArgs) -> CliResult<SimDistribution> {
    let name = a.distribution.as_deref().unwrap_or("burr");
    let mut d = match name {
        "frechet" => SimDistribution::frechet_default(),
        "burr" => SimDistribution::burr_default(),
        "loggamma" => SimDistribution::loggamma_default(),
        other => {
            return usage(format!(
                "unknown distribution {other:?}; supported: {}",
                SimDistribution::SUPPORTED.join(", ")
            ))
        }
    };
    match &mut d {
        SimDistribution::Frechet { xi } => {
            if a.burr_rho.is_some() || a.shape.is_some() || a.rate.is_some() {
                return usage("frechet takes only xi");
            }
            *xi = a.xi.unwrap_or(*xi);
        }
        SimDistribution::Burr { xi, rho } => {
            if a.shape.is_some() || a.rate.is_some() {
                return usage("burr takes only xi and burr-rho");
            }
            *xi = a.xi.unwrap_or(*xi);
            *rho = a.burr_rho.unwrap_or(*rho);
        }
        SimDistribution::Loggamma { shape, rate } => {
            if a.xi.is_some() || a.burr_rho.is_some() {
                return usage("loggamma takes only shape and rate");
            }
            *shape = a.shape.unwrap_or(*shape);
            *rate = a.rate.unwrap_or(*rate);
        }
    }
    d.validate()?;
    Ok(d)
}

/// Fills every flag left unset from the configuration file.
pub fn merge(mut a: SimulateArgs, file: ConfigFile) -> CliResult<SimulateArgs> {
    let s = file.mc_study;
    macro_rules! fill {
        ($($field:ident <- $src:expr),* $(,)?) => {
            $( if a.$field.is_none() { a.$field = $src; } )*
        };
    }
    fill!(
        distribution <- s.distribution,
        xi <- s.xi,
        burr_rho <- s.burr_rho,
        shape <- s.shape,
        rate <- s.rate,
        n <- s.n,
        reps <- s.reps,
        k_min <- s.k_min,
        k_max <- s.k_max,
        k_step <- s.k_step,
        estimators <- s.estimators,
        target_p <- s.target_p,
        seed <- s.seed,
        smooth <- s.smooth,
        workers <- s.workers,
        out <- s.out,
        rho_k1 <- file.second_order.rho_k1,
        rho_tuning <- file.second_order.rho_tuning,
        mcmc_iters <- file.bayes_epd.mcmc_iters,
        burn_in <- file.bayes_epd.burn_in,
    );
    if a.rho.is_none() {
        if let Some(r) = file.second_order.rho {
            a.rho = Some(r.parse::<RhoChoice>().map_err(CliError::Usage)?);
        }
    }
    if a.method.is_none() {
        a.method = match file.bayes_epd.method.as_deref() {
            None => None,
            Some("closed") => Some(Method::Closed),
            Some("mcmc") => Some(Method::Mcmc),
            Some(other) => return usage(format!("method must be closed or mcmc, got {other:?}")),
        };
    }
    Ok(a)
}

/// Resolves merged arguments into a study configuration.
pub fn build_config(a: &SimulateArgs) -> CliResult<StudyConfig> {
    let dist = distribution(a)?;
    let n = a.n.unwrap_or(DEFAULT_N);
    let mut cfg = StudyConfig::new(dist, n);

    let method = a.method.unwrap_or(Method::Closed);
    cfg.estimators = match &a.estimators {
        Some(names) => names
            .iter()
            .map(|s| Estimator::parse(s.trim()))
            .collect::<Result<_, _>>()?,
        None => vec![
            Estimator::Hill,
            Estimator::EpdMl,
            match method {
                Method::Closed => Estimator::BayesClosed,
                Method::Mcmc => Estimator::BayesMcmc,
            },
        ],
    };
    let with_mcmc = cfg.estimators.contains(&Estimator::BayesMcmc);
    cfg.reps = a.reps.unwrap_or(if with_mcmc { DEFAULT_MCMC_REPS } else { DEFAULT_REPS });

    let k_min = a.k_min.unwrap_or(10);
    let k_max = a.k_max.unwrap_or(n.saturating_sub(10));
    let k_step = a.k_step.unwrap_or(5);
    if k_step == 0 {
        return usage("k-step must be positive");
    }
    cfg.k_grid = (k_min..=k_max).step_by(k_step).collect();

    cfg.rho_mode = a.rho.unwrap_or(RhoChoice::Auto).mode(a.rho_k1, a.rho_tuning.unwrap_or(0));
    cfg.target_p = a.target_p.unwrap_or(1.0 / n as f64);
    cfg.master_seed = a.seed.unwrap_or(0);
    cfg.smooth_window = match a.smooth {
        Some(0) => None,
        Some(w) => Some(w),
        None => Some(5),
    };
    let burn_in = a.burn_in.unwrap_or(cfg.mcmc.burn_in);
    let kept = a.mcmc_iters.unwrap_or(cfg.mcmc.iterations - cfg.mcmc.burn_in);
    cfg.mcmc = MetropolisConfig {
        iterations: kept + burn_in,
        burn_in,
        ..cfg.mcmc
    };
    cfg.workers = a.workers;
    cfg.validate()?;
    Ok(cfg)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    prefix.with_file_name(name)
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let mut digest = None;
    let merged = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
            digest = Some(digest_bytes(text.as_bytes()));
            let file: ConfigFile = toml::from_str(&text)
                .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
            merge(args.clone(), file)?
        }
        None => args.clone(),
    };
    let cfg = build_config(&merged)?;
    let result = run_study(&cfg)?;

    let prefix = merged.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let csv_path = with_suffix(&prefix, ".csv");
    let json_path = with_suffix(&prefix, ".json");
    fs::write(&csv_path, result.to_csv())?;
    fs::write(&json_path, result.to_json() + "\n")?;

    let mut m = RunManifest::new(
        "simulate",
        serde_json::to_value(&cfg).expect("config serialises"),
        vec![cfg.master_seed],
    );
    m.input_digest = digest;
    m.outputs = vec![csv_path.clone(), json_path];
    m.workers = cfg.workers;
    m.runtime_secs = Some(result.runtime_secs);
    m.write(&with_suffix(&prefix, ".manifest.json"))?;
    eprintln!(
        "{} cells over {} replications ({} excluded) -> {}",
        result.cells.len(),
        result.reps_used,
        result.excluded_cells,
        csv_path.display()
    );
    Ok(())
}
