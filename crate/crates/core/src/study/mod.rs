//! Seeded Monte Carlo study of the tail-index and tail-probability estimators.
//!
//! Each replication draws a sample of size `n`, resolves `ρ` once, and then
//! evaluates every requested estimator at every `k` of the grid, together
//! with the matching tail-probability estimate at `x = Q(1 - p)`. Results
//! are aggregated into bias, variance and MSE per `(estimator, k)`; the
//! tail-probability metrics are taken on `p̂/p - 1`.
//!
//! Replication `r` uses the ChaCha8 stream `r` of the master seed, and
//! aggregation runs in replication order, so results do not depend on the
//! number of worker threads.

mod distributions;
mod output;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{
    bayes_closed_form, bayes_tail_prob, metropolis_sample, posterior_mode, BayesEstimate,
    EstimationMethod, MetropolisConfig, PriorSpec,
};
use crate::classical::{hill, weissman_tail_prob};
use crate::epd::{epd_ml_fit, epd_tail_prob, MIN_FIT_K};
use crate::error::{Result, TailError};
use crate::second_order::{tau_hat, RhoMode, RhoSource};
use crate::tail_data::SortedSample;

pub use distributions::{sample_distribution, SimDistribution};
pub use output::{format_sig, read_cells_csv, CSV_HEADER};

/// Fraction of failed cells above which a study is aborted.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Hill,
    EpdMl,
    BayesClosed,
    BayesMcmc,
}

impl Estimator {
    pub const ALL: [Estimator; 4] = [
        Estimator::Hill,
        Estimator::EpdMl,
        Estimator::BayesClosed,
        Estimator::BayesMcmc,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Hill => "hill",
            Estimator::EpdMl => "epd_ml",
            Estimator::BayesClosed => "bayes_closed",
            Estimator::BayesMcmc => "bayes_mcmc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| TailError::invalid(format!("unknown estimator {s:?}")))
    }

    fn is_bayes(&self) -> bool {
        matches!(self, Estimator::BayesClosed | Estimator::BayesMcmc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub distribution: SimDistribution,
    pub n: usize,
    pub reps: usize,
    pub k_grid: Vec<usize>,
    pub estimators: Vec<Estimator>,
    pub rho_mode: RhoMode,
    /// Tail level: estimates target `P(X > Q(1 - target_p)) = target_p`.
    pub target_p: f64,
    pub master_seed: u64,
    /// Width of the moving average applied to each replication's Bayes
    /// paths in `k`; `None` disables smoothing.
    pub smooth_window: Option<usize>,
    /// Chain settings for `bayes_mcmc`; the seed is replaced per cell.
    pub mcmc: MetropolisConfig,
    /// Worker threads; `None` uses the global pool. Does not affect results.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl StudyConfig {
    /// Defaults: 1000 replications, `k` from 10 to `n - 10` in steps of 5,
    /// Hill / EPD-ML / closed-form Bayes, estimated `ρ`, `p = 1/n`.
    pub fn new(distribution: SimDistribution, n: usize) -> Self {
        Self {
            distribution,
            n,
            reps: 1000,
            k_grid: Self::default_k_grid(n),
            estimators: vec![Estimator::Hill, Estimator::EpdMl, Estimator::BayesClosed],
            rho_mode: RhoMode::default(),
            target_p: 1.0 / n as f64,
            master_seed: 0,
            smooth_window: Some(5),
            mcmc: MetropolisConfig {
                iterations: 4_000,
                burn_in: 1_000,
                ..MetropolisConfig::default()
            },
            workers: None,
        }
    }

    pub fn default_k_grid(n: usize) -> Vec<usize> {
        (MIN_FIT_K..=n.saturating_sub(10)).step_by(5).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.distribution.validate()?;
        if self.reps == 0 {
            return Err(TailError::invalid("reps must be at least 1"));
        }
        if self.n <= MIN_FIT_K {
            return Err(TailError::invalid(format!("n must exceed {MIN_FIT_K}")));
        }
        if self.k_grid.is_empty() {
            return Err(TailError::invalid("k grid is empty"));
        }
        if let Some(&k) = self.k_grid.iter().find(|&&k| k < MIN_FIT_K || k >= self.n) {
            return Err(TailError::KOutOfRange {
                k,
                min: MIN_FIT_K,
                max: self.n - 1,
            });
        }
        if self.estimators.is_empty() {
            return Err(TailError::invalid("no estimators requested"));
        }
        if !(self.target_p > 0.0 && self.target_p < 1.0) {
            return Err(TailError::invalid(format!("target_p must lie in (0,1), got {}", self.target_p)));
        }
        if let Some(w) = self.smooth_window {
            if w == 0 || w % 2 == 0 {
                return Err(TailError::invalid(format!("smoothing window must be odd, got {w}")));
            }
        }
        if self.estimators.contains(&Estimator::BayesMcmc) && self.mcmc.iterations <= self.mcmc.burn_in {
            return Err(TailError::invalid("mcmc iterations must exceed burn-in"));
        }
        if self.workers == Some(0) {
            return Err(TailError::invalid("workers must be at least 1"));
        }
        Ok(())
    }

    /// The exceedance level `x = Q(1 - target_p)`.
    pub fn x_level(&self) -> Result<f64> {
        self.distribution.true_quantile(1.0 - self.target_p)
    }
}

/// Estimates from one replication, indexed `[estimator][k]` in config order.
/// A cell is `None` when its estimator failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub rho: Option<f64>,
    pub rho_source: Option<RhoSource>,
    pub xi: Vec<Vec<Option<f64>>>,
    pub p: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub estimator: Estimator,
    pub k: usize,
    pub n_used: usize,
    pub excluded: usize,
    pub xi_mean: f64,
    pub xi_bias: f64,
    /// Population form (divisor `n_used`), so `mse = bias² + var`.
    pub xi_var: f64,
    pub xi_mse: f64,
    pub p_rel_bias: f64,
    pub p_rel_var: f64,
    pub p_rel_mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub true_xi: f64,
    pub x_level: f64,
    pub p_true: f64,
    pub reps_used: usize,
    pub total_cells: usize,
    pub excluded_cells: usize,
    /// Replications where `ρ` could not be estimated and `-1` was used.
    pub rho_fallbacks: usize,
    pub cells: Vec<CellSummary>,
    #[serde(skip)]
    pub runtime_secs: f64,
}

impl StudyResult {
    pub fn cell(&self, estimator: Estimator, k: usize) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.estimator == estimator && c.k == k)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn replication_rng(master_seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(rep as u64);
    rng
}

/// Seed for the chain of replication `rep` at threshold index `k`.
pub fn cell_seed(master_seed: u64, rep: usize, k: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(((rep as u64) << 32) ^ k as u64))
}

/// The sample used by replication `rep`.
pub fn replication_sample(cfg: &StudyConfig, rep: usize) -> Result<SortedSample> {
    let mut rng = replication_rng(cfg.master_seed, rep);
    cfg.distribution.sample_with(cfg.n, &mut rng)
}

type Cell = Option<(f64, f64)>;

fn hill_cell(s: &SortedSample, k: usize, x: f64) -> Cell {
    let h = hill(&s.excesses(k).ok()?).xi;
    Some((h, weissman_tail_prob(s, k, x, h).ok()?))
}

fn ml_cell(s: &SortedSample, k: usize, x: f64, rho: f64) -> Cell {
    let e = s.excesses(k).ok()?;
    let tau = tau_hat(rho, hill(&e).xi).ok()?;
    let fit = epd_ml_fit(&e, tau).ok()?;
    Some((fit.params.xi, epd_tail_prob(s, k, x, &fit.params).ok()?))
}

fn bayes_cell(
    cfg: &StudyConfig,
    s: &SortedSample,
    rep: usize,
    k: usize,
    x: f64,
    rho: f64,
    method: Estimator,
) -> Cell {
    let e = s.excesses(k).ok()?;
    let tau = tau_hat(rho, hill(&e).xi).ok()?;
    let prior = PriorSpec::practical(k, s.n(), rho, tau).ok()?;
    let est = match method {
        Estimator::BayesMcmc => {
            let chain_cfg = MetropolisConfig {
                seed: cell_seed(cfg.master_seed, rep, k),
                ..cfg.mcmc
            };
            let chain = metropolis_sample(&e, tau, &prior, &chain_cfg).ok()?;
            let (xi, delta) = posterior_mode(&chain).ok()?;
            BayesEstimate {
                xi,
                delta,
                method: EstimationMethod::Mcmc,
                hpd_xi: None,
            }
        }
        _ => bayes_closed_form(&e, tau, &prior).ok()?,
    };
    Some((est.xi, bayes_tail_prob(s, k, x, &est, tau).ok()?))
}

/// Evaluates the Bayes path at the grid, averaging each grid point over the
/// centered window used by [`crate::bayes::smooth_path`] on the full path
/// `k = 10, …, n-1`.
fn smoothed_bayes_path(
    cfg: &StudyConfig,
    s: &SortedSample,
    rep: usize,
    x: f64,
    rho: f64,
    method: Estimator,
) -> Vec<Cell> {
    let radius = cfg.smooth_window.map_or(0, |w| w / 2);
    let (lo, hi) = (MIN_FIT_K, s.n() - 1);
    let mut raw: BTreeMap<usize, Cell> = BTreeMap::new();
    cfg.k_grid
        .iter()
        .map(|&k| {
            let r = radius.min(k - lo).min(hi - k);
            let mut sum = (0.0, 0.0);
            for j in k - r..=k + r {
                let c = *raw
                    .entry(j)
                    .or_insert_with(|| bayes_cell(cfg, s, rep, j, x, rho, method));
                let (xi, p) = c?;
                sum.0 += xi;
                sum.1 += p;
            }
            let m = (2 * r + 1) as f64;
            Some((sum.0 / m, sum.1 / m))
        })
        .collect()
}

/// Runs every estimator on replication `rep`.
pub fn run_replication(cfg: &StudyConfig, rep: usize, x: f64) -> Result<ReplicationOutcome> {
    let s = replication_sample(cfg, rep)?;
    let rho = cfg.rho_mode.resolve(&s).ok();
    let mut xi = Vec::with_capacity(cfg.estimators.len());
    let mut p = Vec::with_capacity(cfg.estimators.len());
    for &est in &cfg.estimators {
        let cells: Vec<Cell> = match (est, rho) {
            (Estimator::Hill, _) => cfg.k_grid.iter().map(|&k| hill_cell(&s, k, x)).collect(),
            (_, None) => vec![None; cfg.k_grid.len()],
            (Estimator::EpdMl, Some((rho, _))) => {
                cfg.k_grid.iter().map(|&k| ml_cell(&s, k, x, rho)).collect()
            }
            (_, Some((rho, _))) => smoothed_bayes_path(cfg, &s, rep, x, rho, est),
        };
        debug_assert!(est.is_bayes() || est == Estimator::Hill || est == Estimator::EpdMl);
        xi.push(cells.iter().map(|c| c.map(|v| v.0)).collect());
        p.push(cells.iter().map(|c| c.map(|v| v.1)).collect());
    }
    Ok(ReplicationOutcome {
        rho: rho.map(|r| r.0),
        rho_source: rho.map(|r| r.1),
        xi,
        p,
    })
}

fn summarize(estimator: Estimator, k: usize, pairs: &[(f64, f64)], excluded: usize, xi_true: f64, p_true: f64) -> CellSummary {
    let m = pairs.len() as f64;
    let mean = |f: &dyn Fn(&(f64, f64)) -> f64| pairs.iter().map(f).sum::<f64>() / m;
    let xi_mean = mean(&|c| c.0);
    let xi_var = mean(&|c| (c.0 - xi_mean).powi(2));
    let xi_mse = mean(&|c| (c.0 - xi_true).powi(2));
    let rel = |c: &(f64, f64)| c.1 / p_true - 1.0;
    let p_rel_bias = mean(&rel);
    let p_rel_var = mean(&|c| (rel(c) - p_rel_bias).powi(2));
    let p_rel_mse = mean(&|c| rel(c).powi(2));
    CellSummary {
        estimator,
        k,
        n_used: pairs.len(),
        excluded,
        xi_mean,
        xi_bias: xi_mean - xi_true,
        xi_var,
        xi_mse,
        p_rel_bias,
        p_rel_var,
        p_rel_mse,
    }
}

/// Aggregates replication outcomes (in replication order) into cell summaries.
pub fn aggregate(cfg: &StudyConfig, outcomes: &[ReplicationOutcome], x_level: f64) -> Result<StudyResult> {
    let xi_true = cfg.distribution.true_xi();
    let mut cells = Vec::new();
    let mut excluded_cells = 0;
    for (ei, &est) in cfg.estimators.iter().enumerate() {
        for (ki, &k) in cfg.k_grid.iter().enumerate() {
            let pairs: Vec<(f64, f64)> = outcomes
                .iter()
                .filter_map(|o| Some((o.xi[ei][ki]?, o.p[ei][ki]?)))
                .collect();
            let excluded = outcomes.len() - pairs.len();
            excluded_cells += excluded;
            cells.push(summarize(est, k, &pairs, excluded, xi_true, cfg.target_p));
        }
    }
    let total_cells = outcomes.len() * cfg.estimators.len() * cfg.k_grid.len();
    if excluded_cells as f64 > MAX_EXCLUDED_FRACTION * total_cells as f64 {
        return Err(TailError::StudyAborted(format!(
            "{excluded_cells} of {total_cells} estimator cells failed"
        )));
    }
    Ok(StudyResult {
        config: cfg.clone(),
        true_xi: xi_true,
        x_level,
        p_true: cfg.target_p,
        reps_used: outcomes.len(),
        total_cells,
        excluded_cells,
        rho_fallbacks: outcomes
            .iter()
            .filter(|o| o.rho_source == Some(RhoSource::FixedMinusOne) && matches!(cfg.rho_mode, RhoMode::Fraga { .. }))
            .count(),
        cells,
        runtime_secs: 0.0,
    })
}

/// Runs the study and also returns the per-replication outcomes.
pub fn run_study_detailed(cfg: &StudyConfig) -> Result<(StudyResult, Vec<ReplicationOutcome>)> {
    cfg.validate()?;
    let start = Instant::now();
    let x = cfg.x_level()?;
    let work = || -> Result<Vec<ReplicationOutcome>> {
        (0..cfg.reps)
            .into_par_iter()
            .map(|r| run_replication(cfg, r, x))
            .collect()
    };
    let outcomes = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| TailError::invalid(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let mut result = aggregate(cfg, &outcomes, x)?;
    result.runtime_secs = start.elapsed().as_secs_f64();
    Ok((result, outcomes))
}

pub fn run_study(cfg: &StudyConfig) -> Result<StudyResult> {
    run_study_detailed(cfg).map(|(r, _)| r)
}
