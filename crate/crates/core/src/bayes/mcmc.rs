//! Adaptive random-walk Metropolis on `(log ξ, δ)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::summary::{hpd_interval, posterior_mode};
use super::{BayesEstimate, EstimationMethod, HpdInterval, Posterior, PriorSpec};
use crate::epd::EpdLikelihood;
use crate::error::{Result, TailError};
use crate::tail_data::ExcessSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetropolisConfig {
    /// Total iterations, burn-in included.
    pub iterations: usize,
    /// Leading iterations used for adaptation and then discarded.
    pub burn_in: usize,
    /// Initial proposal standard deviation for `log ξ`.
    pub step_log_xi: f64,
    /// Initial proposal standard deviation for `δ`.
    pub step_delta: f64,
    pub seed: u64,
    pub target_acceptance: f64,
    /// Holds `δ` at this value and samples `ξ` alone.
    pub fix_delta: Option<f64>,
}

impl Default for MetropolisConfig {
    fn default() -> Self {
        Self {
            iterations: 12_000,
            burn_in: 2_000,
            step_log_xi: 0.05,
            step_delta: 0.1,
            seed: 0,
            target_acceptance: 0.234,
            fix_delta: None,
        }
    }
}

impl MetropolisConfig {
    fn validate(&self) -> Result<()> {
        if self.iterations <= self.burn_in {
            return Err(TailError::invalid(format!(
                "iterations ({}) must exceed burn-in ({})",
                self.iterations, self.burn_in
            )));
        }
        if !(self.step_log_xi > 0.0 && self.step_delta > 0.0) {
            return Err(TailError::invalid("proposal steps must be positive"));
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return Err(TailError::invalid("target acceptance must lie in (0,1)"));
        }
        Ok(())
    }
}

/// Post-burn-in draws of `(ξ, δ)` with their per-observation log-posterior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorChain {
    pub draws: Vec<(f64, f64)>,
    pub logpost: Vec<f64>,
    pub acceptance_rate: f64,
    pub burn_in: usize,
    pub seed: u64,
}

impl PosteriorChain {
    pub fn xi_draws(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.0).collect()
    }

    pub fn delta_draws(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.1).collect()
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }
}

/// Running mean and covariance of burn-in states, for proposal shaping.
#[derive(Default)]
struct RunningCov {
    n: f64,
    mean: [f64; 2],
    m2: [[f64; 2]; 2],
}

impl RunningCov {
    fn push(&mut self, x: [f64; 2]) {
        self.n += 1.0;
        let d = [x[0] - self.mean[0], x[1] - self.mean[1]];
        self.mean[0] += d[0] / self.n;
        self.mean[1] += d[1] / self.n;
        let d2 = [x[0] - self.mean[0], x[1] - self.mean[1]];
        for i in 0..2 {
            for j in 0..2 {
                self.m2[i][j] += d[i] * d2[j];
            }
        }
    }

    /// Lower Cholesky factor of the sample covariance, if well conditioned.
    fn cholesky(&self) -> Option<[[f64; 2]; 2]> {
        if self.n < 3.0 {
            return None;
        }
        let c = |i: usize, j: usize| self.m2[i][j] / (self.n - 1.0);
        let a = c(0, 0) + 1e-12;
        let b = c(1, 0);
        let d = c(1, 1) + 1e-12;
        let l00 = a.sqrt();
        let l10 = b / l00;
        let rem = d - l10 * l10;
        if !(rem > 0.0 && l00 > 0.0) {
            return None;
        }
        Some([[l00, 0.0], [l10, rem.sqrt()]])
    }
}

/// Random-walk Metropolis targeting `k · log_posterior` in `(ξ, δ)`.
///
/// The walk runs on `u = log ξ` (with the matching Jacobian) and `δ`. During
/// burn-in the proposal is reshaped from the empirical covariance of the
/// burn-in states and a global scale is tuned toward the target acceptance;
/// both are frozen afterwards. The chain starts at `ξ = H`, `δ = 0`.
pub fn metropolis_sample(
    e: &ExcessSet,
    tau: f64,
    prior: &PriorSpec,
    config: &MetropolisConfig,
) -> Result<PosteriorChain> {
    config.validate()?;
    let post = Posterior::new(EpdLikelihood::new(e, tau)?, *prior);
    let k = post.likelihood().k() as f64;
    let h = post.likelihood().hill();
    if !(h > 0.0) {
        return Err(TailError::NonEstimable("Hill estimate is zero".into()));
    }
    let one_d = config.fix_delta.is_some();

    let log_target = |u: f64, delta: f64| {
        let lp = post.value(u.exp(), delta);
        (k * lp + u, lp)
    };

    let mut u = h.ln();
    let mut delta = config.fix_delta.unwrap_or(0.0);
    let (mut cur_target, mut cur_lp) = log_target(u, delta);
    if !cur_target.is_finite() {
        return Err(TailError::invalid(format!(
            "starting point xi = {h}, delta = {delta} lies outside the posterior support"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut log_scale = 0.0f64;
    let mut shape: Option<[[f64; 2]; 2]> = None;
    let mut cov = RunningCov::default();
    let base = [config.step_log_xi, config.step_delta];
    let d = if one_d { 1.0 } else { 2.0 };
    let optimal = 2.38 / f64::sqrt(d);

    let kept = config.iterations - config.burn_in;
    let mut draws = Vec::with_capacity(kept);
    let mut logpost = Vec::with_capacity(kept);
    let mut accepted_kept = 0usize;

    for it in 0..config.iterations {
        let z0: f64 = rng.sample(StandardNormal);
        let z1: f64 = rng.sample(StandardNormal);
        let scale = log_scale.exp();
        let (du, dd) = match shape {
            Some(l) if !one_d => (
                scale * optimal * l[0][0] * z0,
                scale * optimal * (l[1][0] * z0 + l[1][1] * z1),
            ),
            _ => (scale * base[0] * z0, if one_d { 0.0 } else { scale * base[1] * z1 }),
        };
        let (pu, pd) = (u + du, delta + dd);
        let (prop_target, prop_lp) = log_target(pu, pd);
        let log_ratio = prop_target - cur_target;
        let accept = prop_target.is_finite() && {
            let v: f64 = rng.random();
            log_ratio >= 0.0 || v.ln() < log_ratio
        };
        if accept {
            u = pu;
            delta = pd;
            cur_target = prop_target;
            cur_lp = prop_lp;
        }

        if it < config.burn_in {
            let a = if accept { 1.0 } else { 0.0 };
            let gain = 1.0 / (1.0 + it as f64).powf(0.6);
            log_scale += gain * (a - config.target_acceptance) * 2.0;
            cov.push([u, delta]);
            if !one_d && it >= 200 && it % 100 == 0 {
                if let Some(l) = cov.cholesky() {
                    if shape.is_none() {
                        // rebase the scale onto the covariance-shaped proposal
                        log_scale = 0.0;
                    }
                    shape = Some(l);
                }
            }
        } else {
            if accept {
                accepted_kept += 1;
            }
            draws.push((u.exp(), delta));
            logpost.push(cur_lp);
        }
    }

    let acceptance_rate = accepted_kept as f64 / kept as f64;
    if accepted_kept == 0 || accepted_kept == kept {
        return Err(TailError::DegenerateChain(format!(
            "acceptance rate {acceptance_rate} after adaptation"
        )));
    }
    Ok(PosteriorChain {
        draws,
        logpost,
        acceptance_rate,
        burn_in: config.burn_in,
        seed: config.seed,
    })
}

/// Chain-based estimate: MAP draw for `(ξ, δ)` and the HPD interval of `ξ`.
pub fn bayes_mcmc(
    e: &ExcessSet,
    tau: f64,
    prior: &PriorSpec,
    config: &MetropolisConfig,
    alpha: f64,
) -> Result<(BayesEstimate, PosteriorChain)> {
    let chain = metropolis_sample(e, tau, prior, config)?;
    let (xi, delta) = posterior_mode(&chain)?;
    let (lower, upper) = hpd_interval(&chain.xi_draws(), alpha)?;
    let est = BayesEstimate {
        xi,
        delta,
        method: EstimationMethod::Mcmc,
        hpd_xi: Some(HpdInterval {
            lower,
            upper,
            coverage: 1.0 - alpha,
        }),
    };
    Ok((est, chain))
}
