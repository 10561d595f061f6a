//! Bayesian EPD estimation with a shrinkage prior on `δ`.
//!
//! The prior is a product of a gamma(ε, 1) density on `ξ` (a proper stand-in
//! for the `e^{-ξ}/ξ` MDI prior) and a zero-mean normal on `δ` with variance
//! `σ²`, left-truncated at `max(-1, 1/τ)`. Choosing `σ² = (k/n)^{-2ρ}` lets the
//! prior pin `δ` near zero for small `k` (Hill-like behaviour) and release it
//! for large `k` (EPD-ML-like behaviour).
//!
//! Two routes to the posterior mode are provided: a first-order closed form
//! ([`bayes_closed_form`]) and random-walk Metropolis
//! ([`metropolis_sample`] followed by [`posterior_mode`]).

mod closed_form;
mod mcmc;
mod summary;

use serde::{Deserialize, Serialize};

use crate::epd::{delta_lower_bound, epd_tail_prob, EpdLikelihood, EpdParams};
use crate::error::{Result, TailError};
use crate::tail_data::{ExcessSet, SortedSample};

pub use closed_form::{
    bayes_closed_form, bayes_closed_form_with, ml_first_order, Centering, ClosedFormOptions,
    PrecisionSign,
};
pub use mcmc::{bayes_mcmc, metropolis_sample, MetropolisConfig, PosteriorChain};
pub use summary::{hpd_interval, posterior_mode, smooth_path};

/// Shape of the gamma approximation to the MDI prior on `ξ`.
pub const DEFAULT_GAMMA_SHAPE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    /// Variance of the (untruncated) normal prior on `δ`.
    pub sigma2: f64,
    /// Shape `ε` of the gamma(ε, scale 1) prior on `ξ`.
    pub gamma_shape: f64,
    /// Truncation point `max(-1, 1/τ)` of the `δ` prior.
    pub trunc_lower: f64,
}

impl PriorSpec {
    /// Prior with the default gamma shape, truncated for rate `tau`.
    pub fn new(sigma2: f64, tau: f64) -> Result<Self> {
        if !(tau < 0.0 && tau.is_finite()) {
            return Err(TailError::invalid(format!("tau must be negative, got {tau}")));
        }
        Self::with_shape(sigma2, DEFAULT_GAMMA_SHAPE, delta_lower_bound(tau))
    }

    pub fn with_shape(sigma2: f64, gamma_shape: f64, trunc_lower: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(TailError::invalid(format!("prior variance must be positive, got {sigma2}")));
        }
        if !(gamma_shape > 0.0 && gamma_shape.is_finite()) {
            return Err(TailError::invalid(format!("gamma shape must be positive, got {gamma_shape}")));
        }
        if !(-1.0..0.0).contains(&trunc_lower) {
            return Err(TailError::invalid(format!(
                "truncation bound must lie in [-1, 0), got {trunc_lower}"
            )));
        }
        Ok(Self {
            sigma2,
            gamma_shape,
            trunc_lower,
        })
    }

    /// Prior with `σ² = (k/n)^{-2ρ}`.
    pub fn practical(k: usize, n: usize, rho: f64, tau: f64) -> Result<Self> {
        Self::new(prior_variance(k, n, rho)?, tau)
    }
}

/// `σ² = (k/n)^{-2ρ}`.
pub fn prior_variance(k: usize, n: usize, rho: f64) -> Result<f64> {
    if k == 0 || k >= n {
        return Err(TailError::KOutOfRange {
            k,
            min: 1,
            max: n.saturating_sub(1),
        });
    }
    if !(rho < 0.0) {
        return Err(TailError::invalid(format!("rho must be negative, got {rho}")));
    }
    Ok((k as f64 / n as f64).powf(-2.0 * rho))
}

/// Unnormalised gamma(ε, 1) log-density: `(ε - 1) log ξ - ξ`.
pub fn log_prior_xi(xi: f64, gamma_shape: f64) -> f64 {
    if !(xi > 0.0) {
        return f64::NEG_INFINITY;
    }
    (gamma_shape - 1.0) * xi.ln() - xi
}

/// Unnormalised truncated-normal log-density: `-δ²/(2σ²)` above the
/// truncation point, `-∞` at or below it.
pub fn log_prior_delta(delta: f64, prior: &PriorSpec) -> f64 {
    if !(delta > prior.trunc_lower) {
        return f64::NEG_INFINITY;
    }
    -0.5 * delta * delta / prior.sigma2
}

/// Per-observation log-posterior `(1/k)[l(ξ,δ|y) + log π(ξ) + log π(δ)]`.
///
/// The prior normalising constants (which depend only on `σ²`, `ε` and `τ`)
/// are dropped. Outside the parameter region the value is `-∞`.
pub fn log_posterior(xi: f64, delta: f64, e: &ExcessSet, tau: f64, prior: &PriorSpec) -> f64 {
    match EpdLikelihood::new(e, tau) {
        Ok(lik) => Posterior::new(lik, *prior).value(xi, delta),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Log-posterior with the likelihood terms cached for repeated evaluation.
#[derive(Debug, Clone)]
pub(crate) struct Posterior {
    lik: EpdLikelihood,
    prior: PriorSpec,
}

impl Posterior {
    pub(crate) fn new(lik: EpdLikelihood, prior: PriorSpec) -> Self {
        Self { lik, prior }
    }

    pub(crate) fn likelihood(&self) -> &EpdLikelihood {
        &self.lik
    }

    pub(crate) fn value(&self, xi: f64, delta: f64) -> f64 {
        let lp = log_prior_xi(xi, self.prior.gamma_shape) + log_prior_delta(delta, &self.prior);
        if lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let ll = self.lik.value(xi, delta);
        if ll == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        ll + lp / self.lik.k() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMethod {
    ClosedForm,
    Mcmc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpdInterval {
    pub lower: f64,
    pub upper: f64,
    pub coverage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesEstimate {
    pub xi: f64,
    pub delta: f64,
    pub method: EstimationMethod,
    /// Only available from a chain.
    pub hpd_xi: Option<HpdInterval>,
}

/// `(k/n) G_{ξ̂, δ̂, τ}(x / X_{n-k,n})` with the Bayes estimates plugged in.
pub fn bayes_tail_prob(
    s: &SortedSample,
    k: usize,
    x: f64,
    est: &BayesEstimate,
    tau: f64,
) -> Result<f64> {
    let params = EpdParams::new(est.xi, est.delta, tau)?;
    epd_tail_prob(s, k, x, &params)
}
