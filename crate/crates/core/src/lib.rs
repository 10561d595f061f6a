//! Tail-index and tail-probability estimation for Pareto-type data.
//!
//! The crate is organised bottom-up:
//!
//! - [`tail_data`]: order statistics and relative excesses over a threshold.
//! - [`classical`]: Hill, the empirical moment statistic `E_k(s)` and Weissman.
//! - [`second_order`]: estimation of the second-order rate `rho` and the
//!   derived EPD rate `tau = rho / H`.
//! - [`epd`]: the extended Pareto distribution (survival, likelihood,
//!   maximum likelihood fit, sampling).
//! - [`bayes`]: the shrinkage estimator with a normal prior on `delta`,
//!   in closed form or by Metropolis sampling, plus HPD intervals.
//! - [`asymptotics`]: limiting bias, variance and MSE curves.
//! - [`study`]: a seeded, parallel Monte Carlo harness.

// `!(x > 0.0)` guards reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod bayes;
pub mod classical;
pub mod epd;
mod error;
mod optim;
pub mod second_order;
pub mod study;
pub mod tail_data;

pub use bayes::{
    bayes_closed_form, bayes_tail_prob, hpd_interval, log_posterior, metropolis_sample,
    posterior_mode, prior_variance, smooth_path, BayesEstimate, Centering, ClosedFormOptions,
    EstimationMethod, HpdInterval, MetropolisConfig, PosteriorChain, PriorSpec,
};
pub use classical::{hill, moment_stat, weissman_tail_prob, HillEstimate};
pub use epd::{epd_log_likelihood, epd_ml_fit, epd_tail_prob, EpdFit, EpdParams};
pub use error::{Result, TailError};
pub use second_order::{clamp_rho, rho_fraga, tau_hat, FragaTuning, RhoSource, SecondOrderParams};
pub use tail_data::{load_sample, ExcessSet, SortedSample};
