//! Hill estimator, the moment statistic `E_k(s)` and Weissman's tail probability.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TailError};
use crate::tail_data::{ExcessSet, SortedSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HillEstimate {
    /// Mean log-excess. Zero iff every excess is a tie at the threshold.
    pub xi: f64,
    pub k: usize,
}

/// Hill estimator: the mean of the log-excesses.
pub fn hill(e: &ExcessSet) -> HillEstimate {
    let k = e.k();
    let xi = e.y().iter().map(|y| y.ln()).sum::<f64>() / k as f64;
    HillEstimate { xi, k }
}

/// `E_k(s) = (1/k) Σ Y_j^s` for `s < 0`; lies in `(0, 1]`.
pub fn moment_stat(e: &ExcessSet, s: f64) -> Result<f64> {
    if !(s < 0.0) {
        return Err(TailError::invalid(format!("moment_stat needs s < 0, got {s}")));
    }
    Ok(e.y().iter().map(|y| y.powf(s)).sum::<f64>() / e.k() as f64)
}

/// Weissman extrapolation `(k/n) (x / X_{n-k,n})^{-1/xi}` for `x` at or above
/// the threshold.
pub fn weissman_tail_prob(s: &SortedSample, k: usize, x: f64, xi: f64) -> Result<f64> {
    let threshold = s.threshold(k)?;
    if !(xi > 0.0) {
        return Err(TailError::invalid(format!("tail index must be positive, got {xi}")));
    }
    if !(x >= threshold) {
        return Err(TailError::BelowThreshold { x, threshold });
    }
    let frac = k as f64 / s.n() as f64;
    Ok(frac * (x / threshold).powf(-1.0 / xi))
}
