//! The extended Pareto distribution (EPD).
//!
//! Survival function on `y >= 1`:
//!
//! ```text
//! G(y) = { y (1 + δ - δ y^τ) }^{-1/ξ},   τ < 0 < ξ,   δ > max(-1, 1/τ)
//! ```
//!
//! `δ = 0` recovers the strict Pareto `y^{-1/ξ}`. In practice `τ` is plugged
//! in from outside (`τ = ρ/H`), so the fit is over `(ξ, δ)` only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Open01;
use serde::{Deserialize, Serialize};

use crate::classical::hill;
use crate::error::{Result, TailError};
use crate::optim::{self, BfgsOptions};
use crate::tail_data::{ExcessSet, SortedSample};

/// Minimum number of excesses for [`epd_ml_fit`].
pub const MIN_FIT_K: usize = 10;

/// Upper clamp on `δ` used by the maximum likelihood search.
pub const DELTA_MAX: f64 = 10.0;

/// Lower bound `max(-1, 1/τ)` of the admissible `δ` range.
pub fn delta_lower_bound(tau: f64) -> f64 {
    (-1.0f64).max(1.0 / tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpdParams {
    pub xi: f64,
    pub delta: f64,
    pub tau: f64,
}

impl EpdParams {
    pub fn new(xi: f64, delta: f64, tau: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(TailError::invalid(format!("xi must be positive, got {xi}")));
        }
        if !(tau < 0.0 && tau.is_finite()) {
            return Err(TailError::invalid(format!("tau must be negative, got {tau}")));
        }
        let lower = delta_lower_bound(tau);
        if !(delta > lower && delta.is_finite()) {
            return Err(TailError::invalid(format!(
                "delta = {delta} must exceed max(-1, 1/tau) = {lower}"
            )));
        }
        Ok(Self { xi, delta, tau })
    }

    /// Strict Pareto (`δ = 0`).
    pub fn pareto(xi: f64, tau: f64) -> Result<Self> {
        Self::new(xi, 0.0, tau)
    }

    /// `{y (1 + δ - δ y^τ)}^{-1/ξ}` for `y >= 1`.
    pub fn survival(&self, y: f64) -> Result<f64> {
        if !(y >= 1.0) {
            return Err(TailError::invalid(format!("EPD survival needs y >= 1, got {y}")));
        }
        Ok(self.survival_unchecked(y))
    }

    fn survival_unchecked(&self, y: f64) -> f64 {
        // 1 + δ - δ y^τ, exact at y = 1
        let base = y * (1.0 - self.delta * (self.tau * y.ln()).exp_m1());
        base.powf(-1.0 / self.xi)
    }

    /// The `y >= 1` with `survival(y) = 1 - q`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(TailError::invalid(format!("quantile level must lie in (0,1), got {q}")));
        }
        // Solve log y + log(1 + δ - δ y^τ) = -ξ log(1-q) in t = log y.
        let target = -self.xi * (-q).ln_1p();
        let (d, tau) = (self.delta, self.tau);
        let g = |t: f64| t + (1.0 + d - d * (tau * t).exp()).ln() - target;
        let mut lo = 0.0;
        // 1 + δ - δ y^τ >= min(1, 1 + δ), so t never exceeds this.
        let mut hi = target - (1.0 + d.min(0.0)).ln() + 1e-12;
        let mut t = target.clamp(lo, hi);
        for _ in 0..200 {
            let e = (tau * t).exp();
            let gt = g(t);
            if gt == 0.0 {
                break;
            }
            if gt > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let slope = (1.0 + d - d * (1.0 + tau) * e) / (1.0 + d - d * e);
            let mut next = t - gt / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - t).abs();
            t = next;
            if step <= 1e-15 * t.max(1.0) {
                break;
            }
        }
        Ok(t.exp())
    }

    /// Inverse-transform draws from a caller-owned generator.
    pub fn sample_with<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        (0..count)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                self.quantile(u).expect("Open01 draws lie in (0,1)")
            })
            .collect()
    }

    /// `count` draws, deterministic in `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(count, &mut rng)
    }
}

/// Per-observation EPD log-likelihood of an excess set for fixed `τ`.
///
/// Caches `log y` and `y^τ` so that repeated evaluation in `(ξ, δ)` costs
/// one pass with no transcendental calls beyond two logs per point.
#[derive(Debug, Clone)]
pub struct EpdLikelihood {
    tau: f64,
    mean_log_y: f64,
    y_tau: Vec<f64>,
}

impl EpdLikelihood {
    pub fn new(e: &ExcessSet, tau: f64) -> Result<Self> {
        if !(tau < 0.0 && tau.is_finite()) {
            return Err(TailError::invalid(format!("tau must be negative, got {tau}")));
        }
        Ok(Self {
            tau,
            mean_log_y: hill(e).xi,
            y_tau: e.y().iter().map(|y| y.powf(tau)).collect(),
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn k(&self) -> usize {
        self.y_tau.len()
    }

    /// Mean log-excess (the Hill estimate).
    pub fn hill(&self) -> f64 {
        self.mean_log_y
    }

    pub fn in_region(&self, xi: f64, delta: f64) -> bool {
        xi > 0.0 && xi.is_finite() && delta > delta_lower_bound(self.tau) && delta.is_finite()
    }

    /// `(1/k) l(ξ, δ | y)`; `-∞` outside the parameter region.
    pub fn value(&self, xi: f64, delta: f64) -> f64 {
        if !self.in_region(xi, delta) {
            return f64::NEG_INFINITY;
        }
        let (mut a, mut b) = (0.0, 0.0);
        for &yt in &self.y_tau {
            a += (delta * (1.0 - yt)).ln_1p();
            b += (delta * (1.0 - (1.0 + self.tau) * yt)).ln_1p();
        }
        let k = self.k() as f64;
        -xi.ln() - (1.0 / xi + 1.0) * (self.mean_log_y + a / k) + b / k
    }

    /// Value and gradient with respect to `(ξ, δ)`. `None` outside the region.
    pub fn value_and_grad(&self, xi: f64, delta: f64) -> Option<(f64, [f64; 2])> {
        if !self.in_region(xi, delta) {
            return None;
        }
        let (mut a, mut b, mut da, mut db) = (0.0, 0.0, 0.0, 0.0);
        for &yt in &self.y_tau {
            let u = 1.0 - yt;
            let w = 1.0 - (1.0 + self.tau) * yt;
            a += (delta * u).ln_1p();
            b += (delta * w).ln_1p();
            da += u / (1.0 + delta * u);
            db += w / (1.0 + delta * w);
        }
        let k = self.k() as f64;
        let (a, b, da, db) = (a / k, b / k, da / k, db / k);
        let total_a = self.mean_log_y + a;
        let value = -xi.ln() - (1.0 / xi + 1.0) * total_a + b;
        let d_xi = -1.0 / xi + total_a / (xi * xi);
        let d_delta = -(1.0 / xi + 1.0) * da + db;
        Some((value, [d_xi, d_delta]))
    }
}

/// `(1/k) l(ξ, δ | y)` of the EPD with rate `τ`. Returns `-∞` when
/// `(ξ, δ, τ)` lies outside the parameter region.
pub fn epd_log_likelihood(xi: f64, delta: f64, tau: f64, e: &ExcessSet) -> f64 {
    if !(tau < 0.0 && tau.is_finite()) {
        return f64::NEG_INFINITY;
    }
    EpdLikelihood::new(e, tau)
        .map(|l| l.value(xi, delta))
        .unwrap_or(f64::NEG_INFINITY)
}

/// Analytic gradient of [`epd_log_likelihood`] with respect to `(ξ, δ)`.
pub fn epd_log_likelihood_grad(xi: f64, delta: f64, tau: f64, e: &ExcessSet) -> Option<[f64; 2]> {
    EpdLikelihood::new(e, tau)
        .ok()?
        .value_and_grad(xi, delta)
        .map(|(_, g)| g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpdFit {
    pub params: EpdParams,
    /// Attained mean log-likelihood.
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Maximum likelihood fit of `(ξ, δ)` for fixed `τ`.
///
/// Runs BFGS on `(log ξ, v)` with `δ = lo + (δ_max - lo)·logistic(v)`,
/// `lo = max(-1, 1/τ)`, starting from `ξ = H`, `δ = 0`.
pub fn epd_ml_fit(e: &ExcessSet, tau: f64) -> Result<EpdFit> {
    if e.k() < MIN_FIT_K {
        return Err(TailError::KOutOfRange {
            k: e.k(),
            min: MIN_FIT_K,
            max: usize::MAX,
        });
    }
    let lik = EpdLikelihood::new(e, tau)?;
    let h = lik.hill();
    if !(h > 0.0) {
        return Err(TailError::NonEstimable("all excesses are ties".into()));
    }
    let lo = delta_lower_bound(tau);
    let width = DELTA_MAX - lo;
    let to_delta = |v: f64| lo + width / (1.0 + (-v).exp());
    let v0 = {
        let p = (0.0 - lo) / width;
        (p / (1.0 - p)).ln()
    };

    let objective = |x: [f64; 2]| {
        let xi = x[0].exp();
        let s = 1.0 / (1.0 + (-x[1]).exp());
        let delta = lo + width * s;
        match lik.value_and_grad(xi, delta) {
            Some((v, g)) if v.is_finite() => (-v, [-g[0] * xi, -g[1] * width * s * (1.0 - s)]),
            _ => (f64::INFINITY, [0.0, 0.0]),
        }
    };
    let out = optim::minimize(objective, [h.ln(), v0], BfgsOptions::default());
    let params = EpdParams::new(out.x[0].exp(), to_delta(out.x[1]), tau)?;
    Ok(EpdFit {
        params,
        loglik: -out.fx,
        converged: out.converged && out.fx.is_finite(),
        iterations: out.iterations,
    })
}

/// Tail probability `(k/n) G(x / X_{n-k,n})` for `x` at or above the threshold.
pub fn epd_tail_prob(s: &SortedSample, k: usize, x: f64, p: &EpdParams) -> Result<f64> {
    let threshold = s.threshold(k)?;
    if !(x >= threshold) {
        return Err(TailError::BelowThreshold { x, threshold });
    }
    let frac = k as f64 / s.n() as f64;
    Ok(frac * p.survival(x / threshold)?)
}
