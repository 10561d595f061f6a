//! First-order (small `δ`) posterior mode.
//!
//! Expanding the log-posterior around `δ = 0` and setting both partial
//! derivatives to zero gives, with `H` the Hill estimate and
//! `E(s) = (1/k) Σ Y_j^s`,
//!
//! ```text
//! ξ = H + δ (1 - E(τ))
//! δ = (1 - Hτ) / D · (E(τ) - c)
//! D = ξ/(kσ²) - (1 - 2(1 - ξτ)E(τ) + (1 - 2ξτ - ξτ²)E(2τ) - τ(1 - E(τ))E(τ))
//! ```
//!
//! The default centering is `c = 1/(1 - Hτ)`, under which `δ → 0` when the
//! excesses are exactly Pareto (`E(τ) → 1/(1 - ξτ)`). Dropping the
//! `ξ/(kσ²)` term gives the first-order EPD-ML system.

use serde::{Deserialize, Serialize};

use super::{BayesEstimate, EstimationMethod, PriorSpec};
use crate::classical::{hill, moment_stat};
use crate::epd::MIN_FIT_K;
use crate::error::{Result, TailError};
use crate::tail_data::ExcessSet;

/// Centering constant `c` in the `δ` equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// `c = 1/(1 - Hτ)`.
    #[default]
    Consistent,
    /// `c = 1/(Hτ)`.
    Printed,
}

/// Sign of the prior-precision term `ξ/(kσ²)` in `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionSign {
    #[default]
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormOptions {
    pub centering: Centering,
    pub precision_sign: PrecisionSign,
    /// Tolerance on successive `ξ` iterates.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ClosedFormOptions {
    fn default() -> Self {
        Self {
            centering: Centering::default(),
            precision_sign: PrecisionSign::default(),
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

struct Moments {
    k: f64,
    h: f64,
    e1: f64,
    e2: f64,
}

impl Moments {
    fn new(e: &ExcessSet, tau: f64) -> Result<Self> {
        if e.k() < MIN_FIT_K {
            return Err(TailError::KOutOfRange {
                k: e.k(),
                min: MIN_FIT_K,
                max: usize::MAX,
            });
        }
        if !(tau < 0.0 && tau.is_finite()) {
            return Err(TailError::invalid(format!("tau must be negative, got {tau}")));
        }
        let h = hill(e).xi;
        if !(h > 0.0) {
            return Err(TailError::NonEstimable("Hill estimate is zero".into()));
        }
        Ok(Self {
            k: e.k() as f64,
            h,
            e1: moment_stat(e, tau)?,
            e2: moment_stat(e, 2.0 * tau)?,
        })
    }
}

/// Fixed-point solve of the two-equation system. `sigma2 = None` drops the
/// prior-precision term.
fn solve(
    m: &Moments,
    tau: f64,
    sigma2: Option<f64>,
    opts: &ClosedFormOptions,
) -> Result<(f64, f64)> {
    let Moments { k, h, e1, e2 } = *m;
    let c = match opts.centering {
        Centering::Consistent => 1.0 / (1.0 - h * tau),
        Centering::Printed => 1.0 / (h * tau),
    };
    let sign = match opts.precision_sign {
        PrecisionSign::Plus => 1.0,
        PrecisionSign::Minus => -1.0,
    };
    let numerator = (1.0 - h * tau) * (e1 - c);

    let mut xi = h;
    for _ in 0..opts.max_iter {
        let bracket = 1.0 - 2.0 * (1.0 - xi * tau) * e1
            + (1.0 - 2.0 * xi * tau - xi * tau * tau) * e2
            - tau * (1.0 - e1) * e1;
        let precision = sigma2.map_or(0.0, |s2| sign * xi / (k * s2));
        let d = precision - bracket;
        if !(d.abs() > 1e-12) {
            return Err(TailError::Singular(format!("D = {d} at xi = {xi}")));
        }
        let delta = numerator / d;
        let next = h + delta * (1.0 - e1);
        if !next.is_finite() {
            return Err(TailError::NonEstimable(format!("xi iterate {next}")));
        }
        if (next - xi).abs() < opts.tol {
            if !(next > 0.0) {
                return Err(TailError::NonEstimable(format!("xi estimate {next} is not positive")));
            }
            return Ok((next, delta));
        }
        xi = next;
    }
    Err(TailError::NoConvergence(opts.max_iter))
}

/// Closed-form first-order posterior mode with default options.
pub fn bayes_closed_form(e: &ExcessSet, tau: f64, prior: &PriorSpec) -> Result<BayesEstimate> {
    bayes_closed_form_with(e, tau, prior, &ClosedFormOptions::default())
}

pub fn bayes_closed_form_with(
    e: &ExcessSet,
    tau: f64,
    prior: &PriorSpec,
    opts: &ClosedFormOptions,
) -> Result<BayesEstimate> {
    let m = Moments::new(e, tau)?;
    let (xi, delta) = solve(&m, tau, Some(prior.sigma2), opts)?;
    Ok(BayesEstimate {
        xi,
        delta,
        method: EstimationMethod::ClosedForm,
        hpd_xi: None,
    })
}

/// First-order EPD-ML solution: the same system without the prior term.
pub fn ml_first_order(e: &ExcessSet, tau: f64) -> Result<(f64, f64)> {
    let m = Moments::new(e, tau)?;
    solve(&m, tau, None, &ClosedFormOptions::default())
}
