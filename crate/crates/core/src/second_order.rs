//! Second-order rate `rho`: the Fraga Alves estimator with its
//! `min(-0.5, rho)` clamp, and the EPD rate `tau = rho / H`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TailError};
use crate::tail_data::SortedSample;

/// Minimum number of top order statistics for [`rho_fraga`].
pub const MIN_RHO_K1: usize = 10;

/// Upper cap applied to estimated `rho` values.
pub const RHO_CAP: f64 = -0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoSource {
    Estimated,
    FixedMinusOne,
    User,
}

/// The tuning parameter `θ` of the ratio statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FragaTuning {
    /// `θ = 0`: logarithms replace powers.
    #[default]
    Log,
    /// `θ = 1`.
    Power,
}

impl FragaTuning {
    pub fn from_theta(theta: f64) -> Result<Self> {
        if theta == 0.0 {
            Ok(FragaTuning::Log)
        } else if theta == 1.0 {
            Ok(FragaTuning::Power)
        } else {
            Err(TailError::invalid(format!("rho tuning must be 0 or 1, got {theta}")))
        }
    }
}

/// How `rho` is obtained for a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum RhoMode {
    /// Estimate with [`rho_fraga`], fall back to `-1` if not estimable, then clamp.
    Fraga {
        k1: Option<usize>,
        tuning: FragaTuning,
    },
    /// Use the given value as is.
    Fixed { value: f64 },
}

impl Default for RhoMode {
    fn default() -> Self {
        RhoMode::Fraga {
            k1: None,
            tuning: FragaTuning::Log,
        }
    }
}

impl RhoMode {
    /// Resolves the working `rho` for a sample.
    pub fn resolve(&self, s: &SortedSample) -> Result<(f64, RhoSource)> {
        match *self {
            RhoMode::Fraga { k1, tuning } => {
                let k1 = k1.unwrap_or_else(|| default_rho_k1(s.n()));
                match rho_fraga(s, k1, tuning) {
                    Ok(rho) => Ok((clamp_rho(rho), RhoSource::Estimated)),
                    Err(TailError::NonEstimable(_)) => Ok((-1.0, RhoSource::FixedMinusOne)),
                    Err(e) => Err(e),
                }
            }
            RhoMode::Fixed { value } => {
                if !(value < 0.0) {
                    return Err(TailError::invalid(format!("rho must be negative, got {value}")));
                }
                let source = if value == -1.0 {
                    RhoSource::FixedMinusOne
                } else {
                    RhoSource::User
                };
                Ok((value, source))
            }
        }
    }
}

/// `min(n - 1, floor(n^0.975))`.
pub fn default_rho_k1(n: usize) -> usize {
    ((n as f64).powf(0.975).floor() as usize).min(n.saturating_sub(1))
}

/// Fraga Alves, Gomes & de Haan (2003) estimator of `rho` from the top `k1`
/// log-spacings.
///
/// With `M_j = (1/k1) Σ (log X_{n-i+1,n} - log X_{n-k1,n})^j` the ratio
/// statistic is
/// `T = (M1^θ - (M2/2)^{θ/2}) / ((M2/2)^{θ/2} - (M3/6)^{θ/3})`
/// (logarithms when `θ = 0`), and `rho = -|3(T-1)/(T-3)|`.
pub fn rho_fraga(s: &SortedSample, k1: usize, tuning: FragaTuning) -> Result<f64> {
    let n = s.n();
    if k1 < MIN_RHO_K1 || k1 >= n {
        return Err(TailError::KOutOfRange {
            k: k1,
            min: MIN_RHO_K1,
            max: n - 1,
        });
    }
    let v = s.values();
    let log_t = v[n - k1 - 1].ln();
    let (mut m1, mut m2, mut m3) = (0.0, 0.0, 0.0);
    for &x in &v[n - k1..] {
        let d = x.ln() - log_t;
        m1 += d;
        m2 += d * d;
        m3 += d * d * d;
    }
    let kf = k1 as f64;
    let (m1, m2, m3) = (m1 / kf, m2 / kf, m3 / kf);
    if !(m1 > 0.0 && m2 > 0.0 && m3 > 0.0) {
        return Err(TailError::invalid(
            "degenerate log-moment statistics (constant tail)",
        ));
    }
    let (a, b, c) = match tuning {
        FragaTuning::Log => (m1.ln(), 0.5 * (m2 / 2.0).ln(), (m3 / 6.0).ln() / 3.0),
        FragaTuning::Power => (m1, (m2 / 2.0).sqrt(), (m3 / 6.0).cbrt()),
    };
    let denom = b - c;
    if !(denom > 0.0) {
        return Err(TailError::NonEstimable(format!(
            "ratio statistic denominator {denom} is not positive"
        )));
    }
    let t = (a - b) / denom;
    if !t.is_finite() || t == 3.0 {
        return Err(TailError::NonEstimable(format!("ratio statistic T = {t}")));
    }
    let rho = -(3.0 * (t - 1.0) / (t - 3.0)).abs();
    if !rho.is_finite() || rho == 0.0 {
        return Err(TailError::NonEstimable(format!("rho estimate {rho}")));
    }
    Ok(rho)
}

/// `min(-0.5, rho)`.
pub fn clamp_rho(rho: f64) -> f64 {
    rho.min(RHO_CAP)
}

/// `tau = rho / H`.
pub fn tau_hat(rho: f64, hill: f64) -> Result<f64> {
    if !(rho < 0.0) {
        return Err(TailError::invalid(format!("rho must be negative, got {rho}")));
    }
    if !(hill > 0.0) {
        return Err(TailError::NonEstimable(format!(
            "tau needs a positive Hill estimate, got {hill}"
        )));
    }
    Ok(rho / hill)
}

/// `rho` together with the EPD rate it induces at one Hill estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderParams {
    pub rho: f64,
    pub tau: f64,
    pub hill: f64,
    pub source: RhoSource,
}

impl SecondOrderParams {
    pub fn new(rho: f64, hill: f64, source: RhoSource) -> Result<Self> {
        let tau = tau_hat(rho, hill)?;
        Ok(Self {
            rho,
            tau,
            hill,
            source,
        })
    }
}
