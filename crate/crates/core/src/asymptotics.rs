//! Limiting bias, variance and MSE of `√k (ξ̂ - ξ)` for the Hill, EPD-ML
//! and shrinkage estimators.
//!
//! Regimes are indexed by `λ = lim √k a(n/k)` and the prior strength
//! `ζ = ξ²(1-2ρ)(1-ρ)²/μ` with `μ = lim k σ²`. `ζ = 0` is the EPD-ML limit,
//! `ζ = ∞` the Hill limit.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TailError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRegime {
    pub xi: f64,
    pub rho: f64,
    pub lambda: f64,
    pub zeta: f64,
    pub mu: Option<f64>,
}

/// `ξ²(1-2ρ)(1-ρ)²`, the constant linking `ζ` and `μ`.
fn zeta_mu_product(xi: f64, rho: f64) -> f64 {
    xi * xi * (1.0 - 2.0 * rho) * (1.0 - rho).powi(2)
}

impl AsymptoticRegime {
    pub fn from_zeta(xi: f64, rho: f64, lambda: f64, zeta: f64) -> Result<Self> {
        Self::check(xi, rho, lambda)?;
        if !(zeta >= 0.0) {
            return Err(TailError::invalid(format!("zeta must be non-negative, got {zeta}")));
        }
        Ok(Self { xi, rho, lambda, zeta, mu: None })
    }

    /// Regime from `μ = lim k σ²`.
    pub fn from_mu(xi: f64, rho: f64, lambda: f64, mu: f64) -> Result<Self> {
        Self::check(xi, rho, lambda)?;
        if !(mu > 0.0) {
            return Err(TailError::invalid(format!("mu must be positive, got {mu}")));
        }
        let zeta = zeta_mu_product(xi, rho) / mu;
        Ok(Self { xi, rho, lambda, zeta, mu: Some(mu) })
    }

    /// Regime at the MSE-optimal prior strength.
    pub fn optimal(xi: f64, rho: f64, lambda: f64) -> Result<Self> {
        Self::check(xi, rho, lambda)?;
        let zeta = zeta_opt(xi, rho, lambda);
        let mu = mu_opt(rho, lambda);
        Ok(Self {
            xi,
            rho,
            lambda,
            zeta,
            mu: (mu > 0.0).then_some(mu),
        })
    }

    fn check(xi: f64, rho: f64, lambda: f64) -> Result<()> {
        if !(xi > 0.0 && rho < 0.0 && lambda >= 0.0) {
            return Err(TailError::invalid(format!(
                "need xi > 0, rho < 0, lambda >= 0; got ({xi}, {rho}, {lambda})"
            )));
        }
        Ok(())
    }
}

/// Asymptotic mean `(λρ/(1-ρ)) · ζ/(ζ + ρ⁴)`.
pub fn asym_mean(r: &AsymptoticRegime) -> f64 {
    let hill_bias = r.lambda * r.rho / (1.0 - r.rho);
    if r.zeta.is_infinite() {
        return hill_bias;
    }
    hill_bias * r.zeta / (r.zeta + r.rho.powi(4))
}

/// Asymptotic variance
/// `ξ²/(1 + ζρ⁻⁴)² · [((1-ρ)/ρ)² + ζ²/ρ⁸ + 2ζ/ρ⁴]`.
pub fn asym_var(r: &AsymptoticRegime) -> f64 {
    if r.zeta.is_infinite() {
        return r.xi * r.xi;
    }
    let (xi, rho, zeta) = (r.xi, r.rho, r.zeta);
    let raw = xi * xi / (1.0 + zeta * rho.powi(-4)).powi(2)
        * (((1.0 - rho) / rho).powi(2) + zeta * zeta / rho.powi(8) + 2.0 * zeta / rho.powi(4));
    if raw.is_finite() {
        raw
    } else {
        asym_var_stable(r)
    }
}

/// [`asym_var`] multiplied through by `ρ⁸`; no negative powers of `ρ`.
fn asym_var_stable(r: &AsymptoticRegime) -> f64 {
    let (xi, rho, zeta) = (r.xi, r.rho, r.zeta);
    let r4 = rho.powi(4);
    xi * xi * (rho.powi(6) * (1.0 - rho).powi(2) + zeta * zeta + 2.0 * zeta * r4) / (r4 + zeta).powi(2)
}

/// `ζ_opt = ξ²(1-2ρ)/λ²`; `+∞` at `λ = 0` (the pure Hill regime).
pub fn zeta_opt(xi: f64, rho: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return f64::INFINITY;
    }
    xi * xi * (1.0 - 2.0 * rho) / (lambda * lambda)
}

/// `μ_opt = (1-ρ)² λ²`.
pub fn mu_opt(rho: f64, lambda: f64) -> f64 {
    (1.0 - rho).powi(2) * lambda * lambda
}

/// `σ²_opt = (1-ρ)² a(n/k)²` for a supplied value of `a(n/k)`.
pub fn sigma2_opt(rho: f64, a_nk: f64) -> f64 {
    (1.0 - rho).powi(2) * a_nk * a_nk
}

/// Optimal asymptotic MSE, factored as `ξ²` plus a correction increasing in `λ²`:
///
/// ```text
/// ξ² + ξ²ρ² (1-2ρ)/(1-ρ)² · λ² (ξ²(1-2ρ) + λ²ρ⁴(1-ρ)²) / (ξ²(1-2ρ) + λ²ρ⁴)²
/// ```
pub fn mse_opt(xi: f64, rho: f64, lambda: f64) -> f64 {
    xi * xi + mse_opt_excess(xi, rho, lambda)
}

/// The correction term of [`mse_opt`] above `ξ²`.
pub fn mse_opt_excess(xi: f64, rho: f64, lambda: f64) -> f64 {
    let x2 = xi * xi;
    let l2 = lambda * lambda;
    let r4 = rho.powi(4);
    let c = 1.0 - 2.0 * rho;
    let num = x2 * c + l2 * r4 * (1.0 - rho).powi(2);
    let den = (x2 * c + l2 * r4).powi(2);
    x2 * rho * rho * c / (1.0 - rho).powi(2) * l2 * num / den
}

/// The same optimum written as a weighted average of the Hill MSE
/// `ξ² + λ²ρ²/(1-ρ)²`, `ξ²`, and the EPD-ML MSE `ξ²(1-ρ)²/ρ²`.
pub fn mse_opt_weighted(xi: f64, rho: f64, lambda: f64) -> f64 {
    let x2 = xi * xi;
    let l2 = lambda * lambda;
    let c = 1.0 - 2.0 * rho;
    let w_hill = x2 * x2 * c * c;
    let w_mid = 2.0 * x2 * rho.powi(4) * l2 * c;
    let w_ml = l2 * l2 * rho.powi(8);
    let hill = x2 + l2 * rho * rho / (1.0 - rho).powi(2);
    let ml = x2 * (1.0 - rho).powi(2) / (rho * rho);
    (w_hill * hill + w_mid * x2 + w_ml * ml) / (w_hill + w_mid + w_ml)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitKind {
    Hill,
    EpdMl,
}

/// Limiting MSE of the Hill (`ξ² + λ²ρ²/(1-ρ)²`) or EPD-ML (`ξ²((1-ρ)/ρ)²`)
/// estimator.
pub fn limit_mse(kind: LimitKind, xi: f64, rho: f64, lambda: f64) -> f64 {
    match kind {
        LimitKind::Hill => xi * xi + (lambda * rho / (1.0 - rho)).powi(2),
        LimitKind::EpdMl => xi * xi * ((1.0 - rho) / rho).powi(2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const XI: [f64; 3] = [0.25, 0.5, 1.0];
    const RHO: [f64; 3] = [-2.0, -1.0, -0.5];

    fn lambdas() -> Vec<f64> {
        (0..=40).map(|i| 10f64.powf(-3.0 + 0.1 * f64::from(i))).collect()
    }

    #[test]
    fn mean_examples() {
        let r = AsymptoticRegime::from_zeta(0.5, -1.0, 1.0, 0.0).unwrap();
        assert_eq!(asym_mean(&r), 0.0);
        let r = AsymptoticRegime::from_zeta(0.5, -1.0, 1.0, f64::INFINITY).unwrap();
        assert_eq!(asym_mean(&r), -0.5);
        let r = AsymptoticRegime::from_zeta(0.5, -1.0, 1.0, 1e15).unwrap();
        assert_relative_eq!(asym_mean(&r), -0.5, max_relative = 1e-12);
        let r = AsymptoticRegime::from_zeta(0.5, -1.0, 1.0, 0.75).unwrap();
        assert_relative_eq!(asym_mean(&r), -0.5 * 0.75 / 1.75, max_relative = 1e-14);
        assert!((asym_mean(&r) + 0.214286).abs() < 1e-6);
    }

    #[test]
    fn var_examples() {
        for &xi in &XI {
            for &rho in &RHO {
                let r = AsymptoticRegime::from_zeta(xi, rho, 1.0, 0.0).unwrap();
                assert_relative_eq!(asym_var(&r), xi * xi * ((1.0 - rho) / rho).powi(2), max_relative = 1e-14);
                let r = AsymptoticRegime::from_zeta(xi, rho, 1.0, 1e12).unwrap();
                assert_relative_eq!(asym_var(&r), xi * xi, max_relative = 1e-9);
            }
        }
        let r = AsymptoticRegime::from_zeta(0.5, -1.0, 1.0, 0.75).unwrap();
        assert_relative_eq!(asym_var(&r), 0.25 * 6.0625 / 3.0625, max_relative = 1e-14);
        assert!((asym_var(&r) - 0.494898).abs() < 1e-6);
    }

    #[test]
    fn stable_var_agrees() {
        for &xi in &XI {
            for &rho in &[-2.0, -1.0, -0.5, -0.1, -0.01] {
                for &zeta in &[0.0, 1e-3, 0.1, 1.0, 10.0, 1e3] {
                    let r = AsymptoticRegime::from_zeta(xi, rho, 1.0, zeta).unwrap();
                    assert_relative_eq!(asym_var(&r), asym_var_stable(&r), max_relative = 1e-10);
                }
            }
        }
    }

    #[test]
    fn zeta_and_mu() {
        assert_relative_eq!(zeta_opt(0.5, -1.0, 1.0), 0.75, max_relative = 1e-15);
        assert_eq!(zeta_opt(0.5, -1.0, 0.0), f64::INFINITY);
        assert!(zeta_opt(0.5, -1.0, 1e8) < 1e-15);
        assert_relative_eq!(zeta_opt(1.0, -1.0, 1.0), 4.0 * zeta_opt(0.5, -1.0, 1.0), max_relative = 1e-15);
        assert_eq!(mu_opt(-1.0, 1.0), 4.0);
        assert_eq!(mu_opt(-1.0, 0.0), 0.0);
        assert_eq!(sigma2_opt(-1.0, 0.5), 1.0);
        for &xi in &XI {
            for &rho in &RHO {
                for l in lambdas() {
                    let r = AsymptoticRegime::from_mu(xi, rho, l, mu_opt(rho, l)).unwrap();
                    assert_relative_eq!(r.zeta, zeta_opt(xi, rho, l), max_relative = 1e-12);
                    assert_relative_eq!(r.zeta * r.mu.unwrap(), zeta_mu_product(xi, rho), max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn mse_limits() {
        for &xi in &XI {
            for &rho in &RHO {
                assert_eq!(mse_opt(xi, rho, 0.0), xi * xi);
                assert_relative_eq!(
                    mse_opt(xi, rho, 1e6),
                    limit_mse(LimitKind::EpdMl, xi, rho, 1e6),
                    max_relative = 1e-9
                );
            }
        }
        assert_eq!(limit_mse(LimitKind::Hill, 0.5, -1.0, 0.0), 0.25);
        assert_eq!(limit_mse(LimitKind::EpdMl, 0.5, -1.0, 0.0), 1.0);
        assert_eq!(limit_mse(LimitKind::EpdMl, 0.5, -1.0, 7.0), 1.0);
    }

    #[test]
    fn mse_identities_on_grid() {
        for &xi in &XI {
            for &rho in &RHO {
                for l in lambdas() {
                    let factored = mse_opt(xi, rho, l);
                    assert_relative_eq!(mse_opt_weighted(xi, rho, l), factored, max_relative = 1e-10);
                    let r = AsymptoticRegime::optimal(xi, rho, l).unwrap();
                    assert_relative_eq!(asym_mean(&r).powi(2) + asym_var(&r), factored, max_relative = 1e-10);
                    assert!(factored <= limit_mse(LimitKind::EpdMl, xi, rho, l) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn small_lambda_follows_hill() {
        for &xi in &XI {
            for &rho in &RHO {
                let l = 1e-3;
                let ratio = (mse_opt(xi, rho, l) - limit_mse(LimitKind::Hill, xi, rho, l)).abs() / (l * l);
                assert!(ratio < 0.05, "xi {xi} rho {rho}: {ratio}");
            }
        }
    }

    #[test]
    fn correction_increases_in_lambda() {
        for &xi in &XI {
            for &rho in &RHO {
                let ls = lambdas();
                for w in ls.windows(2) {
                    assert!(mse_opt_excess(xi, rho, w[1]) > mse_opt_excess(xi, rho, w[0]));
                }
            }
        }
    }

    #[test]
    fn regime_validation() {
        assert!(AsymptoticRegime::from_zeta(0.0, -1.0, 1.0, 1.0).is_err());
        assert!(AsymptoticRegime::from_zeta(0.5, 0.0, 1.0, 1.0).is_err());
        assert!(AsymptoticRegime::from_zeta(0.5, -1.0, -1.0, 1.0).is_err());
        assert!(AsymptoticRegime::from_zeta(0.5, -1.0, 1.0, -1.0).is_err());
        assert!(AsymptoticRegime::from_mu(0.5, -1.0, 1.0, 0.0).is_err());
        let r = AsymptoticRegime::optimal(0.5, -1.0, 0.0).unwrap();
        assert_eq!(r.zeta, f64::INFINITY);
        assert_eq!(asym_var(&r), 0.25);
    }
}
