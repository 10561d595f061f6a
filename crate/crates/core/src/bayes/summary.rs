//! Chain summaries and path smoothing.

use super::PosteriorChain;
use crate::error::{Result, TailError};

/// The draw with the highest stored log-posterior; earliest index on ties.
pub fn posterior_mode(chain: &PosteriorChain) -> Result<(f64, f64)> {
    let mut best: Option<usize> = None;
    for (i, &lp) in chain.logpost.iter().enumerate() {
        if best.is_none_or(|b| lp > chain.logpost[b]) {
            best = Some(i);
        }
    }
    best.and_then(|i| chain.draws.get(i).copied())
        .ok_or_else(|| TailError::invalid("posterior mode of an empty chain"))
}

/// Shortest interval containing `ceil((1-alpha) m)` of the `m` draws.
/// Ties go to the leftmost window.
pub fn hpd_interval(draws: &[f64], alpha: f64) -> Result<(f64, f64)> {
    let m = draws.len();
    if m < 2 {
        return Err(TailError::invalid(format!("HPD needs at least 2 draws, got {m}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(TailError::invalid(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if draws.iter().any(|d| !d.is_finite()) {
        return Err(TailError::invalid("HPD draws must be finite"));
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    // guard against (1 - alpha) m landing a hair above an integer
    let w = (((1.0 - alpha) * m as f64) - 1e-9).ceil().max(1.0) as usize;
    let w = w.min(m);
    let (mut best_i, mut best_width) = (0, f64::INFINITY);
    for i in 0..=(m - w) {
        let width = sorted[i + w - 1] - sorted[i];
        if width < best_width {
            best_width = width;
            best_i = i;
        }
    }
    Ok((sorted[best_i], sorted[best_i + w - 1]))
}

/// Centered moving average of odd width. Near the ends the window shrinks
/// symmetrically to radius `min(r, i, len - 1 - i)`.
pub fn smooth_path(series: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 || window % 2 == 0 {
        return Err(TailError::invalid(format!("smoothing window must be odd, got {window}")));
    }
    let r = window / 2;
    let len = series.len();
    Ok((0..len)
        .map(|i| {
            let radius = r.min(i).min(len - 1 - i);
            let slice = &series[i - radius..=i + radius];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect())
}
