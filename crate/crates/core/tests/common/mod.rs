//! Independent numerical oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

/// Maximizes `f` on a box by a dense grid followed by repeated local grids
/// on a shrinking box. No derivatives, no line searches.
pub fn grid_max(f: impl Fn(f64, f64) -> f64, x_range: (f64, f64), y_range: (f64, f64)) -> (f64, f64, f64) {
    let coarse = 240;
    let mut best = (f64::NAN, f64::NAN, f64::NEG_INFINITY);
    let step = |r: (f64, f64), n: usize| (r.1 - r.0) / n as f64;
    let (hx, hy) = (step(x_range, coarse), step(y_range, coarse));
    for i in 0..=coarse {
        for j in 0..=coarse {
            let (x, y) = (x_range.0 + hx * i as f64, y_range.0 + hy * j as f64);
            let v = f(x, y);
            if v > best.2 {
                best = (x, y, v);
            }
        }
    }
    let (mut wx, mut wy) = (2.0 * hx, 2.0 * hy);
    let fine = 20;
    for _ in 0..40 {
        let (cx, cy) = (best.0, best.1);
        for i in 0..=fine {
            for j in 0..=fine {
                let x = (cx - wx + 2.0 * wx * i as f64 / fine as f64).clamp(x_range.0, x_range.1);
                let y = (cy - wy + 2.0 * wy * j as f64 / fine as f64).clamp(y_range.0, y_range.1);
                let v = f(x, y);
                if v > best.2 {
                    best = (x, y, v);
                }
            }
        }
        wx *= 0.5;
        wy *= 0.5;
    }
    best
}

/// Kolmogorov-Smirnov statistic of `sample` against a continuous CDF.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of the KS statistic `d` for sample size `n`, with the
/// Stephens small-sample correction.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=200 {
        let jf = j as f64;
        let term = 2.0 * (-1f64).powi(j - 1) * (-2.0 * jf * jf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Composite Simpson rule with `panels` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels % 2 == 0);
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Mean of the density proportional to `exp(log_density)` on `[a, b]`.
pub fn quadrature_mean(log_density: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let panels = 20_000;
    let peak = (0..=panels)
        .map(|i| log_density(a + (b - a) * i as f64 / panels as f64))
        .fold(f64::NEG_INFINITY, f64::max);
    let dens = |x: f64| (log_density(x) - peak).exp();
    simpson(|x| x * dens(x), a, b, panels) / simpson(dens, a, b, panels)
}

/// Batch-means standard error of the mean of a correlated series.
pub fn batch_means_se(series: &[f64]) -> f64 {
    let m = series.len();
    let b = (m as f64).sqrt().floor() as usize;
    let nb = m / b;
    let means: Vec<f64> = (0..nb)
        .map(|i| series[i * b..(i + 1) * b].iter().sum::<f64>() / b as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / nb as f64;
    let var = means.iter().map(|x| (x - grand).powi(2)).sum::<f64>() / (nb - 1) as f64;
    (var / nb as f64).sqrt()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
