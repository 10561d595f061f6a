//! Small dense BFGS minimiser used for the two-parameter likelihood fits.

#[derive(Debug, Clone, Copy)]
pub(crate) struct BfgsOptions {
    pub grad_tol: f64,
    pub step_tol: f64,
    pub max_iter: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-8,
            step_tol: 1e-10,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct BfgsOutcome {
    pub x: [f64; 2],
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn mat_vec(h: &[[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [
        h[0][0] * v[0] + h[0][1] * v[1],
        h[1][0] * v[0] + h[1][1] * v[1],
    ]
}

/// Minimises `f`, which returns the value and gradient. Non-finite values
/// are treated as infeasible and rejected by the line search.
pub(crate) fn minimize<F>(f: F, x0: [f64; 2], opts: BfgsOptions) -> BfgsOutcome
where
    F: Fn([f64; 2]) -> (f64, [f64; 2]),
{
    const ARMIJO: f64 = 1e-4;
    const IDENTITY: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];

    let mut x = x0;
    let (mut fx, mut g) = f(x);
    let mut h = IDENTITY;
    let mut fresh = true;

    for iter in 0..opts.max_iter {
        if !fx.is_finite() {
            return BfgsOutcome { x, fx, iterations: iter, converged: false };
        }
        if dot(g, g).sqrt() < opts.grad_tol {
            return BfgsOutcome { x, fx, iterations: iter, converged: true };
        }
        let mut p = mat_vec(&h, g).map(|v| -v);
        let mut slope = dot(g, p);
        if !(slope < 0.0) {
            h = IDENTITY;
            fresh = true;
            p = g.map(|v| -v);
            slope = dot(g, p);
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..80 {
            let trial = [x[0] + alpha * p[0], x[1] + alpha * p[1]];
            let (ft, gt) = f(trial);
            if ft.is_finite() && ft <= fx + ARMIJO * alpha * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, fxn, gn)) = accepted else {
            // no descent possible along p: at the attainable optimum
            return BfgsOutcome { x, fx, iterations: iter + 1, converged: true };
        };

        let s = [xn[0] - x[0], xn[1] - x[1]];
        let y = [gn[0] - g[0], gn[1] - g[1]];
        x = xn;
        fx = fxn;
        g = gn;
        if dot(s, s).sqrt() < opts.step_tol {
            return BfgsOutcome { x, fx, iterations: iter + 1, converged: true };
        }

        let sy = dot(s, y);
        if sy > 1e-14 {
            if fresh {
                let scale = sy / dot(y, y);
                h = [[scale, 0.0], [0.0, scale]];
                fresh = false;
            }
            // H <- (I - r s y^T) H (I - r y s^T) + r s s^T
            let r = 1.0 / sy;
            let hy = mat_vec(&h, y);
            let yhy = dot(y, hy);
            for i in 0..2 {
                for j in 0..2 {
                    h[i][j] += -r * (s[i] * hy[j] + hy[i] * s[j]) + (r * r * yhy + r) * s[i] * s[j];
                }
            }
        }
    }
    BfgsOutcome { x, fx, iterations: opts.max_iter, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: [f64; 2]| {
            let (a, b) = (1.0 - x[0], x[1] - x[0] * x[0]);
            (
                a * a + 100.0 * b * b,
                [-2.0 * a - 400.0 * x[0] * b, 200.0 * b],
            )
        };
        let out = minimize(f, [-1.2, 1.0], BfgsOptions::default());
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-6 && (out.x[1] - 1.0).abs() < 1e-6, "{out:?}");
    }

    #[test]
    fn respects_infeasible_region() {
        // minimum of (x-2)^2 + y^2 restricted to x < 1
        let f = |x: [f64; 2]| {
            if x[0] >= 1.0 {
                (f64::INFINITY, [0.0, 0.0])
            } else {
                ((x[0] - 2.0).powi(2) + x[1] * x[1], [2.0 * (x[0] - 2.0), 2.0 * x[1]])
            }
        };
        let out = minimize(f, [0.0, 1.0], BfgsOptions::default());
        assert!(out.fx.is_finite());
        assert!(out.x[0] < 1.0 && out.x[0] > 0.99, "{out:?}");
    }
}
