//! Small derivative-free helpers for bounded maximisation: BFGS with central
//! difference gradients and exhaustive grid search.

use crate::par::{self, Execution};

#[derive(Debug, Clone)]
pub struct Maximum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], fx: f64) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for k in 0..x.len() {
        let h = 1e-6 * x[k].abs().max(1.0);
        probe[k] = x[k] + h;
        let up = f(&probe);
        probe[k] = x[k] - h;
        let down = f(&probe);
        probe[k] = x[k];
        g[k] = match (up.is_finite(), down.is_finite()) {
            (true, true) => (up - down) / (2.0 * h),
            (true, false) => (up - fx) / h,
            (false, true) => (fx - down) / h,
            (false, false) => 0.0,
        };
    }
    g
}

/// Unconstrained BFGS ascent with backtracking line search. Converged when
/// the gradient max-norm drops below `gtol`.
pub fn bfgs_maximize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], gtol: f64, max_iter: usize) -> Maximum {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if !fx.is_finite() {
        return Maximum {
            x,
            value: fx,
            iterations: 0,
            converged: false,
        };
    }
    let mut g = gradient(&f, &x, fx);
    // inverse of the negated Hessian
    let mut h: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        if g.iter().fold(0.0_f64, |m, v| m.max(v.abs())) < gtol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut d: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i][j] * g[j]).sum()).collect();
        let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        if !(slope > 0.0) {
            for i in 0..n {
                for j in 0..n {
                    h[i][j] = if i == j { 1.0 } else { 0.0 };
                }
            }
            d = g.clone();
            slope = g.iter().map(|v| v * v).sum();
        }
        let longest = d.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut step = if longest > 10.0 { 10.0 / longest } else { 1.0 };
        let mut next = None;
        while step > 1e-14 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            let ft = f(&trial);
            if ft.is_finite() && ft >= fx + 1e-4 * step * slope {
                next = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew)) = next else {
            // no further ascent along any tried step: stationary to rounding
            converged = g.iter().fold(0.0_f64, |m, v| m.max(v.abs())) < gtol.sqrt();
            break;
        };
        let gn = gradient(&f, &xn, fnew);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        // ascent on f is descent on -f: y = -(gn - g)
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| b - a).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-12 {
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i][j] * y[j]).sum()).collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            let rho = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += (1.0 + yhy * rho) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
        let gain = fnew - fx;
        x = xn;
        fx = fnew;
        g = gn;
        if gain.abs() < 1e-14 * fx.abs().max(1.0) && step < 1e-6 {
            converged = true;
            break;
        }
    }
    Maximum {
        x,
        value: fx,
        iterations,
        converged,
    }
}

/// Evaluates `f` on the Cartesian product `axis^dim` and returns the best
/// point. Ties go to the first point in row-major order.
pub fn grid_maximize<F>(axis: &[f64], dim: usize, exec: Execution, f: F) -> Option<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let m = axis.len();
    let total = m.checked_pow(dim as u32)?;
    let point = |mut idx: usize| -> Vec<f64> {
        let mut p = vec![0.0; dim];
        for k in (0..dim).rev() {
            p[k] = axis[idx % m];
            idx /= m;
        }
        p
    };
    let (best, value) = par::argmax_range(total, exec, |i| f(&point(i)))?;
    Some((point(best), value))
}

/// `n + 1` equally spaced points on `[0, 1]`.
pub fn unit_axis(n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 / n as f64).collect()
}
