//! Threshold parameter `R*` of the household branching-process approximation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hh_finalsize::mean_final_size;

fn nonneg(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::arg(format!("{name} must be finite and non-negative, got {v}")));
    }
    Ok(())
}

fn probability(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::arg(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

/// Households of size two in villages: `R* = (lambda_C + lambda_G) mu (1 + p_H)`.
pub fn rstar_example1(lambda_c: f64, lambda_g: f64, mu: f64, p_h: f64) -> Result<f64> {
    nonneg("lambda_C", lambda_c)?;
    nonneg("lambda_G", lambda_g)?;
    if !(mu > 0.0) {
        return Err(Error::arg("mean infectious period must be positive"));
    }
    probability("p_H", p_h)?;
    Ok((lambda_c + lambda_g) * mu * (1.0 + p_h))
}

/// The same threshold written in escape probabilities:
/// `R* = -(ln pi_C + ln pi_G)(1 + p_H)`.
pub fn rstar_from_transformed(pi_c: f64, pi_g: f64, p_h: f64) -> Result<f64> {
    for (name, v) in [("pi_C", pi_c), ("pi_G", pi_g)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::arg(format!("{name} must lie in (0, 1], got {v}")));
        }
    }
    probability("p_H", p_h)?;
    Ok(-(pi_c.ln() + pi_g.ln()) * (1.0 + p_h))
}

/// Mean offspring matrix between household types. Row-major, square,
/// non-negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffspringMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl OffspringMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::arg("offspring matrix must be square and non-empty"));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        if entries.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::arg("offspring matrix entries must be finite and non-negative"));
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }
}

/// Offspring matrix for the schools/workplaces layout. Type 1 households were
/// seeded by a child, type 2 by an adult; `mu3` is `mu_3^(1)`.
pub fn offspring_matrix_example2(
    lambda_c: f64,
    lambda_g1: f64,
    lambda_g2: f64,
    mu: f64,
    mu3: f64,
) -> Result<OffspringMatrix> {
    nonneg("lambda_C", lambda_c)?;
    nonneg("lambda_G1", lambda_g1)?;
    nonneg("lambda_G2", lambda_g2)?;
    if !(mu > 0.0) {
        return Err(Error::arg("mean infectious period must be positive"));
    }
    if !(0.0..=3.0).contains(&mu3) {
        return Err(Error::arg(format!("mu_3^(1) must lie in [0, 3], got {mu3}")));
    }
    let community = (1.0 + mu3) * mu * lambda_c / 2.0;
    let same = 1.0 + mu3 / 3.0;
    let cross = 2.0 * mu3 / 3.0;
    OffspringMatrix::new(vec![
        vec![community + same * mu * lambda_g1, community + cross * mu * lambda_g2],
        vec![community + cross * mu * lambda_g1, community + same * mu * lambda_g2],
    ])
}

/// Largest eigenvalue of `m`. Closed form for 2x2, power iteration otherwise.
pub fn rstar_eigen(m: &OffspringMatrix) -> f64 {
    match m.dim() {
        1 => m.get(0, 0),
        2 => {
            let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
            (a + d) / 2.0 + ((a - d).powi(2) / 4.0 + b * c).sqrt()
        }
        _ => perron_root(m, 1e-10, 100_000),
    }
}

/// Perron root by power iteration on `M + I`, which is primitive whenever `M`
/// is irreducible, starting from the all-ones vector. Stops once the
/// Collatz-Wielandt bounds agree to relative tolerance `tol`.
pub fn perron_root(m: &OffspringMatrix, tol: f64, max_iter: usize) -> f64 {
    let n = m.dim();
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        for i in 0..n {
            y[i] = x[i] + (0..n).map(|j| m.get(i, j) * x[j]).sum::<f64>();
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for i in 0..n {
            if x[i] > 0.0 {
                let r = y[i] / x[i];
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        estimate = 0.5 * (lo + hi) - 1.0;
        let norm = y.iter().cloned().fold(0.0, f64::max);
        if norm == 0.0 {
            return 0.0;
        }
        for i in 0..n {
            x[i] = y[i] / norm;
        }
        if hi - lo <= tol * (hi - 1.0).abs().max(f64::MIN_POSITIVE) {
            return hi - 1.0;
        }
    }
    estimate
}

/// Full pipeline for the schools/workplaces layout from contact rates.
pub fn rstar_example2(lambda_h: f64, lambda_c: f64, lambda_g1: f64, lambda_g2: f64, mu: f64) -> Result<f64> {
    nonneg("lambda_H", lambda_h)?;
    let p_h = 1.0 - (-lambda_h * mu).exp();
    let mu3 = mean_final_size(3, 1, p_h)?;
    Ok(rstar_eigen(&offspring_matrix_example2(
        lambda_c, lambda_g1, lambda_g2, mu, mu3,
    )?))
}
