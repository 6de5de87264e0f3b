//! Within-household final-size distributions.
//!
//! With a fixed infectious period `mu` and household contact rate `lambda_H`,
//! each infective escapes infecting a given co-member with probability
//! `q = 1 - p_H = exp(-lambda_H mu)`. The probability `P(k)` that exactly `k`
//! of `s` susceptibles are infected, starting from `i` infectives, solves the
//! triangular system
//!
//! ```text
//! sum_{k=0}^{l} C(s-k, l-k) P(k) / q^{(k+i)(s-l)} = C(s, l),   l = 0..=s.
//! ```
//!
//! Multiplying row `l` by `q^{(l+i)(s-l)}` gives the forward recursion
//! `P(l) = C(s,l) q^{(l+i)(s-l)} - sum_{k<l} C(s-k,l-k) P(k) q^{(l-k)(s-l)}`,
//! in which every power of `q` is non-negative.

use crate::error::{Error, Result};

fn check_p(p_h: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p_h) {
        return Err(Error::arg(format!("p_H must lie in [0, 1], got {p_h}")));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    acc
}

/// `P(k)` for `k = 0..=s`: exactly `k` of `s` initial susceptibles infected
/// by an outbreak started by `i >= 1` infectives.
pub fn household_final_size(s: usize, i: usize, p_h: f64) -> Result<Vec<f64>> {
    check_p(p_h)?;
    if i == 0 {
        return Err(Error::arg("at least one initial infective is required"));
    }
    let q = 1.0 - p_h;
    let mut p = vec![0.0; s + 1];
    if s == 0 {
        p[0] = 1.0;
        return Ok(p);
    }
    if q == 0.0 {
        p[s] = 1.0;
        return Ok(p);
    }
    for l in 0..=s {
        let escape = (s - l) as i32;
        let mut v = binomial(s, l) as f64 * q.powi((l + i) as i32 * escape);
        for k in 0..l {
            v -= binomial(s - k, l - k) as f64 * p[k] * q.powi((l - k) as i32 * escape);
        }
        if v < 0.0 {
            debug_assert!(v > -1e-10, "final-size recursion lost precision: {v}");
            v = 0.0;
        }
        p[l] = v;
    }
    Ok(p)
}

/// Mean number of initial susceptibles ever infected, `mu_s^(i)`.
pub fn mean_final_size(s: usize, i: usize, p_h: f64) -> Result<f64> {
    let p = household_final_size(s, i, p_h)?;
    Ok(p.iter().enumerate().map(|(k, pk)| k as f64 * pk).sum())
}

/// Expected severity `E(T_A) = mu * (1 + mu_{h-1}^(1))` of a household of
/// size `h` with one initial case.
pub fn household_severity_mean(household_size: usize, p_h: f64, mu: f64) -> Result<f64> {
    if household_size == 0 {
        return Err(Error::arg("household size must be at least 1"));
    }
    if !(mu > 0.0) {
        return Err(Error::arg("mean infectious period must be positive"));
    }
    Ok(mu * (1.0 + mean_final_size(household_size - 1, 1, p_h)?))
}

/// Precomputed `p_s^(i)(k)` for `0 <= s <= s_max`, `1 <= i <= i_max`.
#[derive(Debug, Clone)]
pub struct HouseholdFinalSizeTable {
    p_h: f64,
    s_max: usize,
    i_max: usize,
    // indexed [s][i - 1][k]
    table: Vec<Vec<Vec<f64>>>,
    means: Vec<Vec<f64>>,
}

impl HouseholdFinalSizeTable {
    pub fn new(p_h: f64, s_max: usize, i_max: usize) -> Result<Self> {
        check_p(p_h)?;
        if i_max == 0 {
            return Err(Error::arg("i_max must be at least 1"));
        }
        let mut table = Vec::with_capacity(s_max + 1);
        let mut means = Vec::with_capacity(s_max + 1);
        for s in 0..=s_max {
            let mut row = Vec::with_capacity(i_max);
            let mut mrow = Vec::with_capacity(i_max);
            for i in 1..=i_max {
                let dist = household_final_size(s, i, p_h)?;
                mrow.push(dist.iter().enumerate().map(|(k, p)| k as f64 * p).sum());
                row.push(dist);
            }
            table.push(row);
            means.push(mrow);
        }
        Ok(Self {
            p_h,
            s_max,
            i_max,
            table,
            means,
        })
    }

    pub fn p_h(&self) -> f64 {
        self.p_h
    }

    /// `p_s^(i)(k)`. With `i = 0` nobody can be infected, so the mass sits
    /// at `k = 0`.
    pub fn prob(&self, s: usize, i: usize, k: usize) -> f64 {
        assert!(s <= self.s_max && i <= self.i_max, "({s}, {i}) outside table");
        if k > s {
            return 0.0;
        }
        if i == 0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        self.table[s][i - 1][k]
    }

    pub fn mean(&self, s: usize, i: usize) -> f64 {
        if i == 0 {
            return 0.0;
        }
        self.means[s][i - 1]
    }
}
