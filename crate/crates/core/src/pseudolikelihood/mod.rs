//! Final-size pseudolikelihoods. Households are treated as independent given
//! the observed attack rates in their groups and in the whole community.
//!
//! Parameters are the escape probabilities `(p_H, pi_G..., pi_C)`, all in
//! `[0, 1]`.

mod ex1;
mod ex2;

pub use ex1::{household_probs_ex1, pseudo_loglik_ex1, pseudo_mle_ex1, VillageFinalSize};
pub use ex2::{household_prob_ex2, household_table_ex2, pseudo_loglik_ex2, pseudo_mle_ex2, HouseholdTriples};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::{bfgs_maximize, grid_maximize, unit_axis};
use crate::par::{self, Execution};
use crate::params::TransformedParams;

/// Maximiser of a pseudolikelihood over the unit box.
#[derive(Debug, Clone, Serialize)]
pub struct PseudoMle {
    pub params: TransformedParams,
    pub loglik: f64,
    /// Best value seen on the coarse grid used to seed the search.
    pub grid_loglik: f64,
    pub at_lower: Vec<bool>,
    pub at_upper: Vec<bool>,
    pub converged: bool,
}

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-4, 1.0 - 1e-4);
    (p / (1.0 - p)).ln()
}

/// Grid search on `[0, 1]^dim`, then BFGS in logit coordinates from the
/// corners of `{0.25, 0.75}^dim`, the centre and the best grid point, then
/// snapping coordinates that ended next to a face onto it.
pub(crate) fn maximize_unit_box<F>(f: F, dim: usize, exec: Execution) -> Result<PseudoMle>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let axis = unit_axis(if dim <= 3 { 20 } else { 10 });
    let (grid_x, grid_value) = grid_maximize(&axis, dim, exec, &f).ok_or_else(|| Error::arg("empty parameter box"))?;

    let mut starts: Vec<Vec<f64>> = (0..1usize << dim)
        .map(|mask| (0..dim).map(|k| if mask >> k & 1 == 1 { 0.75 } else { 0.25 }).collect())
        .collect();
    starts.push(vec![0.5; dim]);
    starts.push(grid_x.clone());

    let in_box = |u: &[f64]| -> f64 {
        let x: Vec<f64> = u.iter().map(|&v| logistic(v)).collect();
        f(&x)
    };
    let runs = par::map_range(starts.len(), exec, |s| {
        let u0: Vec<f64> = starts[s].iter().map(|&p| logit(p)).collect();
        bfgs_maximize(in_box, &u0, 1e-9, 500)
    });
    let best = runs
        .iter()
        .filter(|r| r.value.is_finite())
        .max_by(|a, b| a.value.total_cmp(&b.value));

    let (mut x, mut value, converged) = match best {
        Some(r) => (
            r.x.iter().map(|&v| logistic(v)).collect::<Vec<f64>>(),
            r.value,
            r.converged,
        ),
        None if grid_value.is_finite() => (grid_x.clone(), grid_value, false),
        None => return Err(Error::NoFiniteStart(starts.len())),
    };
    for k in 0..dim {
        for bound in [0.0, 1.0] {
            if (x[k] - bound).abs() < 1e-3 {
                let mut y = x.clone();
                y[k] = bound;
                let v = f(&y);
                if v >= value - 1e-9 {
                    x = y;
                    value = v;
                }
            }
        }
    }
    if grid_value > value {
        x = grid_x;
        value = grid_value;
    }
    Ok(PseudoMle {
        params: TransformedParams::from_slice(&x),
        loglik: value,
        grid_loglik: grid_value,
        at_lower: x.iter().map(|&v| v == 0.0).collect(),
        at_upper: x.iter().map(|&v| v == 1.0).collect(),
        converged,
    })
}

/// `log(count * p)`-style accumulation that keeps `0 * log 0 = 0`.
#[inline]
pub(crate) fn weighted_log(count: f64, p: f64) -> f64 {
    if count == 0.0 {
        0.0
    } else {
        count * p.ln()
    }
}
