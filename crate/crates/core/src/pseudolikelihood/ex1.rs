//! Villages of two-person households.
//!
//! With `pi_j = pi_C^{Zbar} pi_G^{Zbar_j}` the probability that a household
//! in village `j` escapes external infection entirely, households with 0, 1
//! and 2 cases have probabilities `pi_j^2`, `2 pi_j (1 - pi_j)(1 - p_H)` and
//! `2 pi_j (1 - pi_j) p_H + (1 - pi_j)^2`.

use serde::{Deserialize, Serialize};

use super::{maximize_unit_box, weighted_log, PseudoMle};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::params::TransformedParams;
use crate::population::PopulationStructure;
use crate::simulate::FinalSizeData;

/// Per village, the number of households with 0, 1 and 2 cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VillageFinalSize {
    villages: Vec<[u64; 3]>,
}

impl VillageFinalSize {
    pub fn new(villages: Vec<[u64; 3]>) -> Self {
        Self { villages }
    }

    /// Summarises final-size data on a population of two-person households
    /// where both members of a household share one group of rate class 1.
    pub fn from_final_size(data: &FinalSizeData, pop: &PopulationStructure) -> Result<Self> {
        if pop.n_rate_classes() != 1 {
            return Err(Error::data(format!(
                "village layout needs exactly one group rate class, population has {}",
                pop.n_rate_classes()
            )));
        }
        let mut villages = vec![[0u64; 3]; pop.n_groups()];
        for h in 0..pop.n_households() {
            let members = pop.household_members(h);
            let g = pop.group_of(members[0]);
            if members.len() != 2 || g == 0 || members.iter().any(|&i| pop.group_of(i) != g) {
                return Err(Error::data(format!(
                    "household {} is not a two-person household within one village",
                    h + 1
                )));
            }
            villages[g - 1][data.per_household()[h]] += 1;
        }
        Ok(Self { villages })
    }

    pub fn villages(&self) -> &[[u64; 3]] {
        &self.villages
    }

    pub fn n_villages(&self) -> usize {
        self.villages.len()
    }

    pub fn households(&self, j: usize) -> u64 {
        self.villages[j].iter().sum()
    }

    /// Cases in village `j`.
    pub fn cases(&self, j: usize) -> u64 {
        self.villages[j][1] + 2 * self.villages[j][2]
    }

    /// Attack rate in village `j`.
    pub fn attack_rate(&self, j: usize) -> f64 {
        let n = 2 * self.households(j);
        if n == 0 {
            0.0
        } else {
            self.cases(j) as f64 / n as f64
        }
    }

    /// Attack rate over all villages.
    pub fn overall_attack_rate(&self) -> f64 {
        let n: u64 = (0..self.n_villages()).map(|j| 2 * self.households(j)).sum();
        if n == 0 {
            0.0
        } else {
            (0..self.n_villages()).map(|j| self.cases(j)).sum::<u64>() as f64 / n as f64
        }
    }

    /// Flat parameter vector `[p_H, pi_G, pi_C]`, no validation.
    pub(crate) fn loglik_raw(&self, x: &[f64]) -> f64 {
        let (p_h, pi_g, pi_c) = (x[0], x[1], x[2]);
        let zbar = self.overall_attack_rate();
        let mut ll = 0.0;
        for (j, n) in self.villages.iter().enumerate() {
            let pi = pi_c.powf(zbar) * pi_g.powf(self.attack_rate(j));
            let p = household_probs_ex1(pi, p_h);
            for k in 0..3 {
                ll += weighted_log(n[k] as f64, p[k]);
            }
        }
        ll
    }
}

/// Probabilities of 0, 1 and 2 cases in a two-person household.
pub fn household_probs_ex1(pi: f64, p_h: f64) -> [f64; 3] {
    let mixed = 2.0 * pi * (1.0 - pi);
    [pi * pi, mixed * (1.0 - p_h), mixed * p_h + (1.0 - pi) * (1.0 - pi)]
}

pub fn pseudo_loglik_ex1(data: &VillageFinalSize, theta: &TransformedParams) -> Result<f64> {
    theta.validate()?;
    if theta.pi_g.len() != 1 {
        return Err(Error::arg("the village layout has a single group escape probability"));
    }
    Ok(data.loglik_raw(&theta.to_vec()))
}

pub fn pseudo_mle_ex1(data: &VillageFinalSize, exec: Execution) -> Result<PseudoMle> {
    if data.villages.iter().all(|v| v.iter().all(|&c| c == 0)) {
        return Err(Error::data("no households observed"));
    }
    maximize_unit_box(|x| data.loglik_raw(x), 3, exec)
}
