//! Households of two children (one school) and two adults (two workplaces).
//!
//! Each member avoids infection from outside the household independently:
//! a child with probability `psi_c = pi_C^{n_c/N} (pi_G^(1))^{n_s/N_s}`, an
//! adult with `pi_C^{n_c/N} (pi_G^(2))^{n_w/N_w}` using that adult's own
//! workplace. Those infected from outside then seed a within-household
//! epidemic.

use std::collections::HashMap;

use super::{maximize_unit_box, weighted_log, PseudoMle};
use crate::error::{Error, Result};
use crate::hh_finalsize::HouseholdFinalSizeTable;
use crate::par::Execution;
use crate::params::TransformedParams;
use crate::population::{Example2Layout, PopulationStructure};
use crate::simulate::FinalSizeData;

const CELLS: usize = 12;

fn cell_index(i: usize, j: usize, k: usize) -> usize {
    i * 4 + j * 2 + k
}

fn binom(n: usize, k: usize) -> f64 {
    match (n, k) {
        (_, 0) => 1.0,
        (n, k) if k > n => 0.0,
        (n, k) if k == n => 1.0,
        (2, 1) => 2.0,
        (3, 1) | (3, 2) => 3.0,
        (4, 1) | (4, 3) => 4.0,
        (4, 2) => 6.0,
        _ => unreachable!("household has at most four members"),
    }
}

/// All twelve `p(i, j, k)` for external-escape probabilities
/// `psi = [psi_c, psi_f, psi_m]`, indexed `i * 4 + j * 2 + k`. The table
/// must cover `s <= 4`, `i <= 4`.
pub fn household_table_ex2(table: &HouseholdFinalSizeTable, psi: [f64; 3]) -> [f64; CELLS] {
    let [pc, pf, pm] = psi;
    let mut out = [0.0; CELLS];
    for r in 0..=2usize {
        let child = binom(2, r) * pc.powi(2 - r as i32) * (1.0 - pc).powi(r as i32);
        for s in 0..=1usize {
            let female = if s == 0 { pf } else { 1.0 - pf };
            for t in 0..=1usize {
                let male = if t == 0 { pm } else { 1.0 - pm };
                let pa = child * female * male;
                if pa == 0.0 {
                    continue;
                }
                let a = r + s + t;
                if a == 0 {
                    out[0] += pa;
                    continue;
                }
                let left = 4 - a;
                for i in r..=2 {
                    for j in s..=1 {
                        for k in t..=1 {
                            let extra = (i - r) + (j - s) + (k - t);
                            let split =
                                binom(2 - r, i - r) * binom(1 - s, j - s) * binom(1 - t, k - t) / binom(left, extra);
                            out[cell_index(i, j, k)] += pa * table.prob(left, a, extra) * split;
                        }
                    }
                }
            }
        }
    }
    out
}

/// `p(i, j, k)`: probability of `i` infected children, `j` infected females
/// and `k` infected males.
pub fn household_prob_ex2(
    counts: (usize, usize, usize),
    table: &HouseholdFinalSizeTable,
    psi: [f64; 3],
) -> Result<f64> {
    let (i, j, k) = counts;
    if i > 2 || j > 1 || k > 1 {
        return Err(Error::arg(format!("household counts {counts:?} out of range")));
    }
    if psi.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::arg(format!("escape probabilities {psi:?} must lie in [0, 1]")));
    }
    Ok(household_table_ex2(table, psi)[cell_index(i, j, k)])
}

#[derive(Debug, Clone)]
struct Stratum {
    // exponents of pi_G^(1) for children, pi_G^(2) for the female and male
    exponents: [f64; 3],
    counts: [f64; CELLS],
}

/// Per-household final outcomes `(i_h, j_h, k_h)` with the attack rates that
/// enter each household's escape probabilities. Households sharing the same
/// exponents are pooled.
#[derive(Debug, Clone)]
pub struct HouseholdTriples {
    triples: Vec<[u8; 3]>,
    exponents: Vec<[f64; 3]>,
    community: f64,
    strata: Vec<Stratum>,
}

impl HouseholdTriples {
    pub fn new(triples: Vec<[u8; 3]>, layout: &Example2Layout, pop: &PopulationStructure) -> Result<Self> {
        if triples.len() != layout.households.len() {
            return Err(Error::data(format!(
                "{} household outcomes for {} households",
                triples.len(),
                layout.households.len()
            )));
        }
        if let Some((h, t)) = triples
            .iter()
            .enumerate()
            .find(|(_, t)| t[0] > 2 || t[1] > 1 || t[2] > 1)
        {
            return Err(Error::data(format!("household {} has impossible counts {t:?}", h + 1)));
        }
        let mut group_cases = vec![0usize; pop.n_groups() + 1];
        for (h, t) in layout.households.iter().zip(&triples) {
            group_cases[h.school] += t[0] as usize;
            group_cases[h.female_workplace] += t[1] as usize;
            group_cases[h.male_workplace] += t[2] as usize;
        }
        let total: usize = group_cases.iter().sum();
        let rate = |g: usize| group_cases[g] as f64 / pop.group_size(g) as f64;

        let mut pooled: HashMap<[u64; 3], [f64; CELLS]> = HashMap::new();
        let mut order = Vec::new();
        let mut exponents = Vec::with_capacity(triples.len());
        for (h, t) in layout.households.iter().zip(&triples) {
            let e = [rate(h.school), rate(h.female_workplace), rate(h.male_workplace)];
            exponents.push(e);
            let key = e.map(f64::to_bits);
            let slot = pooled.entry(key).or_insert_with(|| {
                order.push(key);
                [0.0; CELLS]
            });
            slot[cell_index(t[0] as usize, t[1] as usize, t[2] as usize)] += 1.0;
        }
        let strata = order
            .into_iter()
            .map(|key| Stratum {
                exponents: key.map(f64::from_bits),
                counts: pooled[&key],
            })
            .collect();
        Ok(Self {
            triples,
            exponents,
            community: total as f64 / pop.n_individuals() as f64,
            strata,
        })
    }

    pub fn from_final_size(data: &FinalSizeData, pop: &PopulationStructure) -> Result<Self> {
        let layout = Example2Layout::from_population(pop)?;
        Self::new(data.triples(&layout), &layout, pop)
    }

    pub fn triples(&self) -> &[[u8; 3]] {
        &self.triples
    }

    pub fn n_households(&self) -> usize {
        self.triples.len()
    }

    /// Overall attack rate `n_c / N`.
    pub fn community_attack_rate(&self) -> f64 {
        self.community
    }

    /// Number of distinct escape-probability strata after pooling.
    pub fn n_strata(&self) -> usize {
        self.strata.len()
    }

    /// Escape probabilities `[psi_c, psi_f, psi_m]` of every household.
    pub fn escape_probabilities(&self, theta: &TransformedParams) -> Vec<[f64; 3]> {
        let base = theta.pi_c.powf(self.community);
        self.exponents
            .iter()
            .map(|e| {
                [
                    base * theta.pi_g[0].powf(e[0]),
                    base * theta.pi_g[1].powf(e[1]),
                    base * theta.pi_g[1].powf(e[2]),
                ]
            })
            .collect()
    }

    /// Flat parameter vector `[p_H, pi_G1, pi_G2, pi_C]`, no validation.
    pub(crate) fn loglik_raw(&self, x: &[f64]) -> f64 {
        let (p_h, pi_g1, pi_g2, pi_c) = (x[0], x[1], x[2], x[3]);
        let table = match HouseholdFinalSizeTable::new(p_h, 4, 4) {
            Ok(t) => t,
            Err(_) => return f64::NEG_INFINITY,
        };
        let base = pi_c.powf(self.community);
        let mut ll = 0.0;
        for s in &self.strata {
            let psi = [
                base * pi_g1.powf(s.exponents[0]),
                base * pi_g2.powf(s.exponents[1]),
                base * pi_g2.powf(s.exponents[2]),
            ];
            let p = household_table_ex2(&table, psi);
            for c in 0..CELLS {
                ll += weighted_log(s.counts[c], p[c]);
            }
        }
        ll
    }
}

pub fn pseudo_loglik_ex2(data: &HouseholdTriples, theta: &TransformedParams) -> Result<f64> {
    theta.validate()?;
    if theta.pi_g.len() != 2 {
        return Err(Error::arg(
            "the schools/workplaces layout has two group escape probabilities",
        ));
    }
    Ok(data.loglik_raw(&theta.to_vec()))
}

pub fn pseudo_mle_ex2(data: &HouseholdTriples, exec: Execution) -> Result<PseudoMle> {
    if data.n_households() == 0 {
        return Err(Error::data("no households observed"));
    }
    maximize_unit_box(|x| data.loglik_raw(x), 4, exec)
}
