//! Componentwise Metropolis-Hastings samplers.
//!
//! Final-size posteriors use `U(0, 1)` priors with independent `U(0, 1)`
//! proposals for each escape probability, so acceptance reduces to a
//! likelihood ratio. Complete-data posteriors use exponential(1) priors on the
//! rates with Gaussian random-walk proposals; non-positive proposals are
//! rejected. Proposal scales may adapt during burn-in only.

mod diagnostics;
mod summary;

pub use diagnostics::{acceptance_rates, autocorrelation, effective_sample_size};
pub use summary::{rstar_ex1, rstar_ex2, summarize, ParamSummary, PosteriorSummary, Samples};

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::{mle_from, CompleteDataLikelihood};
use crate::par::{self, Execution};
use crate::params::names_for_groups;
use crate::pseudolikelihood::{HouseholdTriples, VillageFinalSize};
use crate::simulate::replicate_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Random-walk standard deviations; `None` uses 0.1 for every rate.
    pub proposal_sd: Option<Vec<f64>>,
    /// Adapt random-walk scales towards 44% acceptance during burn-in.
    pub tune: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            iterations: 200_000,
            burn_in: 20_000,
            thin: 10,
            seed: 1,
            proposal_sd: None,
            tune: true,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations <= self.burn_in {
            return Err(Error::arg(format!(
                "iterations ({}) must exceed burn-in ({})",
                self.iterations, self.burn_in
            )));
        }
        if self.thin == 0 {
            return Err(Error::arg("thinning must be at least 1"));
        }
        if let Some(sd) = &self.proposal_sd {
            if sd.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
                return Err(Error::arg("proposal standard deviations must be positive"));
            }
        }
        Ok(())
    }

    pub fn retained(&self) -> usize {
        (self.iterations - self.burn_in) / self.thin
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Proposal {
    /// Independent `U(0, 1)` draws for every component.
    UniformIndependence,
    /// Gaussian random walk with per-component standard deviations.
    RandomWalk(Vec<f64>),
}

/// Retained draws of one chain.
#[derive(Debug, Clone)]
pub struct Chain {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Post burn-in counts per component.
    pub accepted: Vec<u64>,
    pub proposed: Vec<u64>,
    /// Random-walk scales used after burn-in.
    pub proposal_sd: Option<Vec<f64>>,
}

impl Chain {
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[k]).collect()
    }
}

const TUNE_BATCH: usize = 100;

/// Systematic-scan componentwise Metropolis-Hastings on `log_target`, which
/// must include the log prior (up to a constant).
pub fn run_componentwise<F, R>(
    log_target: F,
    init: Vec<f64>,
    proposal: Proposal,
    names: Vec<String>,
    config: &ChainConfig,
    rng: &mut R,
) -> Result<Chain>
where
    F: Fn(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    config.validate()?;
    let d = init.len();
    if names.len() != d {
        return Err(Error::arg("one name per parameter is required"));
    }
    let mut sd = match &proposal {
        Proposal::RandomWalk(s) if s.len() == d => Some(s.clone()),
        Proposal::RandomWalk(_) => return Err(Error::arg("one proposal sd per parameter is required")),
        Proposal::UniformIndependence => None,
    };
    let mut x = init;
    let mut lp = log_target(&x);
    if !lp.is_finite() {
        return Err(Error::data("target density is zero at the initial point"));
    }
    let mut accepted = vec![0u64; d];
    let mut proposed = vec![0u64; d];
    let mut batch = vec![0usize; d];
    let mut rows = Vec::with_capacity(config.retained());

    for it in 0..config.iterations {
        let sampling = it >= config.burn_in;
        for k in 0..d {
            let old = x[k];
            let candidate = match &sd {
                None => rng.random::<f64>(),
                Some(s) => old + s[k] * rng.sample::<f64, _>(StandardNormal),
            };
            if sampling {
                proposed[k] += 1;
            }
            if sd.is_some() && candidate <= 0.0 {
                continue;
            }
            x[k] = candidate;
            let lp_new = log_target(&x);
            let log_u = rng.random::<f64>().ln();
            if lp_new.is_finite() && log_u < lp_new - lp {
                lp = lp_new;
                if sampling {
                    accepted[k] += 1;
                } else {
                    batch[k] += 1;
                }
            } else {
                x[k] = old;
            }
        }
        if !sampling && config.tune && (it + 1) % TUNE_BATCH == 0 {
            if let Some(s) = sd.as_mut() {
                for k in 0..d {
                    let rate = batch[k] as f64 / TUNE_BATCH as f64;
                    s[k] *= if rate > 0.44 { 1.25 } else { 0.8 };
                    batch[k] = 0;
                }
            }
        }
        if sampling && (it + 1 - config.burn_in).is_multiple_of(config.thin) {
            rows.push(x.clone());
        }
    }
    Ok(Chain {
        names,
        rows,
        accepted,
        proposed,
        proposal_sd: sd,
    })
}

/// Final-size pseudolikelihood to sample from.
#[derive(Debug, Clone, Copy)]
pub enum FinalSizeTarget<'a> {
    Villages(&'a VillageFinalSize),
    Households(&'a HouseholdTriples),
}

impl FinalSizeTarget<'_> {
    pub fn dim(&self) -> usize {
        match self {
            FinalSizeTarget::Villages(_) => 3,
            FinalSizeTarget::Households(_) => 4,
        }
    }

    pub fn names(&self) -> Vec<String> {
        names_for_groups(self.dim() - 2)
    }

    pub fn log_pseudolikelihood(&self, x: &[f64]) -> f64 {
        if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return f64::NEG_INFINITY;
        }
        match self {
            FinalSizeTarget::Villages(d) => d.loglik_raw(x),
            FinalSizeTarget::Households(d) => d.loglik_raw(x),
        }
    }
}

const MAX_INIT_DRAWS: usize = 1000;

/// One chain on `(p_H, pi_G..., pi_C)` under independent `U(0, 1)` priors.
/// `chain` selects an independent random stream for the configured seed.
pub fn run_finalsize_chain(target: FinalSizeTarget<'_>, config: &ChainConfig, chain: u64) -> Result<Chain> {
    config.validate()?;
    let mut rng = replicate_rng(config.seed, chain);
    let d = target.dim();
    let init = (0..MAX_INIT_DRAWS)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect::<Vec<f64>>())
        .find(|x| target.log_pseudolikelihood(x).is_finite())
        .ok_or(Error::NoFiniteStart(MAX_INIT_DRAWS))?;
    run_componentwise(
        |x| target.log_pseudolikelihood(x),
        init,
        Proposal::UniformIndependence,
        target.names(),
        config,
        &mut rng,
    )
}

/// One chain on the contact rates under exponential(1) priors. Starts at
/// `init`, else at the maximum likelihood estimate (zeros nudged to 0.01),
/// else at a prior draw.
pub fn run_complete_chain(
    lik: &CompleteDataLikelihood,
    names: Vec<String>,
    config: &ChainConfig,
    chain: u64,
    init: Option<&[f64]>,
) -> Result<Chain> {
    config.validate()?;
    let d = lik.dim();
    let mut rng = replicate_rng(config.seed, chain);
    let target = |x: &[f64]| {
        if x.iter().any(|&v| !(v > 0.0)) {
            return f64::NEG_INFINITY;
        }
        lik.log_likelihood_unchecked(x) - x.iter().sum::<f64>()
    };
    let start = match init {
        Some(x) => x.to_vec(),
        None => {
            let from_mle = if lik.n_events() > 0 {
                mle_from(lik, &vec![0.5; d])
                    .ok()
                    .map(|m| m.rates.to_vec().into_iter().map(|v| v.max(0.01)).collect::<Vec<f64>>())
                    .filter(|x| target(x).is_finite())
            } else {
                None
            };
            match from_mle {
                Some(x) => x,
                None => (0..MAX_INIT_DRAWS)
                    .map(|_| (0..d).map(|_| rng.sample::<f64, _>(Exp1)).collect::<Vec<f64>>())
                    .find(|x| target(x).is_finite())
                    .ok_or(Error::NoFiniteStart(MAX_INIT_DRAWS))?,
            }
        }
    };
    let sd = config.proposal_sd.clone().unwrap_or_else(|| vec![0.1; d]);
    run_componentwise(target, start, Proposal::RandomWalk(sd), names, config, &mut rng)
}

/// Runs `n` chains, each on its own random stream `0..n`.
pub fn run_chains<F>(n: usize, exec: Execution, f: F) -> Result<Vec<Chain>>
where
    F: Fn(u64) -> Result<Chain> + Sync + Send,
{
    par::map_range(n, exec, |c| f(c as u64)).into_iter().collect()
}
