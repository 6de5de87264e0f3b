//! Complete-data likelihood of the contact rates.
//!
//! For an outbreak observed on `[0, t]` the log-likelihood is
//!
//! ```text
//! l = sum_{infections r, t_r < t} log( S^{HG}_{ij}(t_r-) * (lambda_H I^H_i(t_r-)
//!          + lambda_G^(j) I^G_j(t_r-) / n_j + lambda_C I(t_r-) / N) )
//!     - int_0^t ( lambda_H sum_i S^H_i I^H_i + sum_j lambda_G^(j) S^G_j I^G_j / n_j
//!                 + lambda_C S I / N ) ds
//! ```
//!
//! All counting processes are piecewise constant, so the integral is an exact
//! sum over inter-event intervals. The log-likelihood is linear in the rates
//! inside each logarithm and in the integral, hence concave. Everything the
//! rates touch is precomputed once in [`CompleteDataLikelihood`]: per-event
//! covariates and the total exposure for each rate.
//!
//! Initial cases are conditioned on and contribute no hazard factor.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{ContactRates, PeriodDistribution};
use crate::population::PopulationStructure;
use crate::simulate::EventLog;

/// Right-continuous integer step function on `[0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPath {
    initial: i64,
    times: Vec<f64>,
    values: Vec<i64>,
}

impl StepPath {
    /// Builds the path `initial + sum of deltas with time <= t`.
    pub fn from_changes(initial: i64, mut changes: Vec<(f64, i64)>) -> Self {
        changes.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut times = Vec::with_capacity(changes.len());
        let mut values: Vec<i64> = Vec::with_capacity(changes.len());
        let mut current = initial;
        for (t, d) in changes {
            current += d;
            if times.last() == Some(&t) {
                *values.last_mut().expect("paired with times") = current;
            } else {
                times.push(t);
                values.push(current);
            }
        }
        Self { initial, times, values }
    }

    pub fn constant(v: i64) -> Self {
        Self::from_changes(v, Vec::new())
    }

    pub fn value_at(&self, t: f64) -> i64 {
        match self.times.partition_point(|&s| s <= t) {
            0 => self.initial,
            k => self.values[k - 1],
        }
    }

    /// Value just before `t`.
    pub fn left_limit(&self, t: f64) -> i64 {
        match self.times.partition_point(|&s| s < t) {
            0 => self.initial,
            k => self.values[k - 1],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.times
    }

    pub fn min_max(&self) -> (i64, i64) {
        self.values
            .iter()
            .fold((self.initial, self.initial), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// `int_0^horizon self(s) * other(s) ds`.
    pub fn integral_product(&self, other: &StepPath, horizon: f64) -> f64 {
        let (mut i, mut j) = (0, 0);
        let (mut a, mut b) = (self.initial, other.initial);
        let mut last = 0.0;
        let mut acc = 0.0;
        loop {
            let next_a = self.times.get(i).copied().unwrap_or(f64::INFINITY);
            let next_b = other.times.get(j).copied().unwrap_or(f64::INFINITY);
            let next = next_a.min(next_b).min(horizon);
            if next > last {
                acc += (a * b) as f64 * (next - last);
                last = next;
            }
            if next >= horizon {
                return acc;
            }
            if next_a == next {
                a = self.values[i];
                i += 1;
            }
            if next_b == next {
                b = other.values[j];
                j += 1;
            }
        }
    }
}

/// Susceptible and infective counting processes at every level.
#[derive(Debug, Clone)]
pub struct TrajectoryState {
    pub susceptible: StepPath,
    pub infective: StepPath,
    pub household_susceptible: Vec<StepPath>,
    pub household_infective: Vec<StepPath>,
    pub group_susceptible: Vec<StepPath>,
    pub group_infective: Vec<StepPath>,
    /// `S^{HG}_{ij}` for every (household, group) pair that occurs.
    pub household_group_susceptible: HashMap<(usize, usize), StepPath>,
}

fn validate_log(log: &EventLog, pop: &PopulationStructure) -> Result<()> {
    let mut seen = vec![false; pop.n_individuals()];
    for r in &log.records {
        if r.id >= pop.n_individuals() {
            return Err(Error::data(format!("individual {} is not in the population", r.id)));
        }
        if std::mem::replace(&mut seen[r.id], true) {
            return Err(Error::data(format!(
                "individual {} is infected while no longer susceptible",
                r.id
            )));
        }
        if r.household != pop.household_of(r.id) || r.group != pop.group_of(r.id) {
            return Err(Error::data(format!(
                "record for {} disagrees with the population",
                r.id
            )));
        }
        if ![r.t_inf, r.latent, r.infectious]
            .iter()
            .all(|t| t.is_finite() && *t >= 0.0)
        {
            return Err(Error::data(format!("record for {} has invalid times", r.id)));
        }
    }
    Ok(())
}

impl TrajectoryState {
    pub fn from_log(log: &EventLog, pop: &PopulationStructure) -> Result<Self> {
        validate_log(log, pop)?;
        let nh = pop.n_households();
        let ng = pop.n_groups() + 1;
        let mut s_all = Vec::new();
        let mut i_all = Vec::new();
        let mut hs: Vec<Vec<(f64, i64)>> = vec![Vec::new(); nh];
        let mut hi: Vec<Vec<(f64, i64)>> = vec![Vec::new(); nh];
        let mut gs: Vec<Vec<(f64, i64)>> = vec![Vec::new(); ng];
        let mut gi: Vec<Vec<(f64, i64)>> = vec![Vec::new(); ng];
        let mut hgs: HashMap<(usize, usize), Vec<(f64, i64)>> = HashMap::new();
        for i in 0..pop.n_individuals() {
            hgs.entry((pop.household_of(i), pop.group_of(i))).or_default();
        }
        for r in &log.records {
            let (h, g) = (r.household, r.group);
            s_all.push((r.t_inf, -1));
            hs[h].push((r.t_inf, -1));
            gs[g].push((r.t_inf, -1));
            hgs.get_mut(&(h, g)).expect("seeded above").push((r.t_inf, -1));
            for (t, d) in [(r.onset(), 1), (r.removal(), -1)] {
                i_all.push((t, d));
                hi[h].push((t, d));
                gi[g].push((t, d));
            }
        }
        let mut hg_size: HashMap<(usize, usize), i64> = HashMap::new();
        for i in 0..pop.n_individuals() {
            *hg_size.entry((pop.household_of(i), pop.group_of(i))).or_default() += 1;
        }
        Ok(Self {
            susceptible: StepPath::from_changes(pop.n_individuals() as i64, s_all),
            infective: StepPath::from_changes(0, i_all),
            household_susceptible: hs
                .into_iter()
                .enumerate()
                .map(|(h, c)| StepPath::from_changes(pop.household_size(h) as i64, c))
                .collect(),
            household_infective: hi.into_iter().map(|c| StepPath::from_changes(0, c)).collect(),
            group_susceptible: gs
                .into_iter()
                .enumerate()
                .map(|(g, c)| StepPath::from_changes(pop.group_size(g) as i64, c))
                .collect(),
            group_infective: gi.into_iter().map(|c| StepPath::from_changes(0, c)).collect(),
            household_group_susceptible: hgs
                .into_iter()
                .map(|(k, c)| (k, StepPath::from_changes(hg_size[&k], c)))
                .collect(),
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct EventCovariates {
    household: f64,
    class: usize,
    group: f64,
    community: f64,
}

/// Sufficient statistics of the complete-data likelihood for one dataset.
/// Rates are passed flattened as `[lambda_H, lambda_G^(1..=K), lambda_C]`.
#[derive(Debug, Clone)]
pub struct CompleteDataLikelihood {
    n_classes: usize,
    events: Vec<EventCovariates>,
    exposure: Vec<f64>,
    log_susceptible_factor: f64,
    horizon: f64,
}

impl CompleteDataLikelihood {
    pub fn new(log: &EventLog, pop: &PopulationStructure, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::arg("observation horizon must be positive"));
        }
        let traj = TrajectoryState::from_log(log, pop)?;
        let n = pop.n_individuals() as f64;
        let k = pop.n_rate_classes();

        let mut events = Vec::new();
        let mut log_s = 0.0;
        for r in log.records.iter().filter(|r| !r.is_initial() && r.t_inf < horizon) {
            let t = r.t_inf;
            let class = pop.rate_class(r.group);
            let group = if class == 0 {
                0.0
            } else {
                traj.group_infective[r.group].left_limit(t) as f64 / pop.group_size(r.group) as f64
            };
            let s_hg = traj.household_group_susceptible[&(r.household, r.group)].left_limit(t);
            if s_hg <= 0 {
                return Err(Error::data(format!(
                    "individual {} infected at {t} when no susceptible remained in its household/group cell",
                    r.id
                )));
            }
            log_s += (s_hg as f64).ln();
            events.push(EventCovariates {
                household: traj.household_infective[r.household].left_limit(t) as f64,
                class,
                group,
                community: traj.infective.left_limit(t) as f64 / n,
            });
        }

        let mut exposure = vec![0.0; k + 2];
        exposure[0] = traj
            .household_susceptible
            .iter()
            .zip(&traj.household_infective)
            .map(|(s, i)| s.integral_product(i, horizon))
            .sum();
        for g in 1..=pop.n_groups() {
            let c = pop.rate_class(g);
            exposure[c] += traj.group_susceptible[g].integral_product(&traj.group_infective[g], horizon)
                / pop.group_size(g) as f64;
        }
        exposure[k + 1] = traj.susceptible.integral_product(&traj.infective, horizon) / n;

        Ok(Self {
            n_classes: k,
            events,
            exposure,
            log_susceptible_factor: log_s,
            horizon,
        })
    }

    pub fn dim(&self) -> usize {
        self.n_classes + 2
    }

    pub fn n_events(&self) -> usize {
        self.events.len()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `[int S^H I^H, int S^G I^G / n_j per class, int S I / N]`.
    pub fn exposure(&self) -> &[f64] {
        &self.exposure
    }

    fn hazard(&self, e: &EventCovariates, rates: &[f64]) -> f64 {
        let g = if e.class == 0 { 0.0 } else { rates[e.class] * e.group };
        rates[0] * e.household + g + rates[self.n_classes + 1] * e.community
    }

    fn covariates(&self, e: &EventCovariates) -> Vec<(usize, f64)> {
        let mut x = vec![(0, e.household), (self.n_classes + 1, e.community)];
        if e.class != 0 {
            x.push((e.class, e.group));
        }
        x
    }

    fn check(&self, rates: &[f64]) -> Result<()> {
        if rates.len() != self.dim() {
            return Err(Error::arg(format!(
                "expected {} rates, got {}",
                self.dim(),
                rates.len()
            )));
        }
        if rates.iter().any(|&r| !(r >= 0.0) || !r.is_finite()) {
            return Err(Error::arg(format!("rates must be finite and non-negative: {rates:?}")));
        }
        Ok(())
    }

    /// Log-likelihood; `-inf` if some observed infection had zero hazard.
    pub fn log_likelihood(&self, rates: &[f64]) -> Result<f64> {
        self.check(rates)?;
        Ok(self.log_likelihood_unchecked(rates))
    }

    /// No argument validation; `rates` must have length [`Self::dim`].
    pub fn log_likelihood_unchecked(&self, rates: &[f64]) -> f64 {
        let mut ll = self.log_susceptible_factor;
        for e in &self.events {
            let h = self.hazard(e, rates);
            if !(h > 0.0) {
                return f64::NEG_INFINITY;
            }
            ll += h.ln();
        }
        ll - rates.iter().zip(&self.exposure).map(|(r, a)| r * a).sum::<f64>()
    }

    /// `d l / d lambda`, with groups of the same class pooled.
    pub fn score(&self, rates: &[f64]) -> Result<Vec<f64>> {
        self.check(rates)?;
        let mut g: Vec<f64> = self.exposure.iter().map(|a| -a).collect();
        for e in &self.events {
            let h = self.hazard(e, rates);
            for (k, x) in self.covariates(e) {
                g[k] += x / h;
            }
        }
        Ok(g)
    }

    /// Second derivatives `d^2 l / d lambda_k d lambda_l` (row-major).
    pub fn hessian(&self, rates: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check(rates)?;
        let d = self.dim();
        let mut h = vec![vec![0.0; d]; d];
        for e in &self.events {
            let lam = self.hazard(e, rates);
            let x = self.covariates(e);
            for &(k, xk) in &x {
                for &(l, xl) in &x {
                    h[k][l] -= xk * xl / (lam * lam);
                }
            }
        }
        Ok(h)
    }

    /// Wald standard errors from the observed information. Components at the
    /// boundary (rate exactly zero) are skipped in the inversion and reported
    /// from their own diagonal entry.
    pub fn standard_errors(&self, rates: &[f64]) -> Result<Vec<f64>> {
        let h = self.hessian(rates)?;
        let free: Vec<usize> = (0..self.dim()).filter(|&k| rates[k] > 0.0).collect();
        let info: Vec<Vec<f64>> = free.iter().map(|&k| free.iter().map(|&l| -h[k][l]).collect()).collect();
        let inv = invert_spd(&info).ok_or_else(|| Error::data("observed information is singular"))?;
        let mut se = vec![f64::NAN; self.dim()];
        for (a, &k) in free.iter().enumerate() {
            se[k] = inv[a][a].sqrt();
        }
        for k in 0..self.dim() {
            if rates[k] == 0.0 && h[k][k] < 0.0 {
                se[k] = (-1.0 / h[k][k]).sqrt();
            }
        }
        Ok(se)
    }
}

pub(crate) fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > 0.0) {
                    return None;
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

pub(crate) fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    x
}

fn invert_spd(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let l = cholesky(a)?;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            cholesky_solve(&l, &e)
        })
        .collect();
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

pub fn log_likelihood(log: &EventLog, pop: &PopulationStructure, rates: &ContactRates, horizon: f64) -> Result<f64> {
    CompleteDataLikelihood::new(log, pop, horizon)?.log_likelihood(&rates.to_vec())
}

pub fn score(log: &EventLog, pop: &PopulationStructure, rates: &ContactRates, horizon: f64) -> Result<Vec<f64>> {
    CompleteDataLikelihood::new(log, pop, horizon)?.score(&rates.to_vec())
}

/// Log of the period-density product: the part of the likelihood that only
/// involves latent and infectious durations. Initially infective cases have
/// no observed latent period.
pub fn log_period_factor(
    log: &EventLog,
    latent: &PeriodDistribution,
    infectious: &PeriodDistribution,
    horizon: f64,
) -> f64 {
    let mut acc = 0.0;
    for r in &log.records {
        if r.t_inf >= horizon {
            continue;
        }
        let skip_latent = r.is_initial() && r.latent == 0.0;
        let f_e = if skip_latent { 1.0 } else { latent.density(r.latent) };
        let factor = if horizon < r.onset() {
            latent.survivor(horizon - r.t_inf)
        } else if horizon < r.removal() {
            f_e * infectious.survivor(horizon - r.onset())
        } else {
            f_e * infectious.density(r.infectious)
        };
        acc += factor.ln();
    }
    acc
}

/// Transmission log-likelihood plus the period-density product.
pub fn log_likelihood_with_periods(
    log: &EventLog,
    pop: &PopulationStructure,
    rates: &ContactRates,
    horizon: f64,
    latent: &PeriodDistribution,
    infectious: &PeriodDistribution,
) -> Result<f64> {
    Ok(log_likelihood(log, pop, rates, horizon)? + log_period_factor(log, latent, infectious, horizon))
}

#[derive(Debug, Clone, Serialize)]
pub struct MleResult {
    pub rates: ContactRates,
    pub loglik: f64,
    /// Max-norm of the score over components not at the zero boundary.
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub at_boundary: Vec<bool>,
}

const LOG_RATE_FLOOR: f64 = -30.0;
const MAX_ITER: usize = 200;

/// Maximises the complete-data log-likelihood by damped Newton steps on
/// log-rates. A component whose log-rate falls below -30 is reported as
/// exactly zero.
pub fn mle(log: &EventLog, pop: &PopulationStructure, horizon: f64, init: &ContactRates) -> Result<MleResult> {
    let lik = CompleteDataLikelihood::new(log, pop, horizon)?;
    mle_from(&lik, &init.to_vec())
}

pub fn mle_from(lik: &CompleteDataLikelihood, init: &[f64]) -> Result<MleResult> {
    lik.check(init)?;
    let d = lik.dim();
    let mut rates: Vec<f64> = init.iter().map(|&r| r.max(1e-6)).collect();
    let mut free = vec![true; d];

    // A rate with exposure but no event that could be attributed to it has a
    // strictly decreasing likelihood: the maximiser is zero.
    let mut used = vec![false; d];
    for e in &lik.events {
        for (k, x) in lik.covariates(e) {
            if x > 0.0 {
                used[k] = true;
            }
        }
    }
    for k in 0..d {
        if !used[k] && lik.exposure[k] > 0.0 {
            rates[k] = 0.0;
            free[k] = false;
        }
    }

    let mut ll = lik.log_likelihood_unchecked(&rates);
    if !ll.is_finite() {
        return Err(Error::data("log-likelihood is -inf at the starting rates"));
    }
    let mut iterations = 0;
    let mut converged = false;
    let mut polish = 1;
    while iterations < MAX_ITER {
        let idx: Vec<usize> = (0..d).filter(|&k| free[k]).collect();
        if idx.is_empty() {
            converged = true;
            break;
        }
        let raw = lik.score(&rates)?;
        let hess = lik.hessian(&rates)?;
        let g: Vec<f64> = idx.iter().map(|&k| rates[k] * raw[k]).collect();
        let gmax = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if gmax < 1e-9 {
            converged = true;
            // one more Newton step squeezes the raw score down to rounding level
            if polish == 0 {
                break;
            }
            polish -= 1;
        }
        iterations += 1;

        let m = idx.len();
        // Hessian in log coordinates: diag(l) H diag(l) + diag(g)
        let curv: Vec<Vec<f64>> = (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| -rates[idx[a]] * rates[idx[b]] * hess[idx[a]][idx[b]])
                    .collect()
            })
            .collect();
        let mut full = curv.clone();
        for a in 0..m {
            full[a][a] -= g[a];
        }
        let dir = match cholesky(&full) {
            Some(l) => cholesky_solve(&l, &g),
            None => {
                let mut ridge = curv.clone();
                let scale = (0..m).map(|a| curv[a][a]).fold(1e-12, f64::max);
                for a in 0..m {
                    ridge[a][a] += 1e-10 * scale;
                }
                match cholesky(&ridge) {
                    Some(l) => cholesky_solve(&l, &g),
                    None => g.clone(),
                }
            }
        };
        let longest = dir.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let cap = if longest > 5.0 { 5.0 / longest } else { 1.0 };

        let mut step = cap;
        let mut accepted = false;
        while step > 1e-12 {
            let mut trial = rates.clone();
            for (a, &k) in idx.iter().enumerate() {
                trial[k] = (rates[k].ln() + step * dir[a]).exp();
            }
            let t_ll = lik.log_likelihood_unchecked(&trial);
            // near the optimum the gain drops below rounding in the objective;
            // there a step is judged by the score instead
            let flat = t_ll >= ll - 1e-12 * (1.0 + ll.abs()) && scaled_score_norm(lik, &trial, &idx) < gmax;
            if t_ll > ll || flat {
                rates = trial;
                ll = t_ll;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        for &k in &idx {
            if rates[k].ln() < LOG_RATE_FLOOR {
                rates[k] = 0.0;
                free[k] = false;
                ll = lik.log_likelihood_unchecked(&rates);
            }
        }
        if !accepted && converged {
            break;
        }
        if !accepted {
            // no ascent possible along the Newton direction: we are at the
            // optimum up to rounding
            converged = gmax < 1e-6;
            break;
        }
    }

    // Log coordinates approach a zero optimum only asymptotically, and the
    // scaled score vanishes first. Pin such rates to the boundary when that
    // costs nothing, so the information of the rest stays well conditioned.
    if converged {
        let raw = lik.score(&rates)?;
        for k in 0..d {
            if free[k] && raw[k] < 0.0 && rates[k] * raw[k].abs() < 1e-6 {
                let mut trial = rates.clone();
                trial[k] = 0.0;
                let t_ll = lik.log_likelihood_unchecked(&trial);
                if t_ll >= ll - 1e-12 * (1.0 + ll.abs()) {
                    rates = trial;
                    ll = t_ll;
                    free[k] = false;
                }
            }
        }
    }

    let raw = lik.score(&rates)?;
    let gradient_norm = (0..d).filter(|&k| free[k]).fold(0.0_f64, |m, k| m.max(raw[k].abs()));
    Ok(MleResult {
        rates: ContactRates::from_slice(&rates),
        loglik: ll,
        gradient_norm,
        iterations,
        converged,
        at_boundary: free.iter().map(|f| !f).collect(),
    })
}

fn scaled_score_norm(lik: &CompleteDataLikelihood, rates: &[f64], idx: &[usize]) -> f64 {
    match lik.score(rates) {
        Ok(s) => idx.iter().fold(0.0_f64, |m, &k| m.max((rates[k] * s[k]).abs())),
        Err(_) => f64::INFINITY,
    }
}

/// Sample means of the latent and infectious durations. Every record must be
/// fully observed before the log's horizon.
pub fn estimate_period_means(log: &EventLog) -> Result<(f64, f64)> {
    if log.records.is_empty() {
        return Err(Error::data("event log is empty"));
    }
    if let Some(r) = log.records.iter().find(|r| r.removal() > log.horizon) {
        return Err(Error::Censored(r.id));
    }
    let n = log.records.len() as f64;
    let lat = log.records.iter().map(|r| r.latent).sum::<f64>() / n;
    let inf = log.records.iter().map(|r| r.infectious).sum::<f64>() / n;
    Ok((lat, inf))
}
