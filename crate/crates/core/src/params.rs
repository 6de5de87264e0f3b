//! Model parameters: contact rates, period distributions and the
//! escape-probability reparameterisation used for final-size inference.

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF};

use crate::error::{Error, Result};
use crate::population::PopulationStructure;

/// Distribution of a latent or infectious period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PeriodDistribution {
    Constant { value: f64 },
    Exponential { mean: f64 },
    Gamma { mean: f64, shape: f64 },
}

impl PeriodDistribution {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            PeriodDistribution::Constant { value } => value >= 0.0 && value.is_finite(),
            PeriodDistribution::Exponential { mean } => mean > 0.0 && mean.is_finite(),
            PeriodDistribution::Gamma { mean, shape } => {
                mean > 0.0 && mean.is_finite() && shape > 0.0 && shape.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::arg(format!("invalid period distribution {self:?}")))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            PeriodDistribution::Constant { value } => value,
            PeriodDistribution::Exponential { mean } | PeriodDistribution::Gamma { mean, .. } => mean,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, PeriodDistribution::Constant { .. })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            PeriodDistribution::Constant { value } => value,
            PeriodDistribution::Exponential { mean } => Exp::new(1.0 / mean).expect("validated").sample(rng),
            PeriodDistribution::Gamma { mean, shape } => {
                Gamma::new(shape, mean / shape).expect("validated").sample(rng)
            }
        }
    }

    /// Density at `t`; for a constant period this is the probability mass.
    pub fn density(&self, t: f64) -> f64 {
        match *self {
            PeriodDistribution::Constant { value } => {
                if (t - value).abs() <= 1e-9 * value.max(1.0) {
                    1.0
                } else {
                    0.0
                }
            }
            PeriodDistribution::Exponential { mean } => {
                if t < 0.0 {
                    0.0
                } else {
                    (-t / mean).exp() / mean
                }
            }
            PeriodDistribution::Gamma { mean, shape } => {
                if t < 0.0 {
                    0.0
                } else {
                    statrs::distribution::Gamma::new(shape, shape / mean)
                        .expect("validated")
                        .pdf(t)
                }
            }
        }
    }

    /// `P(T > t)`.
    pub fn survivor(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0;
        }
        match *self {
            PeriodDistribution::Constant { value } => {
                if t < value {
                    1.0
                } else {
                    0.0
                }
            }
            PeriodDistribution::Exponential { mean } => (-t / mean).exp(),
            PeriodDistribution::Gamma { mean, shape } => statrs::distribution::Gamma::new(shape, shape / mean)
                .expect("validated")
                .sf(t),
        }
    }
}

/// Contact rates `(lambda_H, lambda_G^(1..=K), lambda_C)`. The group rate of
/// class `c >= 1` is `group[c - 1]`; class 0 is the dummy group with rate 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactRates {
    pub household: f64,
    pub group: Vec<f64>,
    pub community: f64,
}

impl ContactRates {
    pub fn new(household: f64, group: Vec<f64>, community: f64) -> Self {
        Self {
            household,
            group,
            community,
        }
    }

    pub fn group_rate(&self, class: usize) -> f64 {
        if class == 0 {
            0.0
        } else {
            self.group[class - 1]
        }
    }

    /// Number of free parameters, `K + 2`.
    pub fn dim(&self) -> usize {
        self.group.len() + 2
    }

    /// Flattened as `[lambda_H, lambda_G^(1), ..., lambda_G^(K), lambda_C]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        v.push(self.household);
        v.extend_from_slice(&self.group);
        v.push(self.community);
        v
    }

    pub fn from_slice(v: &[f64]) -> Self {
        assert!(v.len() >= 2, "need at least household and community rates");
        Self {
            household: v[0],
            group: v[1..v.len() - 1].to_vec(),
            community: v[v.len() - 1],
        }
    }

    pub fn names(&self) -> Vec<String> {
        let mut n = vec!["lambda_H".to_string()];
        n.extend((1..=self.group.len()).map(|c| format!("lambda_G{c}")));
        n.push("lambda_C".into());
        n
    }

    pub fn validate(&self) -> Result<()> {
        if self.to_vec().iter().any(|&r| !(r >= 0.0) || !r.is_finite()) {
            return Err(Error::arg(format!(
                "contact rates must be finite and non-negative: {self:?}"
            )));
        }
        Ok(())
    }

    /// Escape-probability form for a fixed infectious period `mu`.
    pub fn to_transformed(&self, mu: f64) -> TransformedParams {
        TransformedParams {
            p_h: 1.0 - (-self.household * mu).exp(),
            pi_g: self.group.iter().map(|&l| (-l * mu).exp()).collect(),
            pi_c: (-self.community * mu).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpidemicParams {
    #[serde(flatten)]
    pub rates: ContactRates,
    pub latent: PeriodDistribution,
    pub infectious: PeriodDistribution,
}

impl EpidemicParams {
    /// Fixed latent and infectious periods.
    pub fn fixed(rates: ContactRates, latent: f64, infectious: f64) -> Self {
        Self {
            rates,
            latent: PeriodDistribution::Constant { value: latent },
            infectious: PeriodDistribution::Constant { value: infectious },
        }
    }

    pub fn validate(&self, pop: &PopulationStructure) -> Result<()> {
        self.rates.validate()?;
        self.latent.validate()?;
        self.infectious.validate()?;
        if !(self.infectious.mean() > 0.0) {
            return Err(Error::arg("mean infectious period must be positive"));
        }
        if self.rates.group.len() < pop.n_rate_classes() {
            return Err(Error::arg(format!(
                "population has {} group rate classes but {} group rates were given",
                pop.n_rate_classes(),
                self.rates.group.len()
            )));
        }
        Ok(())
    }
}

/// `(p_H, pi_G^(1..=K), pi_C)` with `p_H = 1 - e^{-lambda_H mu}` and
/// `pi = e^{-lambda mu}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformedParams {
    pub p_h: f64,
    pub pi_g: Vec<f64>,
    pub pi_c: f64,
}

impl TransformedParams {
    pub fn new(p_h: f64, pi_g: Vec<f64>, pi_c: f64) -> Self {
        Self { p_h, pi_g, pi_c }
    }

    /// Flattened in table order `[p_H, pi_G..., pi_C]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.p_h];
        v.extend_from_slice(&self.pi_g);
        v.push(self.pi_c);
        v
    }

    pub fn from_slice(v: &[f64]) -> Self {
        assert!(v.len() >= 2, "need at least p_H and pi_C");
        Self {
            p_h: v[0],
            pi_g: v[1..v.len() - 1].to_vec(),
            pi_c: v[v.len() - 1],
        }
    }

    pub fn names(&self) -> Vec<String> {
        names_for_groups(self.pi_g.len())
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_h) {
            return Err(Error::arg(format!("p_H must lie in [0, 1], got {}", self.p_h)));
        }
        for &p in self.pi_g.iter().chain(std::iter::once(&self.pi_c)) {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::arg(format!("escape probabilities must lie in (0, 1], got {p}")));
            }
        }
        Ok(())
    }

    pub fn to_rates(&self, mu: f64) -> ContactRates {
        ContactRates {
            household: -(1.0 - self.p_h).ln() / mu,
            group: self.pi_g.iter().map(|&p| -p.ln() / mu).collect(),
            community: -self.pi_c.ln() / mu,
        }
    }
}

pub fn names_for_groups(k: usize) -> Vec<String> {
    let mut n = vec!["p_H".to_string()];
    if k == 1 {
        n.push("pi_G".into());
    } else {
        n.extend((1..=k).map(|c| format!("pi_G{c}")));
    }
    n.push("pi_C".into());
    n
}
