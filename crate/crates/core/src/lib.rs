//! Stochastic SEIR epidemics with three levels of mixing.
//!
//! Individuals mix within their household, within a secondary group (school,
//! workplace, village) and with the community at large. The crate simulates
//! such outbreaks exactly and fits the contact rates from either complete
//! temporal data (counting-process likelihood) or final-size data
//! (household pseudolikelihoods), by maximum likelihood or Metropolis-Hastings.

// `!(x > 0.0)` also rejects NaN; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod datasets;
pub mod error;
pub mod hh_finalsize;
pub mod likelihood;
pub mod mcmc;
pub mod optim;
pub mod par;
pub mod params;
pub mod population;
pub mod pseudolikelihood;
pub mod reproduce;
pub mod simulate;
pub mod threshold;

pub use error::{Error, Result};
pub use par::Execution;
pub use params::{ContactRates, EpidemicParams, PeriodDistribution, TransformedParams};
pub use population::{InitialCondition, PopulationStructure};
pub use simulate::{EventLog, FinalSizeData, InfectionRecord};
