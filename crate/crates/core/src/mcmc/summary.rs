//! Posterior summaries: moments, medians, correlations and derived `R*`.

use std::io::Write;

use serde::Serialize;

use super::diagnostics::effective_sample_size;
use super::Chain;
use crate::error::{Error, Result};
use crate::hh_finalsize::mean_final_size;
use crate::threshold::{offspring_matrix_example2, rstar_eigen, rstar_from_transformed};

/// Retained draws pooled over chains of equal length, in chain order.
#[derive(Debug, Clone)]
pub struct Samples {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub rstar: Option<Vec<f64>>,
    pub n_chains: usize,
    pub acceptance: Vec<f64>,
}

impl Samples {
    pub fn from_chains(chains: &[Chain]) -> Result<Self> {
        let first = chains.first().ok_or_else(|| Error::arg("no chains to pool"))?;
        if chains
            .iter()
            .any(|c| c.names != first.names || c.rows.len() != first.rows.len())
        {
            return Err(Error::arg("chains differ in parameters or length"));
        }
        let d = first.names.len();
        let acceptance = (0..d)
            .map(|k| {
                let a: u64 = chains.iter().map(|c| c.accepted[k]).sum();
                let p: u64 = chains.iter().map(|c| c.proposed[k]).sum();
                if p == 0 {
                    0.0
                } else {
                    a as f64 / p as f64
                }
            })
            .collect();
        Ok(Self {
            names: first.names.clone(),
            rows: chains.iter().flat_map(|c| c.rows.iter().cloned()).collect(),
            rstar: None,
            n_chains: chains.len(),
            acceptance,
        })
    }

    /// Reparameterises every draw, keeping chain layout and acceptance.
    pub fn map<F: Fn(&[f64]) -> Vec<f64>>(&self, names: Vec<String>, f: F) -> Self {
        Self {
            names,
            rows: self.rows.iter().map(|r| f(r)).collect(),
            rstar: None,
            n_chains: self.n_chains,
            acceptance: self.acceptance.clone(),
        }
    }

    pub fn with_rstar<F: Fn(&[f64]) -> f64>(mut self, f: F) -> Self {
        self.rstar = Some(self.rows.iter().map(|r| f(r)).collect());
        self
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[k]).collect()
    }

    /// One column per parameter plus `rstar` when derived.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = self.names.clone();
        if self.rstar.is_some() {
            header.push("rstar".into());
        }
        out.write_record(&header)?;
        for (i, r) in self.rows.iter().enumerate() {
            let mut rec: Vec<String> = r.iter().map(f64::to_string).collect();
            if let Some(rs) = &self.rstar {
                rec.push(rs[i].to_string());
            }
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub ess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PosteriorSummary {
    pub parameters: Vec<ParamSummary>,
    pub rstar: Option<ParamSummary>,
    pub correlation: Vec<Vec<f64>>,
    /// Some parameter never moved, so its correlations are reported as 0.
    pub degenerate: bool,
    pub acceptance: Vec<f64>,
    pub n_samples: usize,
    pub n_chains: usize,
}

impl PosteriorSummary {
    pub fn get(&self, name: &str) -> Option<&ParamSummary> {
        self.parameters.iter().find(|p| p.name == name)
    }
}

fn moments(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn median(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn summarize_column(name: &str, x: &[f64], n_chains: usize) -> ParamSummary {
    let (mean, sd) = moments(x);
    let len = x.len() / n_chains.max(1);
    let ess = if len == 0 {
        x.len() as f64
    } else {
        x.chunks(len).map(effective_sample_size).sum()
    };
    ParamSummary {
        name: name.to_string(),
        mean,
        sd,
        median: median(x),
        ess,
    }
}

pub fn summarize(samples: &Samples) -> Result<PosteriorSummary> {
    if samples.rows.is_empty() {
        return Err(Error::arg("no samples to summarise"));
    }
    let d = samples.names.len();
    let cols: Vec<Vec<f64>> = (0..d).map(|k| samples.column(k)).collect();
    let parameters: Vec<ParamSummary> = cols
        .iter()
        .zip(&samples.names)
        .map(|(c, n)| summarize_column(n, c, samples.n_chains))
        .collect();
    let n = samples.rows.len() as f64;
    let mut degenerate = false;
    let mut correlation = vec![vec![0.0; d]; d];
    for a in 0..d {
        correlation[a][a] = 1.0;
        if parameters[a].sd == 0.0 {
            degenerate = true;
        }
        for b in a + 1..d {
            let (sa, sb) = (parameters[a].sd, parameters[b].sd);
            let r = if sa == 0.0 || sb == 0.0 {
                0.0
            } else {
                let (ma, mb) = (parameters[a].mean, parameters[b].mean);
                let cov = cols[a]
                    .iter()
                    .zip(&cols[b])
                    .map(|(x, y)| (x - ma) * (y - mb))
                    .sum::<f64>()
                    / (n - 1.0);
                (cov / (sa * sb)).clamp(-1.0, 1.0)
            };
            correlation[a][b] = r;
            correlation[b][a] = r;
        }
    }
    let rstar = samples
        .rstar
        .as_ref()
        .map(|r| summarize_column("rstar", r, samples.n_chains));
    Ok(PosteriorSummary {
        parameters,
        rstar,
        correlation,
        degenerate,
        acceptance: samples.acceptance.clone(),
        n_samples: samples.rows.len(),
        n_chains: samples.n_chains,
    })
}

/// `R*` for villages of two-person households from `[p_H, pi_G, pi_C]`;
/// infinite when an escape probability is zero.
pub fn rstar_ex1(x: &[f64]) -> f64 {
    rstar_from_transformed(x[2], x[1], x[0]).unwrap_or(f64::INFINITY)
}

/// `R*` for the schools/workplaces layout from `[p_H, pi_G1, pi_G2, pi_C]`.
/// Only products `lambda * mu = -ln pi` enter, so the period is set to 1.
pub fn rstar_ex2(x: &[f64]) -> f64 {
    let (p_h, g1, g2, c) = (x[0], x[1], x[2], x[3]);
    if g1 <= 0.0 || g2 <= 0.0 || c <= 0.0 {
        return f64::INFINITY;
    }
    let mu3 = match mean_final_size(3, 1, p_h) {
        Ok(m) => m,
        Err(_) => return f64::NAN,
    };
    offspring_matrix_example2(-c.ln(), -g1.ln(), -g2.ln(), 1.0, mu3)
        .map(|m| rstar_eigen(&m))
        .unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::threshold::rstar_example2;

    fn samples(rows: Vec<Vec<f64>>) -> Samples {
        Samples {
            names: vec!["a".into(), "b".into()],
            rows,
            rstar: None,
            n_chains: 1,
            acceptance: vec![0.0, 0.0],
        }
    }

    #[test]
    fn constant_chain_is_degenerate() {
        let s = summarize(&samples(vec![vec![1.0, 2.0]; 50])).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.parameters[0].sd, 0.0);
        assert_eq!(s.correlation, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn anticorrelated() {
        let rows = (0..100).map(|i| vec![i as f64, -2.0 * i as f64 + 3.0]).collect();
        let s = summarize(&samples(rows)).unwrap();
        assert!((s.correlation[0][1] + 1.0).abs() < 1e-12);
        assert!(!s.degenerate);
        assert_eq!(s.parameters[0].median, 49.5);
        assert!((s.parameters[0].mean - 49.5).abs() < 1e-12);
    }

    #[test]
    fn csv_columns() {
        let s = samples(vec![vec![0.5, 0.25]]).with_rstar(|r| r[0] + r[1]);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b,rstar\n0.5,0.25,0.75\n");
        assert!(summarize(&samples(vec![])).is_err());
    }

    #[test]
    fn derived_thresholds() {
        let x: [f64; 3] = [0.2591818, 0.246597, 0.999000];
        let want = -(x[2].ln() + x[1].ln()) * (1.0 + x[0]);
        assert_eq!(rstar_ex1(&x), want);
        let t = [
            1.0 - (-0.3f64).exp(),
            (-1.2f64).exp(),
            (-0.6f64).exp(),
            (-0.05f64).exp(),
        ];
        assert!((rstar_ex2(&t) - rstar_example2(0.3, 0.05, 1.2, 0.6, 1.0).unwrap()).abs() < 1e-12);
        assert_eq!(rstar_ex1(&[0.3, 0.0, 0.5]), f64::INFINITY);
    }
}
