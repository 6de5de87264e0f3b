//! `threemix` command line: simulate, fit, rstar, reproduce.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 numerical
//! non-convergence.

mod config;

pub use config::{PopulationSpec, Scenario, ScenarioConfig};

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::likelihood::{mle_from, CompleteDataLikelihood};
use crate::mcmc::{
    rstar_ex1, rstar_ex2, run_chains, run_finalsize_chain, summarize, ChainConfig, FinalSizeTarget, Samples,
};
use crate::par::Execution;
use crate::params::EpidemicParams;
use crate::population::Example2Layout;
use crate::pseudolikelihood::{pseudo_mle_ex1, pseudo_mle_ex2, HouseholdTriples, VillageFinalSize};
use crate::reproduce::{complete_posterior, reproduce};
use crate::simulate::{final_size, simulate_replicates, EventLog, FinalSizeData};
use crate::threshold::{offspring_matrix_example2, rstar_eigen, rstar_example1, OffspringMatrix};

#[derive(Debug, Parser)]
#[command(
    name = "threemix",
    version,
    about = "Household/group/community SEIR epidemics: simulation and inference"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate outbreaks and write event logs and final-size data.
    Simulate(SimulateArgs),
    /// Fit contact parameters to complete or final-size data.
    Fit(FitArgs),
    /// Threshold parameter and offspring matrix for given rates.
    Rstar(RstarArgs),
    /// Regenerate a reference table and compare.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named scenario (1.1, 1.2, 2.1, 2.2) used when no config is given.
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run on one thread.
    #[arg(long)]
    pub sequential: bool,
}

impl CommonArgs {
    fn scenario_config(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::load(p)?,
            None => ScenarioConfig::default(),
        };
        if self.dataset.is_some() {
            cfg.dataset = self.dataset.clone();
        }
        Ok(cfg)
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn out_dir(&self, cfg: &ScenarioConfig) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.out.clone())
            .unwrap_or_else(|| PathBuf::from("."))
    }

    fn seed(&self, cfg: &ScenarioConfig) -> u64 {
        self.seed.or(cfg.seed).unwrap_or(1)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    #[arg(long, default_value_t = 4)]
    pub chains: usize,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
}

impl ChainArgs {
    fn config(&self, seed: u64) -> Result<ChainConfig> {
        let d = ChainConfig::default();
        let cfg = ChainConfig {
            iterations: self.iters.unwrap_or(d.iterations),
            burn_in: self.burnin.unwrap_or(d.burn_in),
            thin: self.thin.unwrap_or(d.thin),
            seed,
            ..d
        };
        cfg.validate()?;
        if self.chains == 0 {
            return Err(Error::arg("at least one chain is required"));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of replicates (overrides the config).
    #[arg(long)]
    pub replicates: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMode {
    CompleteMle,
    CompleteMcmc,
    FinalMle,
    FinalMcmc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    /// Villages of two-person households.
    Ex1,
    /// Two children in a school, two adults in two workplaces.
    Ex2,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Event-log CSV (complete modes) or final-size CSV (final modes).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: FitMode,
    #[arg(long, value_enum)]
    pub layout: Layout,
    /// Mean infectious period used to convert rates (defaults to the
    /// scenario's, else 1).
    #[arg(long)]
    pub mu: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RstarArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// t1, t2, t3, t4 or self2.
    #[arg(long)]
    pub table: String,
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 1,
        Error::NonConvergence { .. } => 3,
        _ => 2,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Fit(a) => cmd_fit(&a),
        Command::Rstar(a) => cmd_rstar(&a),
        Command::Reproduce(a) => cmd_reproduce(&a),
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let cfg = a.common.scenario_config()?;
    let scenario = cfg.resolve()?;
    let params = scenario
        .params
        .as_ref()
        .ok_or_else(|| Error::arg("simulate needs epidemic parameters"))?;
    let count = a.replicates.or(cfg.replicates).unwrap_or(1);
    if count == 0 {
        return Err(Error::arg("replicate count must be at least 1"));
    }
    let seed = a.common.seed(&cfg);
    let out = a.common.out_dir(&cfg);
    let pop = &scenario.population;
    let layout = Example2Layout::from_population(pop).ok();
    let logs = simulate_replicates(pop, params, &scenario.initial, seed, count, a.common.exec())?;
    let width = count.saturating_sub(1).to_string().len().max(3);
    let mut sizes = Vec::with_capacity(count);
    for (r, log) in logs.iter().enumerate() {
        let fs = final_size(log, pop)?;
        write_atomic(&out.join(format!("events_{r:0width$}.csv")), |w| log.write_csv(w, pop))?;
        write_atomic(&out.join(format!("finalsize_{r:0width$}.csv")), |w| match &layout {
            Some(l) => fs.write_triples_csv(w, l),
            None => fs.write_csv(w),
        })?;
        sizes.push(fs.total());
    }
    write_json(
        &out.join("simulate_summary.json"),
        &json!({ "seed": seed, "replicates": count, "final_sizes": sizes }),
    )?;
    println!("wrote {count} replicate(s) to {}", out.display());
    Ok(())
}

fn read_data(path: &Option<PathBuf>) -> Result<fs::File> {
    let p = path
        .as_ref()
        .ok_or_else(|| Error::arg("--data is required for this mode"))?;
    Ok(fs::File::open(p)?)
}

fn infectious_mean(a: &FitArgs, params: Option<&EpidemicParams>) -> Result<f64> {
    let mu = a.mu.or(params.map(|p| p.infectious.mean())).unwrap_or(1.0);
    if !(mu > 0.0) {
        return Err(Error::arg("mean infectious period must be positive"));
    }
    Ok(mu)
}

fn cmd_fit(a: &FitArgs) -> Result<()> {
    let cfg = a.common.scenario_config()?;
    let seed = a.common.seed(&cfg);
    let out = a.common.out_dir(&cfg);
    let exec = a.common.exec();
    let tag = match a.mode {
        FitMode::CompleteMle => "complete_mle",
        FitMode::CompleteMcmc => "complete_mcmc",
        FitMode::FinalMle => "final_mle",
        FitMode::FinalMcmc => "final_mcmc",
    };

    match a.mode {
        FitMode::FinalMle | FitMode::FinalMcmc => {
            let target_data = final_size_target(a, &cfg)?;
            let target = match &target_data {
                FinalData::Villages(v) => FinalSizeTarget::Villages(v),
                FinalData::Households(h) => FinalSizeTarget::Households(h),
            };
            if a.mode == FitMode::FinalMle {
                let mle = match &target_data {
                    FinalData::Villages(v) => pseudo_mle_ex1(v, exec)?,
                    FinalData::Households(h) => pseudo_mle_ex2(h, exec)?,
                };
                let x = mle.params.to_vec();
                let rstar = if a.layout == Layout::Ex1 {
                    rstar_ex1(&x)
                } else {
                    rstar_ex2(&x)
                };
                write_json(&out.join(format!("{tag}.json")), &json!({ "mle": mle, "rstar": rstar }))?;
                println!(
                    "{}",
                    serde_json::to_string_pretty(
                        &json!({ "params": mle.params, "loglik": mle.loglik, "rstar": rstar })
                    )?
                );
                if !mle.converged {
                    return Err(Error::NonConvergence {
                        iterations: 0,
                        gradient_norm: f64::NAN,
                    });
                }
            } else {
                let chain_cfg = a.chain.config(seed)?;
                let runs = run_chains(a.chain.chains, exec, |c| run_finalsize_chain(target, &chain_cfg, c))?;
                let rs = if a.layout == Layout::Ex1 { rstar_ex1 } else { rstar_ex2 };
                let samples = Samples::from_chains(&runs)?.with_rstar(rs);
                let summary = summarize(&samples)?;
                write_atomic(&out.join(format!("{tag}_samples.csv")), |w| samples.write_csv(w))?;
                write_json(&out.join(format!("{tag}.json")), &summary)?;
                println!("{}", serde_json::to_string_pretty(&summary)?);
            }
        }
        FitMode::CompleteMle | FitMode::CompleteMcmc => {
            let scenario = cfg.resolve()?;
            let pop = &scenario.population;
            let classes = pop.n_rate_classes();
            match (a.layout, classes) {
                (Layout::Ex1, 1) | (Layout::Ex2, 2) => {}
                _ => {
                    return Err(Error::data(format!(
                        "layout {:?} does not match a population with {classes} group rate class(es)",
                        a.layout
                    )))
                }
            }
            let log = EventLog::read_csv(read_data(&a.data)?, pop)?;
            let lik = CompleteDataLikelihood::new(&log, pop, log.horizon)?;
            let mu = infectious_mean(a, scenario.params.as_ref())?;
            if a.mode == FitMode::CompleteMle {
                let m = mle_from(&lik, &vec![0.5; lik.dim()])?;
                let se = lik.standard_errors(&m.rates.to_vec()).ok();
                let doc = json!({
                    "rates": m.rates,
                    "loglik": m.loglik,
                    "gradient_norm": m.gradient_norm,
                    "iterations": m.iterations,
                    "converged": m.converged,
                    "standard_errors": se,
                    "transformed": m.rates.to_transformed(mu),
                });
                write_json(&out.join(format!("{tag}.json")), &doc)?;
                println!("{}", serde_json::to_string_pretty(&doc)?);
                if !m.converged {
                    return Err(Error::NonConvergence {
                        iterations: m.iterations,
                        gradient_norm: m.gradient_norm,
                    });
                }
            } else {
                let chain_cfg = a.chain.config(seed)?;
                let rs = if a.layout == Layout::Ex1 { rstar_ex1 } else { rstar_ex2 };
                let summary = complete_posterior(&lik, mu, &chain_cfg, a.chain.chains, exec, rs)?;
                write_json(&out.join(format!("{tag}.json")), &summary)?;
                println!("{}", serde_json::to_string_pretty(&summary)?);
            }
        }
    }
    Ok(())
}

enum FinalData {
    Villages(VillageFinalSize),
    Households(HouseholdTriples),
}

fn final_size_target(a: &FitArgs, cfg: &ScenarioConfig) -> Result<FinalData> {
    // inline or embedded village counts need no population
    if a.layout == Layout::Ex1 && a.data.is_none() {
        if let Some(v) = &cfg.villages {
            return Ok(FinalData::Villages(VillageFinalSize::new(v.clone())));
        }
        if let Some(v) = cfg.dataset()?.and_then(|d| d.village_counts()) {
            return Ok(FinalData::Villages(v));
        }
    }
    let scenario = cfg.resolve()?;
    let pop = &scenario.population;
    let raw = fs::read_to_string(
        a.data
            .as_ref()
            .ok_or_else(|| Error::arg("--data is required for this mode"))?,
    )?;
    let triple_format = raw.lines().next().is_some_and(|h| h.contains("infected_children"));
    match a.layout {
        Layout::Ex1 => {
            if triple_format {
                return Err(Error::data(
                    "schools/workplaces data cannot be fitted with the village layout",
                ));
            }
            let data = FinalSizeData::read_csv(raw.as_bytes(), pop)?;
            Ok(FinalData::Villages(VillageFinalSize::from_final_size(&data, pop)?))
        }
        Layout::Ex2 => {
            let data = FinalSizeData::read_csv(raw.as_bytes(), pop)?;
            Ok(FinalData::Households(HouseholdTriples::from_final_size(&data, pop)?))
        }
    }
}

#[derive(Serialize)]
struct RstarReport {
    layout: &'static str,
    rstar: f64,
    offspring_matrix: OffspringMatrix,
}

fn cmd_rstar(a: &RstarArgs) -> Result<()> {
    let cfg = a.common.scenario_config()?;
    let scenario = cfg.resolve()?;
    let params = scenario
        .params
        .ok_or_else(|| Error::arg("rstar needs epidemic parameters"))?;
    let mu = params.infectious.mean();
    let r = &params.rates;
    let p_h = 1.0 - (-r.household * mu).exp();
    let report = match scenario.population.n_rate_classes() {
        1 => {
            let value = rstar_example1(r.community, r.group[0], mu, p_h)?;
            RstarReport {
                layout: "ex1",
                rstar: value,
                offspring_matrix: OffspringMatrix::new(vec![vec![value]])?,
            }
        }
        2 => {
            let mu3 = crate::hh_finalsize::mean_final_size(3, 1, p_h)?;
            let m = offspring_matrix_example2(r.community, r.group[0], r.group[1], mu, mu3)?;
            RstarReport {
                layout: "ex2",
                rstar: rstar_eigen(&m),
                offspring_matrix: m,
            }
        }
        k => {
            return Err(Error::arg(format!(
                "R* is implemented for one or two group rate classes, population has {k}"
            )))
        }
    };
    println!("R* = {:.6}", report.rstar);
    println!("offspring matrix:");
    for row in report.offspring_matrix.rows() {
        println!(
            "  {}",
            row.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join("  ")
        );
    }
    if let Some(out) = a.common.out.clone().or(cfg.out.clone()) {
        write_json(&out.join("rstar.json"), &report)?;
    }
    Ok(())
}

fn cmd_reproduce(a: &ReproduceArgs) -> Result<()> {
    let cfg = a.common.scenario_config()?;
    let seed = a.common.seed(&cfg);
    let chain_cfg = a.chain.config(seed)?;
    let cmp = reproduce(&a.table, seed, &chain_cfg, a.chain.chains, a.common.exec())?;
    print!("{}", cmp.render());
    if let Some(out) = a.common.out.clone().or(cfg.out.clone()) {
        write_json(&out.join(format!("reproduce_{}.json", a.table)), &cmp)?;
    }
    Ok(())
}
