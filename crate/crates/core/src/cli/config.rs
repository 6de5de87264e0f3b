//! JSON scenario files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::params::EpidemicParams;
use crate::population::{build_schools_workplaces, build_villages, InitialCondition, PopulationStructure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case")]
pub enum PopulationSpec {
    Villages {
        villages: usize,
        households_per_village: usize,
        #[serde(default = "two")]
        household_size: usize,
    },
    SchoolsWorkplaces,
    /// Population JSON; relative paths resolve against the config file.
    File {
        path: PathBuf,
    },
}

fn two() -> usize {
    2
}

impl PopulationSpec {
    pub fn build(&self, base: Option<&Path>) -> Result<PopulationStructure> {
        match self {
            PopulationSpec::Villages {
                villages,
                households_per_village,
                household_size,
            } => build_villages(*villages, *households_per_village, *household_size),
            PopulationSpec::SchoolsWorkplaces => Ok(build_schools_workplaces()),
            PopulationSpec::File { path } => {
                let full = match base {
                    Some(b) if path.is_relative() => b.join(path),
                    _ => path.clone(),
                };
                PopulationStructure::load(full)
            }
        }
    }
}

/// Everything a command needs to know about a scenario. `dataset` fills in
/// population, parameters and initial condition for a named scenario; any
/// field given explicitly overrides it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub dataset: Option<String>,
    pub population: Option<PopulationSpec>,
    pub params: Option<EpidemicParams>,
    pub initial: Option<InitialCondition>,
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    pub out: Option<PathBuf>,
    /// Inline village summaries `(n_0, n_1, n_2)`.
    pub villages: Option<Vec<[u64; 3]>>,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// Fully resolved scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub population: PopulationStructure,
    pub params: Option<EpidemicParams>,
    pub initial: InitialCondition,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: ScenarioConfig = serde_json::from_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn dataset(&self) -> Result<Option<Dataset>> {
        self.dataset
            .as_deref()
            .map(|name| Dataset::parse(name).ok_or_else(|| Error::arg(format!("unknown dataset '{name}'"))))
            .transpose()
    }

    pub fn resolve(&self) -> Result<Scenario> {
        let ds = self.dataset()?;
        let population = match (&self.population, ds) {
            (Some(spec), _) => spec.build(self.base_dir.as_deref())?,
            (None, Some(d)) => d.population(),
            (None, None) => return Err(Error::arg("config needs a population or a dataset")),
        };
        let params = self.params.clone().or_else(|| ds.map(Dataset::params));
        if let Some(p) = &params {
            p.validate(&population)?;
        }
        let initial = self
            .initial
            .clone()
            .or_else(|| ds.map(Dataset::initial))
            .unwrap_or_else(|| InitialCondition::single_infective(0));
        initial.validate(&population)?;
        Ok(Scenario {
            population,
            params,
            initial,
        })
    }
}
