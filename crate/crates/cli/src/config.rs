use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use kdvlab::experiments::InitialData;
use kdvlab::{FilterPolicy, GridSpec, Scheme};

use crate::error::CliError;

/// Datum for `gen-data`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenDataConfig {
    pub n_modes: usize,
    #[serde(default)]
    pub seed: u64,
    pub data: InitialData,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Which modes the nonlinearity sees in `step` / `evolve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterChoice {
    #[default]
    StepSize,
    Open,
}

impl From<FilterChoice> for FilterPolicy {
    fn from(f: FilterChoice) -> Self {
        match f {
            FilterChoice::StepSize => FilterPolicy::StepSize,
            FilterChoice::Open => FilterPolicy::Open,
        }
    }
}

fn one() -> usize {
    1
}

/// Run for `step` (exactly one step) and `evolve`.
///
/// The start field is either `input` (a snapshot) or `data` on `n_modes` modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub scheme: Scheme,
    pub tau: f64,
    #[serde(default = "one")]
    pub steps: usize,
    #[serde(default)]
    pub n_modes: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub data: Option<InitialData>,
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub filter: FilterChoice,
    #[serde(default)]
    pub linear_only: bool,
    /// Also write `snapshot_<n>` every this many steps; 0 writes only the final field.
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(CliError::config(Some("tau"), "must be positive and finite"));
        }
        match (&self.data, &self.input) {
            (Some(_), Some(_)) => {
                return Err(CliError::config(Some("input"), "give either `data` or `input`, not both"))
            }
            (None, None) => return Err(CliError::config(Some("data"), "one of `data` or `input` is required")),
            (Some(_), None) => {
                let n = self
                    .n_modes
                    .ok_or_else(|| CliError::config(Some("n_modes"), "required with `data`"))?;
                grid(n)?;
            }
            (None, Some(_)) => {
                if let Some(n) = self.n_modes {
                    grid(n)?;
                }
            }
        }
        Ok(())
    }
}

pub fn grid(n_modes: usize) -> Result<GridSpec, CliError> {
    GridSpec::new(n_modes).map_err(|e| CliError::config(Some("n_modes"), e.to_string()))
}

/// Reads a TOML config, rejecting unknown keys.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| CliError::io(&name, e))?;
    toml::from_str(&text).map_err(|e| {
        let message = e.message().to_string();
        // serde names the offending key in backticks for unknown or missing fields
        let field = message
            .split('`')
            .nth(1)
            .filter(|_| message.contains("field"))
            .map(str::to_string);
        CliError::Config { field, message }
    })
}
