//! TOML scenario files.
//!
//! A file has the sections `[params]`, `[stream]`, `[pools]`, `[run]` and
//! any number of `[[cohort]]` tables, which together describe a simulated
//! population, plus optional `[analysis]`, `[verify]`, `[equilibrium]` and
//! `[pools_experiment]` sections for the corresponding commands. The last
//! two carry their own `params` table, since they default to larger stake
//! units than a bare `[params]`. Every section and field is optional;
//! unknown fields are rejected. Money is in integer minor units.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::GridRow;
use crate::protocol::{Money, RewardPools, SystemParams};
use crate::sim::{
    Cohort, EquilibriumSettings, PoolBiasSettings, PropositionStream, RunSettings, ScenarioConfig,
    VerifySettings,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BountyCapQuery {
    pub q: f64,
    pub decision_stake: Money,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub rows: Vec<GridRow>,
    pub bounty_caps: Vec<BountyCapQuery>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub params: SystemParams,
    pub stream: PropositionStream,
    pub pools: RewardPools,
    pub run: RunSettings,
    pub cohort: Vec<Cohort>,
    pub analysis: AnalysisSection,
    pub verify: VerifySettings,
    pub equilibrium: EquilibriumSettings,
    pub pools_experiment: PoolBiasSettings,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

impl ConfigFile {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map_or((0, 0), |span| line_column(text, span.start));
            ConfigError::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String, ConfigError> {
        toml::to_string(self).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn scenario(&self) -> ScenarioConfig {
        ScenarioConfig {
            params: self.params.clone(),
            stream: self.stream,
            pools: self.pools,
            run: self.run.clone(),
            cohorts: self.cohort.clone(),
        }
    }

    /// Applies command-line overrides to every seed and trial count in the file.
    pub fn override_run(&mut self, seed: Option<u64>, trials: Option<u64>) {
        if let Some(seed) = seed {
            self.run.seed = seed;
            self.verify.seed = seed;
            self.equilibrium.seed = seed;
            self.pools_experiment.seed = seed;
        }
        if let Some(trials) = trials {
            self.run.trials = trials;
            self.equilibrium.trials = trials;
            self.pools_experiment.trials = trials;
        }
    }
}
