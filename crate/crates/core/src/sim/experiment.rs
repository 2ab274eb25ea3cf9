use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{run_trial, TrialStats};
use super::scenario::ScenarioConfig;
use crate::config::ConfigError;
use crate::seed::trial_seed;
use crate::stats::{MeanStderr, WilsonInterval};

/// Runs every trial of `config` in parallel and maps each result through `f`.
///
/// Trial `i` always uses `trial_seed(master, i)`, and results come back in
/// trial order, so the output does not depend on the thread count.
pub fn map_trials<T, F>(config: &ScenarioConfig, f: F) -> Result<Vec<T>, ConfigError>
where
    T: Send,
    F: Fn(TrialStats) -> T + Sync,
{
    config.validate()?;
    (0..config.run.trials)
        .into_par_iter()
        .map(|i| run_trial(config, trial_seed(config.run.seed, i)).map(&f))
        .collect()
}

pub fn run_trials(config: &ScenarioConfig) -> Result<Vec<TrialStats>, ConfigError> {
    map_trials(config, |s| s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSummary {
    pub name: String,
    pub players: u32,
    /// Per-trial mean payoff of one cohort member.
    pub payoff: MeanStderr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub trials: u64,
    pub decided: u64,
    pub manipulated: u64,
    /// Per-proposition rate of incorrect definite voting outcomes.
    pub manipulation: WilsonInterval,
    pub unknown_voting: u64,
    pub certified_true: u64,
    pub certified_false: u64,
    pub drained_true: u128,
    pub drained_false: u128,
    pub errors: std::collections::BTreeMap<String, u64>,
    pub cohorts: Vec<CohortSummary>,
}

pub fn summarize(trials: &[TrialStats]) -> ExperimentSummary {
    let mut errors = std::collections::BTreeMap::new();
    for t in trials {
        for (k, v) in &t.errors {
            *errors.entry(k.clone()).or_insert(0) += v;
        }
    }
    let decided = trials.iter().map(|t| t.decided).sum();
    let manipulated = trials.iter().map(|t| t.manipulated).sum();
    let cohorts = trials
        .first()
        .map(|first| {
            first
                .cohorts
                .iter()
                .enumerate()
                .map(|(c, cohort)| CohortSummary {
                    name: cohort.name.clone(),
                    players: cohort.players,
                    payoff: MeanStderr::of(trials.iter().map(|t| {
                        let net = &t.cohorts[c];
                        if net.players == 0 {
                            0.0
                        } else {
                            net.net as f64 / net.players as f64
                        }
                    })),
                })
                .collect()
        })
        .unwrap_or_default();
    ExperimentSummary {
        trials: trials.len() as u64,
        decided,
        manipulated,
        manipulation: WilsonInterval::at_95(manipulated, decided),
        unknown_voting: trials.iter().map(|t| t.unknown_voting).sum(),
        certified_true: trials.iter().map(|t| t.certified_true).sum(),
        certified_false: trials.iter().map(|t| t.certified_false).sum(),
        drained_true: trials.iter().map(|t| t.drained_true as u128).sum(),
        drained_false: trials.iter().map(|t| t.drained_false as u128).sum(),
        errors,
        cohorts,
    }
}

/// Runs all trials and aggregates them.
pub fn run_experiment(
    config: &ScenarioConfig,
) -> Result<(ExperimentSummary, Vec<TrialStats>), ConfigError> {
    let trials = run_trials(config)?;
    Ok((summarize(&trials), trials))
}
