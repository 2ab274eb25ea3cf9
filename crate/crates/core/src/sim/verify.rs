//! Monte Carlo estimate of the manipulation rate next to its closed form.
//!
//! Each trial fills a static list and lets a single round of votes decide
//! all of it. Every honest voter casts exactly one vote, so beliefs on a
//! proposition are independent, and the adversary holds `fraction` of all
//! vote slots, voting against the truth. The adversary's total stake is
//! fixed, so its share of a given proposition's votes is hypergeometric
//! rather than binomial; a long list keeps that difference far below the
//! sampling error.

use serde::{Deserialize, Serialize};

use super::experiment::map_trials;
use super::scenario::{BountyDistribution, Cohort, PropositionStream, RunSettings, ScenarioConfig};
use crate::agents::{AdversaryConfig, VoterStrategy};
use crate::analysis::{p_manipulate_specific_fraction, AnalysisError};
use crate::config::ConfigError;
use crate::protocol::SystemParams;
use crate::stats::WilsonInterval;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyRow {
    pub dv_over_smax: u64,
    pub q: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    pub rows: Vec<VerifyRow>,
    /// Propositions per trial.
    pub list_size: usize,
    /// Minimum number of decided propositions per row.
    pub decided: u64,
    pub seed: u64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            rows: Vec::new(),
            list_size: 1000,
            decided: 100_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub row: VerifyRow,
    pub closed_form: f64,
    pub decided: u64,
    pub manipulated: u64,
    pub interval: WilsonInterval,
    pub pass: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Single-round static-list scenario for one row.
pub fn verify_scenario(
    row: &VerifyRow,
    settings: &VerifySettings,
) -> Result<ScenarioConfig, VerifyError> {
    if !(0.0..1.0).contains(&row.fraction) {
        return Err(
            AnalysisError::Domain(format!("fraction {} outside [0, 1)", row.fraction)).into(),
        );
    }
    let params = SystemParams {
        s_max: 1,
        decision_stake: row.dv_over_smax,
        list_size: settings.list_size,
        ..SystemParams::default()
    };
    let slots = settings.list_size as u64 * row.dv_over_smax;
    let adversary_votes = (row.fraction * slots as f64).round() as u64;
    let mut cohorts = vec![Cohort {
        balance: 1,
        ..Cohort::voters("honest", (slots - adversary_votes) as u32, row.q)
    }];
    if adversary_votes > 0 {
        cohorts.push(Cohort {
            balance: adversary_votes,
            votes_per_round: adversary_votes as u32,
            ..Cohort::voters("adversary", 1, row.q).with_voter(VoterStrategy::Adversary(
                AdversaryConfig {
                    budget: adversary_votes,
                    target: None,
                    force: Default::default(),
                    off_target: Default::default(),
                },
            ))
        });
    }
    Ok(ScenarioConfig {
        params,
        stream: PropositionStream {
            p_true: 0.5,
            bounty: BountyDistribution::Fixed { amount: 1 },
            undecidable_fraction: 0.0,
        },
        pools: Default::default(),
        run: RunSettings {
            rounds: 1,
            trials: settings.decided.div_ceil(settings.list_size as u64).max(1),
            seed: settings.seed,
            replenish: false,
            max_decided: None,
            record_events: false,
            record_results: false,
        },
        cohorts,
    })
}

pub fn verify_row(row: &VerifyRow, settings: &VerifySettings) -> Result<VerifyReport, VerifyError> {
    let closed_form = p_manipulate_specific_fraction(row.q, row.fraction, row.dv_over_smax)?;
    let config = verify_scenario(row, settings)?;
    let counts = map_trials(&config, |t| (t.decided, t.manipulated))?;
    let decided = counts.iter().map(|c| c.0).sum();
    let manipulated = counts.iter().map(|c| c.1).sum();
    let interval = WilsonInterval::at_95(manipulated, decided);
    Ok(VerifyReport {
        row: *row,
        closed_form,
        decided,
        manipulated,
        interval,
        pass: interval.contains(closed_form),
    })
}

pub fn verify(settings: &VerifySettings) -> Result<Vec<VerifyReport>, VerifyError> {
    settings
        .rows
        .iter()
        .map(|r| verify_row(r, settings))
        .collect()
}
