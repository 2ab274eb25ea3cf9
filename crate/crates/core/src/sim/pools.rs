//! Reward-pool dynamics under a biased proposition stream.

use serde::{Deserialize, Serialize};

use super::engine::{PoolPoint, TrialStats};
use super::experiment::map_trials;
use super::scenario::{BountyDistribution, Cohort, PropositionStream, RunSettings, ScenarioConfig};
use crate::agents::{CertifierStrategy, VoterStrategy};
use crate::config::ConfigError;
use crate::protocol::{Money, Outcome, RewardPools, SystemParams};
use crate::stats::MeanStderr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoolBiasSettings {
    /// Defaults to stakes scaled by 100 minor units.
    pub params: SystemParams,
    pub p_true: f64,
    pub bounty: Money,
    pub pools: RewardPools,
    pub honest_voters: u32,
    pub lazy_voters: u32,
    pub voter_accuracy: f64,
    pub certifiers: u32,
    pub certifier_accuracy: f64,
    pub certifier: CertifierStrategy,
    /// Decided propositions per trial.
    pub decided: u64,
    /// Leading decisions counted as burn-in.
    pub burn_in: u64,
    pub trials: u64,
    pub seed: u64,
}

impl Default for PoolBiasSettings {
    fn default() -> Self {
        Self {
            params: SystemParams::with_stake_unit(100),
            p_true: 0.7,
            bounty: 1000,
            pools: RewardPools {
                r_true: 100_000,
                r_false: 100_000,
            },
            honest_voters: 90,
            lazy_voters: 10,
            voter_accuracy: 0.9,
            certifiers: 5,
            certifier_accuracy: 0.9,
            certifier: CertifierStrategy::PoolAware,
            decided: 10_000,
            burn_in: 1_000,
            trials: 1,
            seed: 0,
        }
    }
}

impl PoolBiasSettings {
    pub fn scenario(&self) -> ScenarioConfig {
        let mut cohorts = vec![Cohort::voters(
            "honest",
            self.honest_voters,
            self.voter_accuracy,
        )];
        if self.lazy_voters > 0 {
            cohorts.push(
                Cohort::voters("lazy-true", self.lazy_voters, self.voter_accuracy).with_voter(
                    VoterStrategy::Lazy {
                        position: Outcome::True,
                    },
                ),
            );
        }
        cohorts.push(Cohort::certifiers(
            "certifiers",
            self.certifiers,
            self.certifier_accuracy,
            self.certifier,
        ));
        ScenarioConfig {
            params: self.params.clone(),
            stream: PropositionStream {
                p_true: self.p_true,
                bounty: BountyDistribution::Fixed {
                    amount: self.bounty,
                },
                undecidable_fraction: 0.0,
            },
            pools: self.pools,
            run: RunSettings {
                rounds: self.decided.saturating_mul(100).max(1000),
                trials: self.trials,
                seed: self.seed,
                replenish: true,
                max_decided: Some(self.decided),
                record_events: false,
                record_results: false,
            },
            cohorts,
        }
    }
}

/// Counts of decided propositions by certification outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CertificationBalance {
    pub certified_true: u64,
    pub certified_false: u64,
    /// `|t - f| / ((t + f) / 2)`; 0 when both are zero.
    pub relative_difference: f64,
}

impl CertificationBalance {
    pub fn new(certified_true: u64, certified_false: u64) -> Self {
        let mean = (certified_true + certified_false) as f64 / 2.0;
        let relative_difference = if mean == 0.0 {
            0.0
        } else {
            certified_true.abs_diff(certified_false) as f64 / mean
        };
        Self {
            certified_true,
            certified_false,
            relative_difference,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolBiasReport {
    pub decided: u64,
    /// Gross pool drains during burn-in, summed over trials.
    pub burn_in_drained_true: u128,
    pub burn_in_drained_false: u128,
    /// Net decrease of each pool per decided proposition over burn-in,
    /// averaged over trials. Negative when the pool grew.
    pub depletion_true: f64,
    pub depletion_false: f64,
    pub overall: CertificationBalance,
    pub final_third: CertificationBalance,
    pub honest_payoff: MeanStderr,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lazy_payoff: Option<MeanStderr>,
    pub final_pools: RewardPools,
    /// Pool trajectory of the first trial.
    pub trajectory: Vec<PoolPoint>,
}

struct TrialDigest {
    decided: u64,
    burn_true: u128,
    burn_false: u128,
    depletion: (f64, f64),
    cert: (u64, u64),
    tail: (u64, u64),
    honest: f64,
    lazy: Option<f64>,
    final_pools: RewardPools,
    trajectory: Option<Vec<PoolPoint>>,
}

/// Net decrease per decision from the initial pools to the first round that
/// completes burn-in.
fn depletion(initial: RewardPools, trajectory: &[PoolPoint], burn_in: u64) -> (f64, f64) {
    let Some(point) = trajectory
        .iter()
        .find(|p| p.decided >= burn_in)
        .or(trajectory.last())
        .filter(|p| p.decided > 0)
    else {
        return (0.0, 0.0);
    };
    let rate = |start: Money, end: Money| (start as f64 - end as f64) / point.decided as f64;
    (
        rate(initial.r_true, point.r_true),
        rate(initial.r_false, point.r_false),
    )
}

fn digest(
    stats: TrialStats,
    initial: RewardPools,
    burn_in: u64,
    keep_trajectory: bool,
) -> TrialDigest {
    let mut burn_true = 0u128;
    let mut burn_false = 0u128;
    for d in stats.decisions.iter().take(burn_in as usize) {
        match d.voting {
            Outcome::True => burn_true += d.pool_drain as u128,
            Outcome::False => burn_false += d.pool_drain as u128,
            Outcome::Unknown => {}
        }
    }
    let n = stats.decisions.len();
    let mut tail = (0, 0);
    for d in &stats.decisions[n - n / 3..] {
        match d.certification {
            Outcome::True => tail.0 += 1,
            Outcome::False => tail.1 += 1,
            Outcome::Unknown => {}
        }
    }
    let per_player = |name: &str| {
        stats
            .cohort(name)
            .filter(|c| c.players > 0)
            .map(|c| c.net as f64 / c.players as f64)
    };
    TrialDigest {
        decided: stats.decided,
        burn_true,
        burn_false,
        depletion: depletion(initial, &stats.pools, burn_in),
        cert: (stats.certified_true, stats.certified_false),
        tail,
        honest: per_player("honest").unwrap_or(0.0),
        lazy: per_player("lazy-true"),
        final_pools: stats.final_pools,
        trajectory: keep_trajectory.then_some(stats.pools),
    }
}

pub fn pool_bias_experiment(settings: &PoolBiasSettings) -> Result<PoolBiasReport, ConfigError> {
    let config = settings.scenario();
    let first = crate::seed::trial_seed(settings.seed, 0);
    let digests = map_trials(&config, |t| {
        let keep = t.seed == first;
        digest(t, settings.pools, settings.burn_in, keep)
    })?;
    let burn_in_drained_true = digests.iter().map(|d| d.burn_true).sum();
    let burn_in_drained_false: u128 = digests.iter().map(|d| d.burn_false).sum();
    let sum = |f: fn(&TrialDigest) -> u64| digests.iter().map(f).sum::<u64>();
    let lazy: Vec<f64> = digests.iter().filter_map(|d| d.lazy).collect();
    Ok(PoolBiasReport {
        decided: sum(|d| d.decided),
        burn_in_drained_true,
        burn_in_drained_false,
        depletion_true: MeanStderr::of(digests.iter().map(|d| d.depletion.0)).mean,
        depletion_false: MeanStderr::of(digests.iter().map(|d| d.depletion.1)).mean,
        overall: CertificationBalance::new(sum(|d| d.cert.0), sum(|d| d.cert.1)),
        final_third: CertificationBalance::new(sum(|d| d.tail.0), sum(|d| d.tail.1)),
        honest_payoff: MeanStderr::of(digests.iter().map(|d| d.honest)),
        lazy_payoff: (!lazy.is_empty()).then(|| MeanStderr::of(lazy)),
        final_pools: digests.first().map(|d| d.final_pools).unwrap_or_default(),
        trajectory: digests
            .into_iter()
            .find_map(|d| d.trajectory)
            .unwrap_or_default(),
    })
}
