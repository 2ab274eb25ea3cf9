//! Unilateral-deviation test of honest play.
//!
//! One designated player adopts each strategy of a menu in turn while the
//! rest of the population votes and certifies honestly. Every strategy is
//! run on the same trial seeds, so the propositions and the other players'
//! beliefs are shared across the comparison.

use serde::{Deserialize, Serialize};

use super::experiment::map_trials;
use super::scenario::{BountyDistribution, Cohort, PropositionStream, RunSettings, ScenarioConfig};
use crate::agents::{CertifierStrategy, VoterStrategy};
use crate::analysis::{incorrect_vote_prob, max_bounty};
use crate::config::ConfigError;
use crate::protocol::{Money, Outcome, RewardPools, SystemParams};
use crate::stats::MeanStderr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Deviation {
    Honest,
    LazyTrue,
    LazyFalse,
    Random,
    InvertedBelief,
    Abstain,
}

impl Deviation {
    pub const MENU: [Deviation; 6] = [
        Deviation::Honest,
        Deviation::LazyTrue,
        Deviation::LazyFalse,
        Deviation::Random,
        Deviation::InvertedBelief,
        Deviation::Abstain,
    ];

    pub fn strategy(self) -> VoterStrategy {
        match self {
            Deviation::Honest => VoterStrategy::Honest,
            Deviation::LazyTrue => VoterStrategy::Lazy {
                position: Outcome::True,
            },
            Deviation::LazyFalse => VoterStrategy::Lazy {
                position: Outcome::False,
            },
            Deviation::Random => VoterStrategy::Random,
            Deviation::InvertedBelief => VoterStrategy::InvertedBelief,
            Deviation::Abstain => VoterStrategy::Abstain,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Deviation::Honest => "honest",
            Deviation::LazyTrue => "lazy-true",
            Deviation::LazyFalse => "lazy-false",
            Deviation::Random => "random",
            Deviation::InvertedBelief => "inverted-belief",
            Deviation::Abstain => "abstain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquilibriumSettings {
    /// Defaults to stakes scaled by 100 minor units.
    pub params: SystemParams,
    /// Accuracy of every voter, the deviator included.
    pub accuracy: f64,
    /// Honest voters besides the deviator.
    pub voters: u32,
    pub certifiers: u32,
    pub certifier_accuracy: f64,
    pub p_true: f64,
    pub bounty: Money,
    pub pools: RewardPools,
    pub rounds: u64,
    pub trials: u64,
    pub seed: u64,
    pub menu: Vec<Deviation>,
    /// Bounties at which to measure the honest payoff around the bounty cap.
    pub straddle_bounties: Vec<Money>,
}

impl Default for EquilibriumSettings {
    fn default() -> Self {
        Self {
            params: SystemParams::with_stake_unit(100),
            accuracy: 0.95,
            voters: 40,
            certifiers: 5,
            certifier_accuracy: 0.95,
            p_true: 0.5,
            bounty: 2000,
            pools: RewardPools {
                r_true: 100_000,
                r_false: 100_000,
            },
            rounds: 50,
            trials: 200,
            seed: 0,
            menu: Deviation::MENU.to_vec(),
            straddle_bounties: Vec::new(),
        }
    }
}

impl EquilibriumSettings {
    /// Population with the deviator as player 0.
    pub fn scenario(&self, deviation: Deviation) -> ScenarioConfig {
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
                rounds: self.rounds,
                trials: self.trials,
                seed: self.seed,
                ..RunSettings::default()
            },
            cohorts: vec![
                Cohort::voters("deviator", 1, self.accuracy).with_voter(deviation.strategy()),
                Cohort::voters("honest", self.voters, self.accuracy),
                Cohort::certifiers(
                    "certifiers",
                    self.certifiers,
                    self.certifier_accuracy,
                    CertifierStrategy::Honest,
                ),
            ],
        }
    }

    /// Per-vote error probability of the population; honest play is an
    /// equilibrium only while it stays below one half.
    pub fn assumption_value(&self) -> f64 {
        incorrect_vote_prob(self.accuracy.clamp(0.0, 1.0), 0.0).unwrap_or(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationResult {
    pub deviation: Deviation,
    pub payoff: MeanStderr,
    /// Mean payoff minus the honest mean.
    pub excess: f64,
    /// Two combined standard errors.
    pub allowance: f64,
    pub violation: bool,
    /// Payoff of the deviator in every trial, in trial order.
    pub per_trial: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub applicable: bool,
    pub assumption_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub honest: MeanStderr,
    pub rows: Vec<DeviationResult>,
    pub violations: usize,
}

fn deviator_payoffs(
    settings: &EquilibriumSettings,
    deviation: Deviation,
) -> Result<Vec<i64>, ConfigError> {
    map_trials(&settings.scenario(deviation), |t| t.players[0].net)
}

pub fn equilibrium_check(settings: &EquilibriumSettings) -> Result<EquilibriumReport, ConfigError> {
    let assumption_value = settings.assumption_value();
    let applicable = assumption_value < 0.5;
    let honest_runs = deviator_payoffs(settings, Deviation::Honest)?;
    let honest = MeanStderr::of(honest_runs.iter().map(|&v| v as f64));
    let mut rows = Vec::new();
    for &deviation in &settings.menu {
        let per_trial = if deviation == Deviation::Honest {
            honest_runs.clone()
        } else {
            deviator_payoffs(settings, deviation)?
        };
        let payoff = MeanStderr::of(per_trial.iter().map(|&v| v as f64));
        let allowance = 2.0 * payoff.combined_stderr(&honest);
        let excess = payoff.mean - honest.mean;
        rows.push(DeviationResult {
            deviation,
            payoff,
            excess,
            allowance,
            violation: excess > allowance,
            per_trial,
        });
    }
    let violations = rows.iter().filter(|r| r.violation).count();
    Ok(EquilibriumReport {
        applicable,
        assumption_value,
        warning: (!applicable).then(|| {
            format!(
                "assumption violated: per-vote error probability {assumption_value} is not below 0.5"
            )
        }),
        honest,
        rows,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BountyPoint {
    pub bounty: Money,
    /// Mean payoff per honest voter per trial.
    pub payoff: MeanStderr,
}

/// Honest-voter payoff on each side of the bounty cap for the population's accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BountyStraddle {
    pub accuracy: f64,
    pub cap: Money,
    pub points: Vec<BountyPoint>,
}

pub fn bounty_straddle(
    settings: &EquilibriumSettings,
    bounties: &[Money],
) -> Result<BountyStraddle, ConfigError> {
    let cap = max_bounty(settings.accuracy, settings.params.decision_stake)
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let points = bounties
        .iter()
        .map(|&bounty| {
            let config = EquilibriumSettings {
                bounty,
                ..settings.clone()
            }
            .scenario(Deviation::Honest);
            let per_trial = map_trials(&config, |t| {
                let honest = t.cohort("honest").expect("honest cohort");
                let deviator = t.cohort("deviator").expect("deviator cohort");
                (honest.net + deviator.net) as f64 / (honest.players + deviator.players) as f64
            })?;
            Ok(BountyPoint {
                bounty,
                payoff: MeanStderr::of(per_trial),
            })
        })
        .collect::<Result<_, ConfigError>>()?;
    Ok(BountyStraddle {
        accuracy: settings.accuracy,
        cap,
        points,
    })
}
