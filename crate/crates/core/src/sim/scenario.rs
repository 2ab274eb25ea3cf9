use serde::{Deserialize, Serialize};

use crate::agents::{CertifierStrategy, PlayerProfile, VoterStrategy};
use crate::config::ConfigError;
use crate::protocol::{Money, PlayerId, RewardPools, SystemParams};

fn one() -> u32 {
    1
}

fn full() -> f64 {
    1.0
}

fn default_balance() -> Money {
    1_000_000
}

fn honest_voter() -> VoterStrategy {
    VoterStrategy::Honest
}

fn abstaining_certifier() -> CertifierStrategy {
    CertifierStrategy::Abstain
}

/// A group of identically configured players.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cohort {
    pub name: String,
    #[serde(default = "one")]
    pub count: u32,
    pub accuracy: f64,
    #[serde(default = "default_balance")]
    pub balance: Money,
    #[serde(default = "honest_voter")]
    pub voter: VoterStrategy,
    #[serde(default = "abstaining_certifier")]
    pub certifier: CertifierStrategy,
    /// Stake per vote; `s_max` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vote_stake: Option<Money>,
    #[serde(default = "one")]
    pub votes_per_round: u32,
    #[serde(default = "one")]
    pub certifications_per_round: u32,
    /// Probability of taking each voting or certifying opportunity.
    #[serde(default = "full")]
    pub participation: f64,
}

impl Cohort {
    pub fn voters(name: &str, count: u32, accuracy: f64) -> Self {
        Self {
            name: name.into(),
            count,
            accuracy,
            balance: default_balance(),
            voter: VoterStrategy::Honest,
            certifier: CertifierStrategy::Abstain,
            vote_stake: None,
            votes_per_round: 1,
            certifications_per_round: 1,
            participation: 1.0,
        }
    }

    pub fn certifiers(name: &str, count: u32, accuracy: f64, strategy: CertifierStrategy) -> Self {
        Self {
            voter: VoterStrategy::Abstain,
            certifier: strategy,
            ..Self::voters(name, count, accuracy)
        }
    }

    pub fn with_voter(mut self, voter: VoterStrategy) -> Self {
        self.voter = voter;
        self
    }

    pub fn profile(&self, id: PlayerId) -> PlayerProfile {
        PlayerProfile {
            id,
            accuracy: self.accuracy,
            initial_balance: self.balance,
            voter: self.voter.clone(),
            certifier: self.certifier,
            vote_stake: self.vote_stake,
            votes_per_round: self.votes_per_round,
            participation: self.participation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BountyDistribution {
    Fixed {
        amount: Money,
    },
    /// Uniform over `min..=max`.
    Uniform {
        min: Money,
        max: Money,
    },
}

/// Source of new propositions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropositionStream {
    /// Probability that a decidable proposition is true.
    pub p_true: f64,
    pub bounty: BountyDistribution,
    /// Share of propositions whose truth is undecidable (tri-state mode only).
    pub undecidable_fraction: f64,
}

impl Default for PropositionStream {
    fn default() -> Self {
        Self {
            p_true: 0.5,
            bounty: BountyDistribution::Fixed { amount: 10 },
            undecidable_fraction: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSettings {
    pub rounds: u64,
    pub trials: u64,
    pub seed: u64,
    /// Refill the list after every round. Off, the initial list is voted down and not replaced.
    pub replenish: bool,
    /// Stop a trial once this many propositions are decided.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_decided: Option<u64>,
    pub record_events: bool,
    pub record_results: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            rounds: 100,
            trials: 1,
            seed: 0,
            replenish: true,
            max_decided: None,
            record_events: false,
            record_results: false,
        }
    }
}

/// Everything needed to run one simulated population.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub params: SystemParams,
    pub stream: PropositionStream,
    pub pools: RewardPools,
    pub run: RunSettings,
    #[serde(rename = "cohort")]
    pub cohorts: Vec<Cohort>,
}

fn probability(name: &str, p: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!(
            "{name} = {p} is not a probability"
        )))
    }
}

impl ScenarioConfig {
    pub fn player_count(&self) -> usize {
        self.cohorts.iter().map(|c| c.count as usize).sum()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params
            .validate()
            .map_err(|e| ConfigError::Invalid(format!("params: {e}")))?;
        probability("stream.p_true", self.stream.p_true)?;
        probability(
            "stream.undecidable_fraction",
            self.stream.undecidable_fraction,
        )?;
        if self.stream.undecidable_fraction > 0.0 && !self.params.tri_state {
            return Err(ConfigError::Invalid(
                "stream.undecidable_fraction > 0 requires params.tri_state".into(),
            ));
        }
        match self.stream.bounty {
            BountyDistribution::Fixed { amount: 0 } => {
                return Err(ConfigError::Invalid("bounty must be positive".into()))
            }
            BountyDistribution::Uniform { min, max } if min == 0 || min > max => {
                return Err(ConfigError::Invalid(format!(
                    "uniform bounty needs 0 < min <= max, got {min}..={max}"
                )))
            }
            _ => {}
        }
        if self.run.trials == 0 {
            return Err(ConfigError::Invalid("run.trials must be at least 1".into()));
        }
        for c in &self.cohorts {
            probability(&format!("cohort {}: accuracy", c.name), c.accuracy)?;
            probability(
                &format!("cohort {}: participation", c.name),
                c.participation,
            )?;
            if let Some(stake) = c.vote_stake {
                if stake == 0 || stake > self.params.s_max {
                    return Err(ConfigError::Invalid(format!(
                        "cohort {}: vote_stake {stake} outside 1..={}",
                        c.name, self.params.s_max
                    )));
                }
            }
        }
        Ok(())
    }
}
