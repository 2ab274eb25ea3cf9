use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AgentError;
use crate::protocol::{
    Money, Outcome, Position, PropositionId, RewardPools, SystemParams, TruthValue,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VoterStrategy {
    Honest,
    Lazy { position: Position },
    Random,
    InvertedBelief,
    Abstain,
    Adversary(AdversaryConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CertifierStrategy {
    Abstain,
    /// Certifies its belief on a uniformly chosen open proposition.
    Honest,
    /// Certifies where expected reward beats expected penalty, preferring the larger pool.
    PoolAware,
}

/// What an adversary does on propositions other than its target.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OffTarget {
    /// Votes the forced position everywhere.
    #[default]
    Incorrect,
    /// Votes its own belief away from the target.
    Honest,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcedPosition {
    /// The negation of the true value, which the adversary is assumed to know.
    #[default]
    Incorrect,
    True,
    False,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversaryConfig {
    pub budget: Money,
    /// `None` attacks every proposition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<PropositionId>,
    #[serde(default)]
    pub force: ForcedPosition,
    #[serde(default)]
    pub off_target: OffTarget,
}

impl AdversaryConfig {
    fn forced(&self, truth: TruthValue) -> Position {
        match self.force {
            ForcedPosition::True => Outcome::True,
            ForcedPosition::False => Outcome::False,
            ForcedPosition::Incorrect => match truth {
                TruthValue::True => Outcome::False,
                TruthValue::False => Outcome::True,
                // no incorrect definite value exists; push a definite outcome
                TruthValue::Undecidable => Outcome::True,
            },
        }
    }

    /// Position on an assigned proposition; `spent` grows by `stake`.
    pub fn vote(
        &self,
        spent: &mut Money,
        stake: Money,
        proposition: PropositionId,
        truth: TruthValue,
        belief: Position,
    ) -> Result<Position, AgentError> {
        if *spent + stake > self.budget {
            return Err(AgentError::BudgetExhausted {
                budget: self.budget,
                spent: *spent,
            });
        }
        *spent += stake;
        let on_target = self.target.is_none_or(|t| t == proposition);
        Ok(if on_target || self.off_target == OffTarget::Incorrect {
            self.forced(truth)
        } else {
            belief
        })
    }
}

pub fn honest_vote(belief: Position) -> Position {
    belief
}

pub fn lazy_vote(position: Position) -> Position {
    position
}

/// An open proposition as seen by a certifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertCandidate {
    pub proposition: PropositionId,
    pub belief: Position,
    pub sigma_true: Money,
    pub sigma_false: Money,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertChoice {
    pub proposition: PropositionId,
    pub position: Position,
    pub stake: Money,
}

/// Certifies the belief on one uniformly chosen candidate, abstaining on `Unknown`.
pub fn honest_certify<R: Rng + ?Sized>(
    candidates: &[CertCandidate],
    sigma_min: Money,
    rng: &mut R,
) -> Option<CertChoice> {
    if candidates.is_empty() {
        return None;
    }
    let pick = candidates[rng.random_range(0..candidates.len())];
    pick.belief.is_definite().then_some(CertChoice {
        proposition: pick.proposition,
        position: pick.belief,
        stake: sigma_min,
    })
}

/// Expected value of certifying `belief` on a candidate with stake `stake`.
///
/// Reward: `q * share * R_b / tau` where `share` counts the certifier's own
/// stake against what is already on that side. Penalty: `(1 - q) * stake`.
fn certification_value(
    accuracy: f64,
    candidate: &CertCandidate,
    pools: &RewardPools,
    params: &SystemParams,
    stake: Money,
) -> f64 {
    let existing = match candidate.belief {
        Outcome::True => candidate.sigma_true,
        Outcome::False => candidate.sigma_false,
        Outcome::Unknown => return f64::NEG_INFINITY,
    };
    let share = stake as f64 / (existing + stake) as f64;
    let payout = pools.get(candidate.belief) as f64 / params.tau as f64;
    accuracy * share * payout - (1.0 - accuracy) * stake as f64
}

/// Best positive-value certification among the candidates, or `None`.
///
/// Ties in value go to the side with the larger pool, then to the earlier candidate.
pub fn pool_aware_certify(
    accuracy: f64,
    candidates: &[CertCandidate],
    pools: &RewardPools,
    params: &SystemParams,
) -> Option<CertChoice> {
    let stake = params.sigma_min;
    let mut best: Option<(f64, Money, &CertCandidate)> = None;
    for candidate in candidates {
        let value = certification_value(accuracy, candidate, pools, params, stake);
        if value <= 0.0 {
            continue;
        }
        let pool = pools.get(candidate.belief);
        let better = match best {
            None => true,
            Some((v, p, _)) => value > v || (value == v && pool > p),
        };
        if better {
            best = Some((value, pool, candidate));
        }
    }
    best.map(|(_, _, c)| CertChoice {
        proposition: c.proposition,
        position: c.belief,
        stake,
    })
}
