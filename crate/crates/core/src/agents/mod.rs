//! Player beliefs and strategies.
//!
//! A player of accuracy `q` believes the true value of a proposition with
//! probability `q` and its negation otherwise, independently of every other
//! player and proposition. Beliefs are drawn once per (player, proposition)
//! from a stream keyed by both, so the order in which they are queried never
//! matters.

mod strategy;

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{Money, Outcome, PlayerId, Position, PropositionId, TruthValue};
use crate::seed;

pub use strategy::{
    honest_certify, honest_vote, lazy_vote, pool_aware_certify, AdversaryConfig, CertCandidate,
    CertChoice, CertifierStrategy, ForcedPosition, OffTarget, VoterStrategy,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("adversary budget exhausted ({spent} of {budget} spent)")]
    BudgetExhausted { budget: Money, spent: Money },
}

/// Static description of one player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerProfile {
    pub id: PlayerId,
    pub accuracy: f64,
    pub initial_balance: Money,
    pub voter: VoterStrategy,
    pub certifier: CertifierStrategy,
    /// Stake per vote; `None` means `s_max`.
    pub vote_stake: Option<Money>,
    /// Voting opportunities per round.
    pub votes_per_round: u32,
    /// Probability of taking each opportunity.
    pub participation: f64,
}

impl PlayerProfile {
    pub fn honest(id: PlayerId, accuracy: f64, initial_balance: Money) -> Self {
        Self {
            id,
            accuracy,
            initial_balance,
            voter: VoterStrategy::Honest,
            certifier: CertifierStrategy::Abstain,
            vote_stake: None,
            votes_per_round: 1,
            participation: 1.0,
        }
    }
}

/// Draws a belief about a proposition with the given truth.
///
/// For an undecidable proposition the player believes `Unknown` with
/// probability `accuracy`, and a uniformly random definite value otherwise.
pub fn sample_belief<R: Rng + ?Sized>(accuracy: f64, truth: TruthValue, rng: &mut R) -> Position {
    let correct = rng.random::<f64>() < accuracy;
    match truth {
        TruthValue::True | TruthValue::False => {
            let t = truth.as_outcome();
            if correct {
                t
            } else {
                t.negate()
            }
        }
        TruthValue::Undecidable => {
            if correct {
                Outcome::Unknown
            } else if rng.random::<bool>() {
                Outcome::True
            } else {
                Outcome::False
            }
        }
    }
}

/// Per-player cache of beliefs, sampled on first query.
#[derive(Debug, Clone)]
pub struct BeliefCache {
    seed: u64,
    player: PlayerId,
    accuracy: f64,
    beliefs: HashMap<PropositionId, Position>,
}

impl BeliefCache {
    pub fn new(seed: u64, player: PlayerId, accuracy: f64) -> Self {
        Self {
            seed,
            player,
            accuracy,
            beliefs: HashMap::new(),
        }
    }

    pub fn belief(&mut self, proposition: PropositionId, truth: TruthValue) -> Position {
        let (seed, player, accuracy) = (self.seed, self.player, self.accuracy);
        *self.beliefs.entry(proposition).or_insert_with(|| {
            let mut rng = seed::stream(seed, "belief", &[u64::from(player.0), proposition.0]);
            sample_belief(accuracy, truth, &mut rng)
        })
    }

    pub fn cached(&self, proposition: PropositionId) -> Option<Position> {
        self.beliefs.get(&proposition).copied()
    }

    /// Drops the belief about a decided proposition.
    pub fn forget(&mut self, proposition: PropositionId) {
        self.beliefs.remove(&proposition);
    }
}

/// A player during a simulation: profile, beliefs and spending.
#[derive(Debug, Clone)]
pub struct Agent {
    pub profile: PlayerProfile,
    pub beliefs: BeliefCache,
    spent: Money,
}

impl Agent {
    pub fn new(profile: PlayerProfile, seed: u64) -> Self {
        let beliefs = BeliefCache::new(seed, profile.id, profile.accuracy);
        Self {
            profile,
            beliefs,
            spent: 0,
        }
    }

    pub fn id(&self) -> PlayerId {
        self.profile.id
    }

    pub fn spent(&self) -> Money {
        self.spent
    }

    /// Whether this player takes a voting opportunity with the given stake.
    pub fn will_vote(&self, stake: Money) -> bool {
        match &self.profile.voter {
            VoterStrategy::Abstain => false,
            VoterStrategy::Adversary(config) => self.spent + stake <= config.budget,
            _ => true,
        }
    }

    /// Position for an assigned proposition. Adversaries are charged `stake`.
    pub fn vote<R: Rng + ?Sized>(
        &mut self,
        proposition: PropositionId,
        truth: TruthValue,
        stake: Money,
        rng: &mut R,
    ) -> Result<Position, AgentError> {
        let belief = self.beliefs.belief(proposition, truth);
        Ok(match &self.profile.voter {
            VoterStrategy::Honest | VoterStrategy::Abstain => honest_vote(belief),
            VoterStrategy::Lazy { position } => lazy_vote(*position),
            VoterStrategy::Random => {
                if rng.random::<bool>() {
                    Outcome::True
                } else {
                    Outcome::False
                }
            }
            VoterStrategy::InvertedBelief => belief.negate(),
            VoterStrategy::Adversary(config) => {
                let position = config.vote(&mut self.spent, stake, proposition, truth, belief)?;
                return Ok(position);
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream;

    #[test]
    fn perfect_and_anti_accuracy() {
        let mut rng = stream(1, "t", &[]);
        for _ in 0..200 {
            assert_eq!(
                sample_belief(1.0, TruthValue::True, &mut rng),
                Outcome::True
            );
            assert_eq!(
                sample_belief(0.0, TruthValue::True, &mut rng),
                Outcome::False
            );
            assert_eq!(
                sample_belief(0.0, TruthValue::False, &mut rng),
                Outcome::True
            );
        }
    }

    #[test]
    fn belief_frequency_matches_accuracy() {
        // 1e5 distinct propositions, q = 0.8: 3 sigma = 3 * sqrt(0.16 / 1e5) ~ 0.0038
        let mut cache = BeliefCache::new(99, PlayerId(3), 0.8);
        let n = 100_000u64;
        let hits = (0..n)
            .filter(|&j| cache.belief(PropositionId(j), TruthValue::True) == Outcome::True)
            .count();
        let freq = hits as f64 / n as f64;
        let sigma = (0.8f64 * 0.2 / n as f64).sqrt();
        assert!((freq - 0.8).abs() < 3.0 * sigma, "{freq}");
    }

    #[test]
    fn beliefs_are_cached_and_order_independent() {
        let mut a = BeliefCache::new(5, PlayerId(1), 0.6);
        let mut b = BeliefCache::new(5, PlayerId(1), 0.6);
        let forward: Vec<_> = (0..50)
            .map(|j| a.belief(PropositionId(j), TruthValue::True))
            .collect();
        let backward: Vec<_> = (0..50)
            .rev()
            .map(|j| b.belief(PropositionId(j), TruthValue::True))
            .collect();
        assert!(forward.iter().eq(backward.iter().rev()));
        for j in 0..50 {
            assert_eq!(
                a.belief(PropositionId(j), TruthValue::True),
                forward[j as usize]
            );
        }
    }

    #[test]
    fn undecidable_beliefs() {
        let mut rng = stream(2, "t", &[]);
        for _ in 0..100 {
            assert_eq!(
                sample_belief(1.0, TruthValue::Undecidable, &mut rng),
                Outcome::Unknown
            );
            assert!(sample_belief(0.0, TruthValue::Undecidable, &mut rng).is_definite());
        }
    }

    #[test]
    fn lazy_is_constant_and_abstainer_never_votes() {
        let mut profile = PlayerProfile::honest(PlayerId(0), 0.9, 100);
        profile.voter = VoterStrategy::Lazy {
            position: Outcome::True,
        };
        let mut agent = Agent::new(profile, 1);
        let mut rng = stream(3, "t", &[]);
        for j in 0..100 {
            let truth = TruthValue::from_bool(j % 3 == 0);
            assert_eq!(
                agent.vote(PropositionId(j), truth, 1, &mut rng).unwrap(),
                Outcome::True
            );
        }
        let mut abstain = PlayerProfile::honest(PlayerId(1), 0.9, 100);
        abstain.voter = VoterStrategy::Abstain;
        assert!(!Agent::new(abstain, 1).will_vote(1));
    }
}
