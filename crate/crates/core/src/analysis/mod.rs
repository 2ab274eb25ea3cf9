//! Closed-form security quantities.
//!
//! With honest voters of common accuracy `q` each staking `s_max`, a
//! proposition is decided by `D_v / s_max` independent votes. An adversary
//! controlling a fraction `f` of all votes makes each vote incorrect with
//! probability `1 - q + f*q`, and the outcome is flipped when incorrect votes
//! form a strict majority.

mod binomial;
mod table;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::Money;

pub use binomial::{binomial_below, binomial_pmf, binomial_tail};
pub use table::{
    builtin_table, check_builtin_table, manipulation_table, round_half_up, Expected, GridRow,
    ManipulationRow, TableCheck, TableEntry,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("decision stake {decision_stake} is not a multiple of s_max {s_max}")]
    NotMultiple { decision_stake: Money, s_max: Money },
    #[error("adversary budget {budget} exceeds total voting stake {total}")]
    BudgetExceedsStake { budget: Money, total: u128 },
}

/// Bernoulli-trial model of voting on one proposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoteModel {
    pub trials: u64,
    pub per_vote_correct: f64,
    /// Votes needed for a strict majority.
    pub threshold: u64,
}

impl VoteModel {
    pub fn new(
        decision_stake: Money,
        s_max: Money,
        per_vote_correct: f64,
    ) -> Result<Self, AnalysisError> {
        if s_max == 0 || decision_stake == 0 {
            return Err(AnalysisError::Domain("stakes must be positive".into()));
        }
        if !decision_stake.is_multiple_of(s_max) {
            return Err(AnalysisError::NotMultiple {
                decision_stake,
                s_max,
            });
        }
        check_probability(per_vote_correct)?;
        let trials = decision_stake / s_max;
        Ok(Self {
            trials,
            per_vote_correct,
            threshold: trials / 2 + 1,
        })
    }

    /// Probability of a strict majority of correct votes. Ties are neither.
    pub fn p_correct(&self) -> f64 {
        binomial_tail(self.trials, self.per_vote_correct, self.threshold).expect("validated model")
    }

    /// Probability of a strict majority of incorrect votes.
    pub fn p_incorrect(&self) -> f64 {
        binomial_tail(self.trials, 1.0 - self.per_vote_correct, self.threshold)
            .expect("validated model")
    }
}

fn check_probability(p: f64) -> Result<(), AnalysisError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(AnalysisError::Domain(format!(
            "probability {p} outside [0, 1]"
        )))
    }
}

/// Probability that the voting outcome is correct.
pub fn p_vote_correct(decision_stake: Money, s_max: Money, q: f64) -> Result<f64, AnalysisError> {
    Ok(VoteModel::new(decision_stake, s_max, q)?.p_correct())
}

/// Per-vote error probability when the adversary owns `fraction` of all votes.
pub fn incorrect_vote_prob(q: f64, fraction: f64) -> Result<f64, AnalysisError> {
    check_probability(q)?;
    check_probability(fraction)?;
    Ok(1.0 - q + fraction * q)
}

/// Per-vote error probability for an adversary with budget `n` against a list
/// of `list_size` propositions, each decided at `decision_stake`.
pub fn adversary_incorrect_prob(
    q: f64,
    n: Money,
    list_size: u64,
    decision_stake: Money,
) -> Result<f64, AnalysisError> {
    let total = list_size as u128 * decision_stake as u128;
    if total == 0 {
        return Err(AnalysisError::Domain(
            "empty list or zero decision stake".into(),
        ));
    }
    if n as u128 > total {
        return Err(AnalysisError::BudgetExceedsStake { budget: n, total });
    }
    incorrect_vote_prob(q, n as f64 / total as f64)
}

/// Probability that a given proposition ends with a strict majority of incorrect votes.
pub fn p_manipulate_specific(
    q: f64,
    n: Money,
    list_size: u64,
    decision_stake: Money,
    s_max: Money,
) -> Result<f64, AnalysisError> {
    let per_vote = adversary_incorrect_prob(q, n, list_size, decision_stake)?;
    Ok(VoteModel::new(decision_stake, s_max, 1.0 - per_vote)?.p_incorrect())
}

/// Same as [`p_manipulate_specific`] with the adversary's share of votes given directly.
pub fn p_manipulate_specific_fraction(
    q: f64,
    fraction: f64,
    votes_to_decide: u64,
) -> Result<f64, AnalysisError> {
    let per_vote = incorrect_vote_prob(q, fraction)?;
    Ok(VoteModel::new(votes_to_decide, 1, 1.0 - per_vote)?.p_incorrect())
}

/// Probability that at least one of `list_size` independent propositions is flipped.
pub fn p_manipulate_any(p_specific: f64, list_size: u64) -> Result<f64, AnalysisError> {
    check_probability(p_specific)?;
    if p_specific == 1.0 {
        return Ok(if list_size == 0 { 0.0 } else { 1.0 });
    }
    Ok(-(list_size as f64 * (-p_specific).ln_1p()).exp_m1())
}

/// Largest bounty that keeps voters below accuracy `q` unprofitable: `(1-q)*D_v/q`, rounded down.
pub fn max_bounty(q: f64, decision_stake: Money) -> Result<Money, AnalysisError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(AnalysisError::Domain(format!(
            "accuracy {q} outside (0, 1)"
        )));
    }
    if decision_stake == 0 {
        return Err(AnalysisError::Domain(
            "decision stake must be positive".into(),
        ));
    }
    let cap = (1.0 - q) * decision_stake as f64 / q;
    // (1 - 0.8) * 1000 / 0.8 evaluates to 249.99999999999997
    let nearest = cap.round();
    if (cap - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        Ok(nearest as Money)
    } else {
        Ok(cap.floor() as Money)
    }
}

/// Accuracy enforced by a bounty cap: inverse of [`max_bounty`], `D_v / (D_v + B)`.
pub fn min_accuracy(bounty: Money, decision_stake: Money) -> Result<f64, AnalysisError> {
    if bounty == 0 || decision_stake == 0 {
        return Err(AnalysisError::Domain(
            "bounty and decision stake must be positive".into(),
        ));
    }
    Ok(decision_stake as f64 / (decision_stake as f64 + bounty as f64))
}
