//! Outcome rules: voting and certification majorities, the game table that
//! drives rewards, and the suggested oracle mapping.

use super::types::{Money, Outcome, Totals};

/// Two-way majority between the true and false stakes.
///
/// At threshold 0.5 a strict majority wins and a tie is `Unknown`. Above 0.5
/// a side needs more than `threshold` of the combined stake.
pub fn majority(on_true: Money, on_false: Money, threshold: f64) -> Outcome {
    let combined = (on_true + on_false) as f64;
    if on_true as f64 > threshold * combined {
        Outcome::True
    } else if on_false as f64 > threshold * combined {
        Outcome::False
    } else {
        Outcome::Unknown
    }
}

/// Outcome of voting. Unknown votes win outright when they hold a strict plurality.
pub fn voting_outcome(totals: &Totals, threshold: f64) -> Outcome {
    if totals.s_tot_unknown > totals.s_tot_true.max(totals.s_tot_false) {
        return Outcome::Unknown;
    }
    majority(totals.s_tot_true, totals.s_tot_false, threshold)
}

/// Outcome of certification. No certifications at all is a tie, hence `Unknown`.
pub fn certification_outcome(totals: &Totals, threshold: f64) -> Outcome {
    majority(totals.sigma_tot_true, totals.sigma_tot_false, threshold)
}

/// Reward-determining outcome: definite only when voting and certification agree.
pub fn game_outcome(voting: Outcome, certification: Outcome) -> Outcome {
    match (voting, certification) {
        (Outcome::True, Outcome::True) => Outcome::True,
        (Outcome::False, Outcome::False) => Outcome::False,
        _ => Outcome::Unknown,
    }
}

/// Reported outcome: the voting result stands unless certification contradicts it.
pub fn oracle_outcome(voting: Outcome, certification: Outcome) -> Outcome {
    match (voting, certification) {
        (Outcome::Unknown, _) => Outcome::Unknown,
        (v, Outcome::Unknown) => v,
        (v, c) if v == c => v,
        _ => Outcome::Unknown,
    }
}

/// Share of two-way voting stake on true; 0.5 when nobody has voted either way.
pub fn oracle_confidence(totals: &Totals) -> f64 {
    let combined = totals.s_tot_true + totals.s_tot_false;
    if combined == 0 {
        0.5
    } else {
        totals.s_tot_true as f64 / combined as f64
    }
}
