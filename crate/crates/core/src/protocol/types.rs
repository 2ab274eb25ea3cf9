use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::error::ParamError;

/// Integer money in minor units.
pub type Money = u64;

/// Signed money, used for reward/penalty deltas.
pub type SignedMoney = i64;

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident($inner:ty), $prefix:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub $inner);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_newtype!(
    /// Player identity. Colluding entities are modeled as a single player.
    PlayerId(u32),
    "player#"
);
id_newtype!(PropositionId(u64), "prop#");
id_newtype!(
    /// Handle for a staked voting opportunity returned by `request_vote`.
    AssignmentId(u64),
    "assignment#"
);
id_newtype!(CertificationId(u64), "cert#");

/// System-wide parameters of one game instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    /// Maximum stake of a single vote.
    pub s_max: Money,
    /// Minimum stake of a single certification.
    pub sigma_min: Money,
    /// Total voting stake at which a proposition is decided.
    pub decision_stake: Money,
    /// Fixed size of the proposition list.
    pub list_size: usize,
    /// Certification target: each pool drain removes `1/tau` of the pool.
    pub tau: u64,
    /// Fraction of the two-way stake a side needs to win. 0.5 is simple majority.
    pub majority_threshold: f64,
    /// Enables the third `unknown` voting option.
    pub tri_state: bool,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            s_max: 1,
            sigma_min: 10,
            decision_stake: 20,
            list_size: 100,
            tau: 10,
            majority_threshold: 0.5,
            tri_state: false,
        }
    }
}

impl SystemParams {
    /// Default parameters with every stake multiplied by `unit`, so that
    /// integer reward shares are not dominated by rounding.
    pub fn with_stake_unit(unit: Money) -> Self {
        let base = Self::default();
        Self {
            s_max: base.s_max * unit,
            sigma_min: base.sigma_min * unit,
            decision_stake: base.decision_stake * unit,
            ..base
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.s_max == 0 {
            return Err(ParamError::ZeroVoteCap);
        }
        if self.sigma_min == 0 {
            return Err(ParamError::ZeroCertificationMinimum);
        }
        if self.decision_stake < self.s_max {
            return Err(ParamError::DecisionStakeBelowVoteCap {
                decision_stake: self.decision_stake,
                s_max: self.s_max,
            });
        }
        if self.list_size == 0 {
            return Err(ParamError::EmptyList);
        }
        if self.tau == 0 {
            return Err(ParamError::ZeroTau);
        }
        if !(0.5..1.0).contains(&self.majority_threshold) {
            return Err(ParamError::Threshold(self.majority_threshold));
        }
        Ok(())
    }

    /// Number of full-stake votes needed to decide, if `decision_stake` is a multiple of `s_max`.
    pub fn full_votes_to_decide(&self) -> Option<u64> {
        self.decision_stake
            .is_multiple_of(self.s_max)
            .then(|| self.decision_stake / self.s_max)
    }
}

/// Hidden ground truth of a proposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthValue {
    True,
    False,
    /// No clear answer, or the proposition data was withheld. Tri-state mode only.
    Undecidable,
}

impl TruthValue {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }

    /// The definite outcome matching this truth, or `Unknown` for undecidable propositions.
    pub fn as_outcome(self) -> Outcome {
        match self {
            TruthValue::True => Outcome::True,
            TruthValue::False => Outcome::False,
            TruthValue::Undecidable => Outcome::Unknown,
        }
    }
}

/// Three-valued result of voting, certification, game or oracle.
///
/// Also used as the position a player takes in a vote or certification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    True,
    False,
    Unknown,
}

/// A position taken in a vote or certification.
pub type Position = Outcome;

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::True, Outcome::False, Outcome::Unknown];

    /// Opposite definite value; `Unknown` maps to itself.
    pub fn negate(self) -> Self {
        match self {
            Outcome::True => Outcome::False,
            Outcome::False => Outcome::True,
            Outcome::Unknown => Outcome::Unknown,
        }
    }

    pub fn is_definite(self) -> bool {
        self != Outcome::Unknown
    }

    /// Byte used in the commitment preimage.
    pub fn position_byte(self) -> u8 {
        match self {
            Outcome::False => 0x00,
            Outcome::True => 0x01,
            Outcome::Unknown => 0x02,
        }
    }

    pub fn from_position_byte(b: u8) -> Option<Self> {
        match b {
            0x00 => Some(Outcome::False),
            0x01 => Some(Outcome::True),
            0x02 => Some(Outcome::Unknown),
            _ => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::True => "T",
            Outcome::False => "F",
            Outcome::Unknown => "unknown",
        })
    }
}

/// Per-player voting stake on one proposition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteStake {
    pub on_true: Money,
    pub on_false: Money,
    pub on_unknown: Money,
}

impl VoteStake {
    pub fn total(&self) -> Money {
        self.on_true + self.on_false + self.on_unknown
    }

    pub(crate) fn add(&mut self, position: Position, stake: Money) {
        match position {
            Outcome::True => self.on_true += stake,
            Outcome::False => self.on_false += stake,
            Outcome::Unknown => self.on_unknown += stake,
        }
    }
}

/// Per-player certification stake on one proposition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertStake {
    pub on_true: Money,
    pub on_false: Money,
}

impl CertStake {
    pub fn total(&self) -> Money {
        self.on_true + self.on_false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropositionStatus {
    Open,
    Decided,
}

/// A Boolean claim on the proposition list together with its stake ledgers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proposition {
    pub id: PropositionId,
    pub truth: TruthValue,
    pub bounty: Money,
    pub vote_stakes: BTreeMap<PlayerId, VoteStake>,
    pub cert_stakes: BTreeMap<PlayerId, CertStake>,
    pub status: PropositionStatus,
    /// Voting stake escrowed by assignments that have not been revealed yet.
    pub pending_vote_stake: Money,
    /// Stake forfeited by failed reveals, held in the sink until settlement.
    pub forfeited: Money,
}

impl Proposition {
    pub(crate) fn new(id: PropositionId, truth: TruthValue, bounty: Money) -> Self {
        Self {
            id,
            truth,
            bounty,
            vote_stakes: BTreeMap::new(),
            cert_stakes: BTreeMap::new(),
            status: PropositionStatus::Open,
            pending_vote_stake: 0,
            forfeited: 0,
        }
    }

    /// Sums of revealed stakes per direction. Unrevealed commitments contribute nothing.
    pub fn totals(&self) -> Totals {
        let mut totals = Totals::default();
        for stake in self.vote_stakes.values() {
            totals.s_tot_true += stake.on_true;
            totals.s_tot_false += stake.on_false;
            totals.s_tot_unknown += stake.on_unknown;
        }
        for stake in self.cert_stakes.values() {
            totals.sigma_tot_true += stake.on_true;
            totals.sigma_tot_false += stake.on_false;
        }
        totals
    }

    /// Whether new vote assignments may still be drawn for this proposition.
    pub fn accepts_votes(&self, params: &SystemParams) -> bool {
        self.status == PropositionStatus::Open
            && self.totals().voting_stake() + self.pending_vote_stake < params.decision_stake
    }
}

/// Aggregate stake totals of one proposition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub s_tot_true: Money,
    pub s_tot_false: Money,
    pub s_tot_unknown: Money,
    pub sigma_tot_true: Money,
    pub sigma_tot_false: Money,
}

impl Totals {
    pub fn voting_stake(&self) -> Money {
        self.s_tot_true + self.s_tot_false + self.s_tot_unknown
    }

    pub fn certification_stake(&self) -> Money {
        self.sigma_tot_true + self.sigma_tot_false
    }
}

/// The two certifier reward pools.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewardPools {
    pub r_true: Money,
    pub r_false: Money,
}

impl RewardPools {
    pub fn get(&self, side: Outcome) -> Money {
        match side {
            Outcome::True => self.r_true,
            Outcome::False => self.r_false,
            Outcome::Unknown => 0,
        }
    }

    pub(crate) fn get_mut(&mut self, side: Outcome) -> &mut Money {
        match side {
            Outcome::True => &mut self.r_true,
            Outcome::False => &mut self.r_false,
            Outcome::Unknown => unreachable!("no pool for the unknown outcome"),
        }
    }

    pub fn total(&self) -> Money {
        self.r_true + self.r_false
    }
}

/// Reward (positive) or penalty (negative) for one player on one proposition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerDelta {
    pub vote: SignedMoney,
    pub certify: SignedMoney,
}

impl PlayerDelta {
    pub fn total(&self) -> SignedMoney {
        self.vote + self.certify
    }
}

/// Everything produced by settling one proposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub proposition: PropositionId,
    pub truth: TruthValue,
    pub bounty: Money,
    pub totals: Totals,
    pub voting: Outcome,
    pub certification: Outcome,
    pub game: Outcome,
    pub oracle: Outcome,
    pub confidence: f64,
    pub deltas: BTreeMap<PlayerId, PlayerDelta>,
    /// Amount drained from the pool matching the voting outcome.
    pub pool_drain: Money,
    /// Part of the drain moved into the opposite pool.
    pub pool_transfer: Money,
    /// Part of the drain paid out to certifiers.
    pub certifier_payout: Money,
    /// Bounty remainder, penalties and forfeits routed into the pools.
    pub routed_to_pools: Money,
    /// Stake forfeited through failed or missing reveals on this proposition.
    pub forfeited: Money,
    pub pools_after: RewardPools,
}

impl GameResult {
    /// True when the voting outcome is definite and contradicts a definite truth.
    pub fn is_manipulated(&self) -> bool {
        self.voting.is_definite()
            && self.truth != TruthValue::Undecidable
            && self.voting != self.truth.as_outcome()
    }

    pub fn voter_delta_sum(&self) -> SignedMoney {
        self.deltas.values().map(|d| d.vote).sum()
    }
}

/// Money held by the game outside the propositions' bounties.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledger {
    pub balances: BTreeMap<PlayerId, Money>,
    /// Stake locked in open propositions.
    pub escrow: Money,
    pub pools: RewardPools,
    /// Forfeits awaiting settlement plus the odd unit left from even pool splits.
    pub sink: Money,
    /// Bounties of propositions not yet settled.
    pub bounties: Money,
    /// Money that entered from outside: player funding, pool seeding, bounties.
    pub deposited: Money,
}

impl Ledger {
    pub fn balance(&self, player: PlayerId) -> Money {
        self.balances.get(&player).copied().unwrap_or(0)
    }

    /// Every unit the game currently holds, wherever it sits.
    pub fn total(&self) -> u128 {
        let balances: u128 = self.balances.values().map(|&b| b as u128).sum();
        balances
            + self.escrow as u128
            + self.pools.total() as u128
            + self.sink as u128
            + self.bounties as u128
    }
}
