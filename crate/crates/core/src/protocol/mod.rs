//! Deterministic state machine for the staked voting and certification game.

mod commitment;
mod error;
mod events;
mod game;
mod outcome;
mod types;

pub use commitment::{commitment_digest, Commitment, Digest, Nonce, Role};
pub use error::{ParamError, ProtocolError};
pub use events::{read_ndjson, replay, write_ndjson, Event, ReplayError, Replayer};
pub use game::{Game, VoteSlot};
pub use outcome::{
    certification_outcome, game_outcome, majority, oracle_confidence, oracle_outcome,
    voting_outcome,
};
pub use types::{
    AssignmentId, CertStake, CertificationId, GameResult, Ledger, Money, Outcome, PlayerDelta,
    PlayerId, Position, Proposition, PropositionId, PropositionStatus, RewardPools, SignedMoney,
    SystemParams, Totals, TruthValue, VoteStake,
};
