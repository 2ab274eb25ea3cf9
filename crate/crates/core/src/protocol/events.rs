//! Newline-delimited JSON event log.
//!
//! Every state change of a [`Game`] is one record. Money fields are integers.
//! Replaying a log through [`replay`] reconstructs the game and re-checks every
//! recorded reveal and settlement.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::commitment::{Digest, Nonce};
use super::error::{ParamError, ProtocolError};
use super::game::Game;
use super::types::{
    AssignmentId, CertificationId, Money, Outcome, PlayerId, Position, PropositionId, RewardPools,
    SystemParams, TruthValue,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum Event {
    Genesis {
        params: SystemParams,
    },
    Fund {
        player: PlayerId,
        amount: Money,
    },
    SeedPools {
        r_true: Money,
        r_false: Money,
    },
    Submit {
        proposition: PropositionId,
        truth: TruthValue,
        bounty: Money,
    },
    VoteRequest {
        assignment: AssignmentId,
        player: PlayerId,
        proposition: PropositionId,
        stake: Money,
    },
    VoteCommit {
        assignment: AssignmentId,
        digest: Digest,
    },
    VoteReveal {
        assignment: AssignmentId,
        value: Position,
        nonce: Nonce,
        accepted: bool,
    },
    VoteExpire {
        assignment: AssignmentId,
    },
    CertCommit {
        certification: CertificationId,
        player: PlayerId,
        proposition: PropositionId,
        stake: Money,
        digest: Digest,
    },
    CertReveal {
        certification: CertificationId,
        value: Position,
        nonce: Nonce,
        accepted: bool,
    },
    Settle {
        proposition: PropositionId,
        voting: Outcome,
        certification: Outcome,
        game: Outcome,
        oracle: Outcome,
        pool_drain: Money,
        pool_transfer: Money,
        r_true: Money,
        r_false: Money,
    },
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("log must start with a genesis record")]
    MissingGenesis,
    #[error("invalid parameters: {0}")]
    Params(#[from] ParamError),
    #[error("record {index}: {source}")]
    Protocol { index: usize, source: ProtocolError },
    #[error("record {index}: replay diverged ({detail})")]
    Diverged { index: usize, detail: String },
}

pub fn write_ndjson<W: Write>(mut out: W, events: &[Event]) -> std::io::Result<()> {
    for event in events {
        serde_json::to_writer(&mut out, event)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_ndjson<R: BufRead>(input: R) -> Result<Vec<Event>, ReplayError> {
    let mut events = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event = serde_json::from_str(&line).map_err(|source| ReplayError::Parse {
            line: i + 1,
            source,
        })?;
        events.push(event);
    }
    Ok(events)
}

/// Applies a log one record at a time, re-checking each against the game.
#[derive(Debug)]
pub struct Replayer {
    game: Game,
    index: usize,
}

impl Replayer {
    /// Starts from the genesis record.
    pub fn new(genesis: &Event) -> Result<Self, ReplayError> {
        let Event::Genesis { params } = genesis else {
            return Err(ReplayError::MissingGenesis);
        };
        Ok(Self {
            game: Game::with_event_log(params.clone())?,
            index: 0,
        })
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn into_game(self) -> Game {
        self.game
    }

    pub fn apply(&mut self, event: &Event) -> Result<(), ReplayError> {
        self.index += 1;
        let index = self.index;
        let diverged = |detail: String| ReplayError::Diverged { index, detail };
        let protocol = |source| ReplayError::Protocol { index, source };
        match event {
            Event::Genesis { .. } => return Err(diverged("second genesis record".into())),
            Event::Fund { player, amount } => self.game.fund(*player, *amount),
            Event::SeedPools { r_true, r_false } => self.game.seed_pools(RewardPools {
                r_true: *r_true,
                r_false: *r_false,
            }),
            Event::Submit {
                proposition,
                truth,
                bounty,
            } => {
                let id = self
                    .game
                    .submit_proposition(*truth, *bounty)
                    .map_err(protocol)?;
                if id != *proposition {
                    return Err(diverged(format!("submitted {id}, log says {proposition}")));
                }
            }
            Event::VoteRequest {
                assignment,
                player,
                proposition,
                stake,
            } => {
                let id = self
                    .game
                    .assign_vote(*player, *stake, *proposition)
                    .map_err(protocol)?;
                if id != *assignment {
                    return Err(diverged(format!("assigned {id}, log says {assignment}")));
                }
            }
            Event::VoteCommit { assignment, digest } => self
                .game
                .commit_vote(*assignment, *digest)
                .map_err(protocol)?,
            Event::VoteReveal {
                assignment,
                value,
                nonce,
                accepted,
            } => match (self.game.reveal_vote(*assignment, *value, *nonce), accepted) {
                (Ok(()), true) | (Err(ProtocolError::DigestMismatch { .. }), false) => {}
                (Err(e), _) => return Err(protocol(e)),
                (Ok(()), false) => return Err(diverged("reveal accepted on replay".into())),
            },
            Event::VoteExpire { assignment } => {
                self.game.expire_vote(*assignment).map_err(protocol)?;
            }
            Event::CertCommit {
                certification,
                player,
                proposition,
                stake,
                digest,
            } => {
                let id = self
                    .game
                    .commit_certification(*player, *proposition, *stake, *digest)
                    .map_err(protocol)?;
                if id != *certification {
                    return Err(diverged(format!(
                        "committed {id}, log says {certification}"
                    )));
                }
            }
            Event::CertReveal {
                certification,
                value,
                nonce,
                accepted,
            } => match (
                self.game
                    .reveal_certification(*certification, *value, *nonce),
                accepted,
            ) {
                (Ok(()), true) | (Err(ProtocolError::DigestMismatch { .. }), false) => {}
                (Err(e), _) => return Err(protocol(e)),
                (Ok(()), false) => return Err(diverged("reveal accepted on replay".into())),
            },
            Event::Settle { proposition, .. } => {
                self.game.settle(*proposition).map_err(protocol)?;
                let replayed = self
                    .game
                    .events()
                    .and_then(|log| log.last())
                    .expect("settle is logged");
                if replayed != event {
                    return Err(diverged(format!("settled as {replayed:?}")));
                }
            }
        }
        Ok(())
    }
}

/// Rebuilds a game from its event log.
pub fn replay(events: &[Event]) -> Result<Game, ReplayError> {
    let Some(genesis) = events.first() else {
        return Err(ReplayError::MissingGenesis);
    };
    let mut replayer = Replayer::new(genesis)?;
    for event in &events[1..] {
        replayer.apply(event)?;
    }
    Ok(replayer.into_game())
}
