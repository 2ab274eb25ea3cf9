use thiserror::Error;

use super::types::{AssignmentId, CertificationId, Money, PlayerId, PropositionId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("s_max must be positive")]
    ZeroVoteCap,
    #[error("sigma_min must be positive")]
    ZeroCertificationMinimum,
    #[error("decision stake {decision_stake} is below s_max {s_max}")]
    DecisionStakeBelowVoteCap { decision_stake: Money, s_max: Money },
    #[error("list_size must be at least 1")]
    EmptyList,
    #[error("tau must be at least 1")]
    ZeroTau,
    #[error("majority threshold {0} outside [0.5, 1)")]
    Threshold(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("proposition list is full")]
    ListFull,
    #[error("bounty must be positive")]
    NonPositiveBounty,
    #[error("undecidable propositions require tri-state mode")]
    UndecidableDisabled,
    #[error("stake must be positive")]
    NonPositiveStake,
    #[error("vote stake {stake} exceeds s_max {s_max}")]
    StakeTooLarge { stake: Money, s_max: Money },
    #[error("certification stake {stake} below sigma_min {sigma_min}")]
    StakeTooSmall { stake: Money, sigma_min: Money },
    #[error("{player} has {available}, needs {needed}")]
    InsufficientBalance {
        player: PlayerId,
        needed: Money,
        available: Money,
    },
    #[error("no proposition is open for voting")]
    NoOpenPropositions,
    #[error("unknown {0}")]
    UnknownAssignment(AssignmentId),
    #[error("unknown {0}")]
    UnknownCertification(CertificationId),
    #[error("unknown {0}")]
    UnknownProposition(PropositionId),
    #[error("{0} is already decided")]
    PropositionClosed(PropositionId),
    #[error("assignment already carries a commitment")]
    AlreadyCommitted,
    #[error("nothing committed for this assignment")]
    NotCommitted,
    #[error("reveal does not match the commitment; {forfeited} forfeited")]
    DigestMismatch { forfeited: Money },
    #[error("position not allowed here")]
    InvalidPosition,
    #[error("{0} has not accumulated the decision stake")]
    NotDecidable(PropositionId),
}

impl ProtocolError {
    /// Stable short name of the variant, for tallies.
    pub fn kind(&self) -> &'static str {
        match self {
            ProtocolError::ListFull => "list-full",
            ProtocolError::NonPositiveBounty => "non-positive-bounty",
            ProtocolError::UndecidableDisabled => "undecidable-disabled",
            ProtocolError::NonPositiveStake => "non-positive-stake",
            ProtocolError::StakeTooLarge { .. } => "stake-too-large",
            ProtocolError::StakeTooSmall { .. } => "stake-too-small",
            ProtocolError::InsufficientBalance { .. } => "insufficient-balance",
            ProtocolError::NoOpenPropositions => "no-open-propositions",
            ProtocolError::UnknownAssignment(_) => "unknown-assignment",
            ProtocolError::UnknownCertification(_) => "unknown-certification",
            ProtocolError::UnknownProposition(_) => "unknown-proposition",
            ProtocolError::PropositionClosed(_) => "proposition-closed",
            ProtocolError::AlreadyCommitted => "already-committed",
            ProtocolError::NotCommitted => "not-committed",
            ProtocolError::DigestMismatch { .. } => "digest-mismatch",
            ProtocolError::InvalidPosition => "invalid-position",
            ProtocolError::NotDecidable(_) => "not-decidable",
        }
    }
}
