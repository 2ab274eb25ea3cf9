//! The game state machine.
//!
//! A `Game` owns the proposition list, every escrowed stake and the reward
//! pools. All money it holds is tracked by the [`Ledger`]; the sum
//! `balances + escrow + pools + sink + bounties` always equals the money
//! deposited from outside, and `settle` asserts it.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::commitment::{Commitment, Digest, Nonce, Role};
use super::error::{ParamError, ProtocolError};
use super::events::Event;
use super::outcome::{
    certification_outcome, game_outcome, oracle_confidence, oracle_outcome, voting_outcome,
};
use super::types::{
    AssignmentId, CertStake, CertificationId, GameResult, Ledger, Money, Outcome, PlayerDelta,
    PlayerId, Position, Proposition, PropositionId, PropositionStatus, RewardPools, SignedMoney,
    SystemParams, Totals, TruthValue,
};

/// A staked voting opportunity: stake escrowed, proposition drawn, maybe committed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteSlot {
    pub player: PlayerId,
    pub proposition: PropositionId,
    pub stake: Money,
    pub digest: Option<Digest>,
}

#[derive(Debug, Clone, Default)]
struct Outstanding {
    votes: Vec<AssignmentId>,
    certifications: Vec<CertificationId>,
}

#[derive(Debug, Clone)]
pub struct Game {
    params: SystemParams,
    ledger: Ledger,
    propositions: BTreeMap<PropositionId, Proposition>,
    /// Open propositions in submission order.
    open: Vec<PropositionId>,
    /// Open propositions that still accept vote assignments, with their slots.
    drawable: Vec<PropositionId>,
    drawable_index: HashMap<PropositionId, usize>,
    votes: BTreeMap<AssignmentId, VoteSlot>,
    certifications: BTreeMap<CertificationId, Commitment>,
    outstanding: BTreeMap<PropositionId, Outstanding>,
    sink_carry: Money,
    /// Running sum of `ledger.balances`, so settlement can check conservation cheaply.
    balances_total: u128,
    next_proposition: u64,
    next_assignment: u64,
    next_certification: u64,
    log: Option<Vec<Event>>,
}

fn share(part: Money, whole: Money, amount: Money) -> Money {
    if whole == 0 {
        return 0;
    }
    (part as u128 * amount as u128 / whole as u128) as Money
}

fn signed(reward: Money, penalty: Money) -> SignedMoney {
    reward as SignedMoney - penalty as SignedMoney
}

impl Game {
    pub fn new(params: SystemParams) -> Result<Self, ParamError> {
        params.validate()?;
        Ok(Self {
            params,
            ledger: Ledger::default(),
            propositions: BTreeMap::new(),
            open: Vec::new(),
            drawable: Vec::new(),
            drawable_index: HashMap::new(),
            votes: BTreeMap::new(),
            certifications: BTreeMap::new(),
            outstanding: BTreeMap::new(),
            sink_carry: 0,
            balances_total: 0,
            next_proposition: 0,
            next_assignment: 0,
            next_certification: 0,
            log: None,
        })
    }

    /// Same as [`Game::new`] but records every state change as an [`Event`].
    pub fn with_event_log(params: SystemParams) -> Result<Self, ParamError> {
        let mut game = Self::new(params)?;
        game.log = Some(vec![Event::Genesis {
            params: game.params.clone(),
        }]);
        Ok(game)
    }

    /// Brings the drawable index in line with the proposition's current stake.
    fn refresh_drawable(&mut self, id: PropositionId) {
        let accepts = self
            .propositions
            .get(&id)
            .is_some_and(|p| p.accepts_votes(&self.params));
        match (accepts, self.drawable_index.get(&id).copied()) {
            (true, None) => {
                self.drawable_index.insert(id, self.drawable.len());
                self.drawable.push(id);
            }
            (false, Some(slot)) => {
                self.drawable.swap_remove(slot);
                self.drawable_index.remove(&id);
                if let Some(&moved) = self.drawable.get(slot) {
                    self.drawable_index.insert(moved, slot);
                }
            }
            _ => {}
        }
    }

    fn record(&mut self, event: Event) {
        if let Some(log) = self.log.as_mut() {
            log.push(event);
        }
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn pools(&self) -> RewardPools {
        self.ledger.pools
    }

    pub fn balance(&self, player: PlayerId) -> Money {
        self.ledger.balance(player)
    }

    pub fn events(&self) -> Option<&[Event]> {
        self.log.as_deref()
    }

    pub fn take_events(&mut self) -> Option<Vec<Event>> {
        self.log.as_mut().map(std::mem::take)
    }

    pub fn proposition(&self, id: PropositionId) -> Option<&Proposition> {
        self.propositions.get(&id)
    }

    /// Open propositions in submission order.
    pub fn open_propositions(&self) -> impl Iterator<Item = &Proposition> + '_ {
        self.open.iter().map(move |id| &self.propositions[id])
    }

    pub fn open_count(&self) -> usize {
        self.open.len()
    }

    pub fn assignment(&self, id: AssignmentId) -> Option<&VoteSlot> {
        self.votes.get(&id)
    }

    pub fn certification(&self, id: CertificationId) -> Option<&Commitment> {
        self.certifications.get(&id)
    }

    /// Credits a player with money from outside the game.
    pub fn fund(&mut self, player: PlayerId, amount: Money) {
        *self.ledger.balances.entry(player).or_insert(0) += amount;
        self.balances_total += amount as u128;
        self.ledger.deposited += amount;
        self.record(Event::Fund { player, amount });
    }

    /// Adds money from outside the game to the reward pools.
    pub fn seed_pools(&mut self, pools: RewardPools) {
        self.ledger.pools.r_true += pools.r_true;
        self.ledger.pools.r_false += pools.r_false;
        self.ledger.deposited += pools.total();
        self.record(Event::SeedPools {
            r_true: pools.r_true,
            r_false: pools.r_false,
        });
    }

    fn held(&self) -> u128 {
        let ledger = &self.ledger;
        self.balances_total
            + ledger.escrow as u128
            + ledger.pools.total() as u128
            + ledger.sink as u128
            + ledger.bounties as u128
    }

    /// Checks that no money has been created or destroyed.
    pub fn check_conservation(&self) -> Result<(), (u128, u128)> {
        let held = self.ledger.total();
        let deposited = self.ledger.deposited as u128;
        if held == deposited && self.held() == deposited {
            Ok(())
        } else {
            Err((held, deposited))
        }
    }

    pub fn submit_proposition(
        &mut self,
        truth: TruthValue,
        bounty: Money,
    ) -> Result<PropositionId, ProtocolError> {
        if self.open.len() >= self.params.list_size {
            return Err(ProtocolError::ListFull);
        }
        if bounty == 0 {
            return Err(ProtocolError::NonPositiveBounty);
        }
        if truth == TruthValue::Undecidable && !self.params.tri_state {
            return Err(ProtocolError::UndecidableDisabled);
        }
        let id = PropositionId(self.next_proposition);
        self.next_proposition += 1;
        self.propositions
            .insert(id, Proposition::new(id, truth, bounty));
        self.open.push(id);
        self.refresh_drawable(id);
        self.ledger.bounties += bounty;
        self.ledger.deposited += bounty;
        self.record(Event::Submit {
            proposition: id,
            truth,
            bounty,
        });
        Ok(id)
    }

    fn debit(&mut self, player: PlayerId, amount: Money) -> Result<(), ProtocolError> {
        let available = self.ledger.balance(player);
        if available < amount {
            return Err(ProtocolError::InsufficientBalance {
                player,
                needed: amount,
                available,
            });
        }
        *self
            .ledger
            .balances
            .get_mut(&player)
            .expect("positive balance") -= amount;
        self.balances_total -= amount as u128;
        self.ledger.escrow += amount;
        Ok(())
    }

    fn credit(&mut self, player: PlayerId, amount: Money) {
        *self.ledger.balances.entry(player).or_insert(0) += amount;
        self.balances_total += amount as u128;
    }

    fn check_vote_stake(&self, player: PlayerId, stake: Money) -> Result<(), ProtocolError> {
        if stake == 0 {
            return Err(ProtocolError::NonPositiveStake);
        }
        if stake > self.params.s_max {
            return Err(ProtocolError::StakeTooLarge {
                stake,
                s_max: self.params.s_max,
            });
        }
        let available = self.ledger.balance(player);
        if available < stake {
            return Err(ProtocolError::InsufficientBalance {
                player,
                needed: stake,
                available,
            });
        }
        Ok(())
    }

    /// Escrows `stake` and draws a proposition uniformly among those open for voting.
    ///
    /// A proposition whose revealed plus pending voting stake already reaches
    /// the decision stake is not drawn again before it settles.
    pub fn request_vote<R: Rng + ?Sized>(
        &mut self,
        player: PlayerId,
        stake: Money,
        rng: &mut R,
    ) -> Result<(AssignmentId, PropositionId), ProtocolError> {
        self.check_vote_stake(player, stake)?;
        if self.drawable.is_empty() {
            return Err(ProtocolError::NoOpenPropositions);
        }
        let drawn = self.drawable[rng.random_range(0..self.drawable.len())];
        let assignment = self.assign_vote(player, stake, drawn)?;
        Ok((assignment, drawn))
    }

    /// Binds a vote stake to a given proposition. Used by `request_vote` after
    /// the draw, and by replay.
    pub(crate) fn assign_vote(
        &mut self,
        player: PlayerId,
        stake: Money,
        proposition: PropositionId,
    ) -> Result<AssignmentId, ProtocolError> {
        self.check_vote_stake(player, stake)?;
        self.open_proposition(proposition)?;
        self.debit(player, stake)?;
        let id = AssignmentId(self.next_assignment);
        self.next_assignment += 1;
        self.votes.insert(
            id,
            VoteSlot {
                player,
                proposition,
                stake,
                digest: None,
            },
        );
        self.propositions
            .get_mut(&proposition)
            .expect("open proposition")
            .pending_vote_stake += stake;
        self.refresh_drawable(proposition);
        self.outstanding
            .entry(proposition)
            .or_default()
            .votes
            .push(id);
        self.record(Event::VoteRequest {
            assignment: id,
            player,
            proposition,
            stake,
        });
        Ok(id)
    }

    fn open_proposition(&self, id: PropositionId) -> Result<&Proposition, ProtocolError> {
        let prop = self
            .propositions
            .get(&id)
            .ok_or(ProtocolError::UnknownProposition(id))?;
        if prop.status != PropositionStatus::Open {
            return Err(ProtocolError::PropositionClosed(id));
        }
        Ok(prop)
    }

    pub fn commit_vote(
        &mut self,
        assignment: AssignmentId,
        digest: Digest,
    ) -> Result<(), ProtocolError> {
        let slot = self
            .votes
            .get_mut(&assignment)
            .ok_or(ProtocolError::UnknownAssignment(assignment))?;
        if slot.digest.is_some() {
            return Err(ProtocolError::AlreadyCommitted);
        }
        slot.digest = Some(digest);
        self.record(Event::VoteCommit { assignment, digest });
        Ok(())
    }

    fn position_allowed(&self, value: Position, role: Role) -> bool {
        match (value, role) {
            (Outcome::Unknown, Role::Certify) => false,
            (Outcome::Unknown, Role::Vote) => self.params.tri_state,
            _ => true,
        }
    }

    /// Opens a sealed vote. On a digest mismatch the stake is forfeited and
    /// the assignment is consumed.
    pub fn reveal_vote(
        &mut self,
        assignment: AssignmentId,
        value: Position,
        nonce: Nonce,
    ) -> Result<(), ProtocolError> {
        let slot = self
            .votes
            .get(&assignment)
            .ok_or(ProtocolError::UnknownAssignment(assignment))?;
        let digest = slot.digest.ok_or(ProtocolError::NotCommitted)?;
        if !self.position_allowed(value, Role::Vote) {
            return Err(ProtocolError::InvalidPosition);
        }
        let slot = self.votes.remove(&assignment).expect("checked above");
        let prop = self
            .propositions
            .get_mut(&slot.proposition)
            .expect("assignments only exist for open propositions");
        prop.pending_vote_stake -= slot.stake;
        let accepted = super::commitment::commitment_digest(value, &nonce) == digest;
        if accepted {
            prop.vote_stakes
                .entry(slot.player)
                .or_default()
                .add(value, slot.stake);
        } else {
            prop.forfeited += slot.stake;
            self.ledger.escrow -= slot.stake;
            self.ledger.sink += slot.stake;
        }
        if let Some(out) = self.outstanding.get_mut(&slot.proposition) {
            out.votes.retain(|&a| a != assignment);
        }
        self.refresh_drawable(slot.proposition);
        self.record(Event::VoteReveal {
            assignment,
            value,
            nonce,
            accepted,
        });
        if accepted {
            Ok(())
        } else {
            Err(ProtocolError::DigestMismatch {
                forfeited: slot.stake,
            })
        }
    }

    /// Closes an assignment that missed its reveal deadline, committed or
    /// not. Its stake is forfeited and the proposition can be drawn again.
    pub fn expire_vote(&mut self, assignment: AssignmentId) -> Result<Money, ProtocolError> {
        let slot = self
            .votes
            .remove(&assignment)
            .ok_or(ProtocolError::UnknownAssignment(assignment))?;
        let prop = self
            .propositions
            .get_mut(&slot.proposition)
            .expect("assignments only exist for open propositions");
        prop.pending_vote_stake -= slot.stake;
        prop.forfeited += slot.stake;
        self.ledger.escrow -= slot.stake;
        self.ledger.sink += slot.stake;
        if let Some(out) = self.outstanding.get_mut(&slot.proposition) {
            out.votes.retain(|&a| a != assignment);
        }
        self.refresh_drawable(slot.proposition);
        self.record(Event::VoteExpire { assignment });
        Ok(slot.stake)
    }

    pub fn commit_certification(
        &mut self,
        player: PlayerId,
        proposition: PropositionId,
        stake: Money,
        digest: Digest,
    ) -> Result<CertificationId, ProtocolError> {
        if stake < self.params.sigma_min {
            return Err(ProtocolError::StakeTooSmall {
                stake,
                sigma_min: self.params.sigma_min,
            });
        }
        self.open_proposition(proposition)?;
        self.debit(player, stake)?;
        let id = CertificationId(self.next_certification);
        self.next_certification += 1;
        self.certifications.insert(
            id,
            Commitment {
                player,
                target: proposition,
                role: Role::Certify,
                stake,
                digest,
                revealed: None,
            },
        );
        self.outstanding
            .entry(proposition)
            .or_default()
            .certifications
            .push(id);
        self.record(Event::CertCommit {
            certification: id,
            player,
            proposition,
            stake,
            digest,
        });
        Ok(id)
    }

    /// Opens a sealed certification. `Unknown` is never a valid certification.
    pub fn reveal_certification(
        &mut self,
        certification: CertificationId,
        value: Position,
        nonce: Nonce,
    ) -> Result<(), ProtocolError> {
        let commitment = self
            .certifications
            .get(&certification)
            .ok_or(ProtocolError::UnknownCertification(certification))?;
        if !self.position_allowed(value, Role::Certify) {
            return Err(ProtocolError::InvalidPosition);
        }
        let accepted = commitment.opens_with(value, &nonce);
        let commitment = self
            .certifications
            .remove(&certification)
            .expect("checked above");
        let prop = self
            .propositions
            .get_mut(&commitment.target)
            .expect("certifications only exist for open propositions");
        if accepted {
            let entry: &mut CertStake = prop.cert_stakes.entry(commitment.player).or_default();
            match value {
                Outcome::True => entry.on_true += commitment.stake,
                Outcome::False => entry.on_false += commitment.stake,
                Outcome::Unknown => unreachable!("rejected above"),
            }
        } else {
            prop.forfeited += commitment.stake;
            self.ledger.escrow -= commitment.stake;
            self.ledger.sink += commitment.stake;
        }
        if let Some(out) = self.outstanding.get_mut(&commitment.target) {
            out.certifications.retain(|&c| c != certification);
        }
        self.record(Event::CertReveal {
            certification,
            value,
            nonce,
            accepted,
        });
        if accepted {
            Ok(())
        } else {
            Err(ProtocolError::DigestMismatch {
                forfeited: commitment.stake,
            })
        }
    }

    pub fn compute_totals(&self, id: PropositionId) -> Result<Totals, ProtocolError> {
        self.propositions
            .get(&id)
            .map(Proposition::totals)
            .ok_or(ProtocolError::UnknownProposition(id))
    }

    /// True once revealed voting stake (all directions) reaches the decision stake.
    pub fn check_decision(&self, id: PropositionId) -> Result<bool, ProtocolError> {
        Ok(self.compute_totals(id)?.voting_stake() >= self.params.decision_stake)
    }

    /// Open propositions that have reached the decision stake.
    pub fn decidable(&self) -> Vec<PropositionId> {
        self.open
            .iter()
            .copied()
            .filter(|&id| self.check_decision(id).unwrap_or(false))
            .collect()
    }

    fn forfeit_outstanding(&mut self, id: PropositionId) {
        let Some(out) = self.outstanding.remove(&id) else {
            return;
        };
        let mut lost = 0;
        for a in out.votes {
            if let Some(slot) = self.votes.remove(&a) {
                lost += slot.stake;
                self.propositions
                    .get_mut(&id)
                    .expect("open proposition")
                    .pending_vote_stake -= slot.stake;
            }
        }
        for c in out.certifications {
            if let Some(commitment) = self.certifications.remove(&c) {
                lost += commitment.stake;
            }
        }
        self.ledger.escrow -= lost;
        self.ledger.sink += lost;
        self.propositions
            .get_mut(&id)
            .expect("open proposition")
            .forfeited += lost;
    }

    /// Decides a proposition and administers rewards, penalties and pool flows.
    ///
    /// Commitments still unrevealed on the proposition are forfeited first.
    /// Reward shares are rounded down; the remainders, penalties, forfeits
    /// and any unclaimed bounty are split evenly between the two pools, with
    /// an odd unit carried in the sink to the next settlement.
    pub fn settle(&mut self, id: PropositionId) -> Result<GameResult, ProtocolError> {
        self.open_proposition(id)?;
        if !self.check_decision(id)? {
            return Err(ProtocolError::NotDecidable(id));
        }
        let held_before = self.held();
        self.forfeit_outstanding(id);

        let mut prop = self.propositions.remove(&id).expect("checked open");
        prop.status = PropositionStatus::Decided;
        self.open.retain(|&o| o != id);
        self.refresh_drawable(id);

        let threshold = self.params.majority_threshold;
        let totals = prop.totals();
        let voting = voting_outcome(&totals, threshold);
        let certification = certification_outcome(&totals, threshold);
        let game = game_outcome(voting, certification);
        let oracle = oracle_outcome(voting, certification);

        let mut deltas: BTreeMap<PlayerId, PlayerDelta> = BTreeMap::new();
        let mut residue: Money = 0;

        // Voters.
        self.ledger.bounties -= prop.bounty;
        let winning_votes = match game {
            Outcome::True => totals.s_tot_true,
            Outcome::False => totals.s_tot_false,
            Outcome::Unknown => 0,
        };
        let mut bounty_paid = 0;
        for (&player, stake) in &prop.vote_stakes {
            let (reward, penalty) = match game {
                Outcome::True => (
                    share(stake.on_true, winning_votes, prop.bounty),
                    stake.on_false,
                ),
                Outcome::False => (
                    share(stake.on_false, winning_votes, prop.bounty),
                    stake.on_true,
                ),
                Outcome::Unknown => (0, 0),
            };
            self.ledger.escrow -= stake.total();
            self.credit(player, stake.total() - penalty + reward);
            bounty_paid += reward;
            residue += penalty;
            deltas.entry(player).or_default().vote = signed(reward, penalty);
        }
        residue += prop.bounty - bounty_paid;

        // Pool drain on a definite voting outcome.
        let mut pool_drain = 0;
        let mut pool_transfer = 0;
        let mut payout_budget = 0;
        if voting.is_definite() {
            let pool = self.ledger.pools.get_mut(voting);
            pool_drain = *pool / self.params.tau;
            *pool -= pool_drain;
            if certification == voting {
                payout_budget = pool_drain;
            } else {
                *self.ledger.pools.get_mut(voting.negate()) += pool_drain;
                pool_transfer = pool_drain;
            }
        }

        // Certifiers.
        let winning_certs = match game {
            Outcome::True => totals.sigma_tot_true,
            Outcome::False => totals.sigma_tot_false,
            Outcome::Unknown => 0,
        };
        let mut certifier_payout = 0;
        for (&player, stake) in &prop.cert_stakes {
            let (reward, penalty) = match game {
                Outcome::True => (
                    share(stake.on_true, winning_certs, payout_budget),
                    stake.on_false,
                ),
                Outcome::False => (
                    share(stake.on_false, winning_certs, payout_budget),
                    stake.on_true,
                ),
                Outcome::Unknown => (0, stake.total()),
            };
            self.ledger.escrow -= stake.total();
            self.credit(player, stake.total() - penalty + reward);
            certifier_payout += reward;
            residue += penalty;
            deltas.entry(player).or_default().certify = signed(reward, penalty);
        }
        residue += payout_budget - certifier_payout;

        // Route residue, this proposition's forfeits and the carried odd unit.
        self.ledger.sink += residue;
        let routable = residue + prop.forfeited + self.sink_carry;
        let half = routable / 2;
        self.ledger.pools.r_true += half;
        self.ledger.pools.r_false += half;
        let carry = routable - 2 * half;
        self.ledger.sink -= routable - carry;
        self.sink_carry = carry;

        let held_after = self.held();
        assert_eq!(
            held_before, held_after,
            "settling {id} changed the money held by the game"
        );

        let result = GameResult {
            proposition: id,
            truth: prop.truth,
            bounty: prop.bounty,
            totals,
            voting,
            certification,
            game,
            oracle,
            confidence: oracle_confidence(&totals),
            deltas,
            pool_drain,
            pool_transfer,
            certifier_payout,
            routed_to_pools: routable - carry,
            forfeited: prop.forfeited,
            pools_after: self.ledger.pools,
        };
        self.record(Event::Settle {
            proposition: id,
            voting,
            certification,
            game,
            oracle,
            pool_drain,
            pool_transfer,
            r_true: self.ledger.pools.r_true,
            r_false: self.ledger.pools.r_false,
        });
        Ok(result)
    }

    /// Settles every open proposition that has reached the decision stake, in list order.
    pub fn settle_decidable(&mut self) -> Vec<GameResult> {
        self.decidable()
            .into_iter()
            .map(|id| self.settle(id).expect("decidable proposition settles"))
            .collect()
    }
}
