use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::scenario::{BountyDistribution, ScenarioConfig};
use crate::agents::{
    honest_certify, pool_aware_certify, Agent, CertCandidate, CertifierStrategy, VoterStrategy,
};
use crate::config::ConfigError;
use crate::protocol::{
    commitment_digest, AssignmentId, Event, Game, GameResult, Money, Nonce, Outcome, PlayerId,
    Position, PropositionId, ProtocolError, RewardPools, SignedMoney, TruthValue,
};
use crate::seed::{self, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolPoint {
    pub round: u64,
    /// Propositions decided up to and including this round.
    pub decided: u64,
    pub r_true: Money,
    pub r_false: Money,
}

/// Compact record of one settlement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecidedSummary {
    pub round: u64,
    pub proposition: PropositionId,
    pub truth: TruthValue,
    pub voting: Outcome,
    pub certification: Outcome,
    pub game: Outcome,
    pub pool_drain: Money,
    pub pool_transfer: Money,
    pub certifier_payout: Money,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerPayoff {
    pub player: PlayerId,
    pub cohort: usize,
    /// Sum of settled rewards minus penalties.
    pub net: SignedMoney,
    pub votes: u64,
    pub certifications: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortPayoff {
    pub name: String,
    pub players: u32,
    pub net: SignedMoney,
}

/// Outcome of one trial. Serializes identically for identical (config, seed).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub seed: u64,
    pub rounds: u64,
    pub decided: u64,
    /// Definite voting outcomes contradicting a definite truth.
    pub manipulated: u64,
    pub unknown_voting: u64,
    /// Decided propositions by certification outcome.
    pub certified_true: u64,
    pub certified_false: u64,
    /// Pool drains by voting direction.
    pub drained_true: Money,
    pub drained_false: Money,
    pub certifications: u64,
    /// Certifications placed while the certifier believed `Unknown`.
    pub certifications_on_unknown_belief: u64,
    pub players: Vec<PlayerPayoff>,
    pub cohorts: Vec<CohortPayoff>,
    pub decisions: Vec<DecidedSummary>,
    pub pools: Vec<PoolPoint>,
    pub final_pools: RewardPools,
    pub errors: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub results: Option<Vec<GameResult>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<Vec<Event>>,
}

impl TrialStats {
    pub fn cohort(&self, name: &str) -> Option<&CohortPayoff> {
        self.cohorts.iter().find(|c| c.name == name)
    }
}

struct Sealed {
    agent: usize,
    assignment: AssignmentId,
    position: Position,
    nonce: Nonce,
}

/// One trial in progress.
pub struct Simulation<'a> {
    config: &'a ScenarioConfig,
    seed: u64,
    game: Game,
    agents: Vec<Agent>,
    cohort_of: Vec<usize>,
    /// Agents holding a cached belief about each open proposition.
    believers: HashMap<PropositionId, Vec<usize>>,
    round: u64,
    stats: TrialStats,
}

impl<'a> Simulation<'a> {
    pub fn new(config: &'a ScenarioConfig, seed: u64) -> Result<Self, ConfigError> {
        config.validate()?;
        let mut game = if config.run.record_events {
            Game::with_event_log(config.params.clone())
        } else {
            Game::new(config.params.clone())
        }
        .map_err(|e| ConfigError::Invalid(format!("params: {e}")))?;

        let mut agents = Vec::with_capacity(config.player_count());
        let mut cohort_of = Vec::with_capacity(config.player_count());
        for (c, cohort) in config.cohorts.iter().enumerate() {
            for _ in 0..cohort.count {
                let id = PlayerId(agents.len() as u32);
                game.fund(id, cohort.balance);
                agents.push(Agent::new(cohort.profile(id), seed));
                cohort_of.push(c);
            }
        }
        if config.pools.total() > 0 {
            game.seed_pools(config.pools);
        }
        let players = agents
            .iter()
            .zip(&cohort_of)
            .map(|(a, &cohort)| PlayerPayoff {
                player: a.id(),
                cohort,
                net: 0,
                votes: 0,
                certifications: 0,
            })
            .collect();
        let mut sim = Self {
            config,
            seed,
            game,
            agents,
            cohort_of,
            believers: HashMap::new(),
            round: 0,
            stats: TrialStats {
                seed,
                players,
                ..TrialStats::default()
            },
        };
        let mut rng = seed::stream(seed, "genesis", &[]);
        sim.fill_list(&mut rng);
        Ok(sim)
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn stats(&self) -> &TrialStats {
        &self.stats
    }

    fn tally(&mut self, error: &ProtocolError) {
        *self
            .stats
            .errors
            .entry(error.kind().to_string())
            .or_insert(0) += 1;
    }

    fn draw_truth(&self, rng: &mut StreamRng) -> TruthValue {
        let stream = &self.config.stream;
        if stream.undecidable_fraction > 0.0 && rng.random::<f64>() < stream.undecidable_fraction {
            return TruthValue::Undecidable;
        }
        TruthValue::from_bool(rng.random::<f64>() < stream.p_true)
    }

    fn draw_bounty(&self, rng: &mut StreamRng) -> Money {
        match self.config.stream.bounty {
            BountyDistribution::Fixed { amount } => amount,
            BountyDistribution::Uniform { min, max } => rng.random_range(min..=max),
        }
    }

    fn fill_list(&mut self, rng: &mut StreamRng) {
        while self.game.open_count() < self.config.params.list_size {
            let truth = self.draw_truth(rng);
            let bounty = self.draw_bounty(rng);
            if let Err(e) = self.game.submit_proposition(truth, bounty) {
                self.tally(&e);
                break;
            }
        }
    }

    fn belief(&mut self, agent: usize, proposition: PropositionId, truth: TruthValue) -> Position {
        let beliefs = &mut self.agents[agent].beliefs;
        if beliefs.cached(proposition).is_none() {
            self.believers.entry(proposition).or_default().push(agent);
        }
        beliefs.belief(proposition, truth)
    }

    fn takes_turn(&self, agent: usize, rng: &mut StreamRng) -> bool {
        let p = self.agents[agent].profile.participation;
        p >= 1.0 || rng.random::<f64>() < p
    }

    fn certification_phase(&mut self, rng: &mut StreamRng) {
        let mut turns: Vec<usize> = Vec::new();
        for (i, cohort) in self.cohort_of.iter().enumerate() {
            if self.agents[i].profile.certifier != CertifierStrategy::Abstain {
                let n = self.config.cohorts[*cohort].certifications_per_round;
                turns.extend(std::iter::repeat_n(i, n as usize));
            }
        }
        turns.shuffle(rng);
        let sigma_min = self.config.params.sigma_min;
        for i in turns {
            if !self.takes_turn(i, rng) {
                continue;
            }
            let open: Vec<(PropositionId, TruthValue, Money, Money)> = self
                .game
                .open_propositions()
                .map(|p| {
                    let t = p.totals();
                    (p.id, p.truth, t.sigma_tot_true, t.sigma_tot_false)
                })
                .collect();
            let candidates: Vec<CertCandidate> = open
                .into_iter()
                .map(
                    |(proposition, truth, sigma_true, sigma_false)| CertCandidate {
                        proposition,
                        belief: self.belief(i, proposition, truth),
                        sigma_true,
                        sigma_false,
                    },
                )
                .collect();
            let agent = &self.agents[i];
            let choice = match agent.profile.certifier {
                CertifierStrategy::Abstain => None,
                CertifierStrategy::Honest => honest_certify(&candidates, sigma_min, rng),
                CertifierStrategy::PoolAware => pool_aware_certify(
                    agent.profile.accuracy,
                    &candidates,
                    &self.game.pools(),
                    self.game.params(),
                ),
            };
            let Some(choice) = choice else { continue };
            let player = agent.id();
            if agent.beliefs.cached(choice.proposition) == Some(Outcome::Unknown) {
                self.stats.certifications_on_unknown_belief += 1;
            }
            let nonce = Nonce::random(rng);
            let digest = commitment_digest(choice.position, &nonce);
            let id = match self.game.commit_certification(
                player,
                choice.proposition,
                choice.stake,
                digest,
            ) {
                Ok(id) => id,
                Err(e) => {
                    self.tally(&e);
                    continue;
                }
            };
            match self.game.reveal_certification(id, choice.position, nonce) {
                Ok(()) => {
                    self.stats.certifications += 1;
                    self.stats.players[i].certifications += 1;
                }
                Err(e) => self.tally(&e),
            }
        }
    }

    fn voting_phase(&mut self, rng: &mut StreamRng) {
        let mut turns: Vec<usize> = Vec::new();
        for (i, agent) in self.agents.iter().enumerate() {
            if agent.profile.voter != VoterStrategy::Abstain {
                turns.extend(std::iter::repeat_n(
                    i,
                    agent.profile.votes_per_round as usize,
                ));
            }
        }
        turns.shuffle(rng);
        let s_max = self.config.params.s_max;
        let mut sealed = Vec::new();
        let mut requested = Vec::new();
        for i in turns {
            if !self.takes_turn(i, rng) {
                continue;
            }
            let stake = self.agents[i].profile.vote_stake.unwrap_or(s_max);
            if !self.agents[i].will_vote(stake) {
                continue;
            }
            let player = self.agents[i].id();
            let (assignment, proposition) = match self.game.request_vote(player, stake, rng) {
                Ok(drawn) => drawn,
                Err(e) => {
                    self.tally(&e);
                    continue;
                }
            };
            requested.push(assignment);
            let truth = self
                .game
                .proposition(proposition)
                .expect("just drawn")
                .truth;
            self.belief(i, proposition, truth);
            let position = match self.agents[i].vote(proposition, truth, stake, rng) {
                Ok(p) => p,
                Err(_) => {
                    *self
                        .stats
                        .errors
                        .entry("budget-exhausted".into())
                        .or_insert(0) += 1;
                    continue;
                }
            };
            let nonce = Nonce::random(rng);
            match self
                .game
                .commit_vote(assignment, commitment_digest(position, &nonce))
            {
                Ok(()) => sealed.push(Sealed {
                    agent: i,
                    assignment,
                    position,
                    nonce,
                }),
                Err(e) => self.tally(&e),
            }
        }
        for s in sealed {
            match self.game.reveal_vote(s.assignment, s.position, s.nonce) {
                Ok(()) => self.stats.players[s.agent].votes += 1,
                Err(e) => self.tally(&e),
            }
        }
        // Reveal deadline: anything still open at the end of the round is forfeited.
        for assignment in requested {
            if self.game.assignment(assignment).is_some() {
                self.game
                    .expire_vote(assignment)
                    .expect("assignment is open");
                *self.stats.errors.entry("expired".into()).or_insert(0) += 1;
            }
        }
    }

    fn settlement_phase(&mut self) {
        for result in self.game.settle_decidable() {
            let stats = &mut self.stats;
            stats.decided += 1;
            if result.is_manipulated() {
                stats.manipulated += 1;
            }
            match result.voting {
                Outcome::True => stats.drained_true += result.pool_drain,
                Outcome::False => stats.drained_false += result.pool_drain,
                Outcome::Unknown => stats.unknown_voting += 1,
            }
            match result.certification {
                Outcome::True => stats.certified_true += 1,
                Outcome::False => stats.certified_false += 1,
                Outcome::Unknown => {}
            }
            for (player, delta) in &result.deltas {
                stats.players[player.0 as usize].net += delta.total();
            }
            stats.decisions.push(DecidedSummary {
                round: self.round,
                proposition: result.proposition,
                truth: result.truth,
                voting: result.voting,
                certification: result.certification,
                game: result.game,
                pool_drain: result.pool_drain,
                pool_transfer: result.pool_transfer,
                certifier_payout: result.certifier_payout,
            });
            if let Some(holders) = self.believers.remove(&result.proposition) {
                for a in holders {
                    self.agents[a].beliefs.forget(result.proposition);
                }
            }
            if self.config.run.record_results {
                stats.results.get_or_insert_with(Vec::new).push(result);
            }
        }
    }

    /// One synchronous round: certify, vote, settle, replenish.
    pub fn run_round(&mut self) {
        let mut rng = seed::stream(self.seed, "round", &[self.round]);
        self.certification_phase(&mut rng);
        self.voting_phase(&mut rng);
        self.settlement_phase();
        if self.config.run.replenish {
            self.fill_list(&mut rng);
        }
        if let Err((held, deposited)) = self.game.check_conservation() {
            panic!(
                "round {}: game holds {held} but {deposited} was deposited",
                self.round
            );
        }
        let pools = self.game.pools();
        self.stats.pools.push(PoolPoint {
            round: self.round,
            decided: self.stats.decided,
            r_true: pools.r_true,
            r_false: pools.r_false,
        });
        self.round += 1;
        self.stats.rounds = self.round;
    }

    fn done(&self) -> bool {
        let run = &self.config.run;
        self.round >= run.rounds
            || run.max_decided.is_some_and(|m| self.stats.decided >= m)
            || self.game.open_count() == 0
    }

    pub fn finish(mut self) -> TrialStats {
        self.stats.final_pools = self.game.pools();
        self.stats.cohorts = self
            .config
            .cohorts
            .iter()
            .enumerate()
            .map(|(c, cohort)| CohortPayoff {
                name: cohort.name.clone(),
                players: cohort.count,
                net: self
                    .stats
                    .players
                    .iter()
                    .filter(|p| p.cohort == c)
                    .map(|p| p.net)
                    .sum(),
            })
            .collect();
        self.stats.events = self.game.take_events();
        self.stats
    }

    pub fn run(mut self) -> TrialStats {
        while !self.done() {
            self.run_round();
        }
        self.finish()
    }
}

/// Runs one trial to completion.
pub fn run_trial(config: &ScenarioConfig, seed: u64) -> Result<TrialStats, ConfigError> {
    Ok(Simulation::new(config, seed)?.run())
}
