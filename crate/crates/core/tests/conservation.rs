//! Randomized rounds against the money-conservation invariant.

use std::sync::atomic::{AtomicU64, Ordering};

use oracle_game::protocol::{
    commitment_digest, Game, GameResult, Money, Nonce, Outcome, PlayerId, ProtocolError,
    RewardPools, SystemParams, TruthValue,
};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ROUNDS_PER_CASE: u64 = 20;
const CASES: u32 = 64;
const PLAYERS: u32 = 12;

static ROUNDS: AtomicU64 = AtomicU64::new(0);
static SETTLED: AtomicU64 = AtomicU64::new(0);

#[derive(Debug, Clone, Copy)]
enum Reveal {
    Honest,
    WrongNonce,
    WrongValue,
    Missing,
}

fn pick_reveal(rng: &mut ChaCha8Rng) -> Reveal {
    match rng.random_range(0..20) {
        0..=13 => Reveal::Honest,
        14 | 15 => Reveal::WrongNonce,
        16 | 17 => Reveal::WrongValue,
        _ => Reveal::Missing,
    }
}

fn position(rng: &mut ChaCha8Rng, tri_state: bool) -> Outcome {
    let options: &[Outcome] = if tri_state {
        &Outcome::ALL
    } else {
        &[Outcome::True, Outcome::False]
    };
    *options.choose(rng).unwrap()
}

fn other(value: Outcome) -> Outcome {
    match value {
        Outcome::True => Outcome::False,
        _ => Outcome::True,
    }
}

fn flip_nonce(mut nonce: Nonce) -> Nonce {
    nonce.0[0] ^= 1;
    nonce
}

/// Checks one settlement against the public ledger alone:
/// deltas + pool change + sink change = bounty + stake forfeited from escrow.
fn check_settlement(before: &Game, after: &Game, result: &GameResult) {
    let (b, a) = (before.ledger(), after.ledger());
    let deltas: i128 = result.deltas.values().map(|d| d.total() as i128).sum();
    let pools = a.pools.total() as i128 - b.pools.total() as i128;
    let sink = a.sink as i128 - b.sink as i128;
    let revealed = (result.totals.voting_stake() + result.totals.certification_stake()) as i128;
    let unrevealed = b.escrow as i128 - a.escrow as i128 - revealed;
    assert!(unrevealed >= 0);
    assert_eq!(deltas + pools + sink, result.bounty as i128 + unrevealed);
    assert_eq!(b.bounties - a.bounties, result.bounty);
    let positive: i128 = result
        .deltas
        .values()
        .flat_map(|d| [d.vote, d.certify])
        .filter(|&v| v > 0)
        .map(|v| v as i128)
        .sum();
    // Rewards come only from the bounty and the drain paid to certifiers.
    assert!(positive <= (result.bounty + result.certifier_payout) as i128);
    assert!(result.pool_transfer <= result.pool_drain);
    assert!(result.certifier_payout <= result.pool_drain);
}

fn run_case(
    seed: u64,
    s_max: Money,
    votes_to_decide: u64,
    tau: u64,
    tri_state: bool,
    super_majority: bool,
) {
    let params = SystemParams {
        s_max,
        sigma_min: 3 * s_max,
        decision_stake: votes_to_decide * s_max,
        list_size: 6,
        tau,
        majority_threshold: if super_majority { 0.6 } else { 0.5 },
        tri_state,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut game = Game::new(params.clone()).unwrap();
    game.seed_pools(RewardPools {
        r_true: rng.random_range(0..500),
        r_false: rng.random_range(0..500),
    });
    for p in 0..PLAYERS {
        game.fund(PlayerId(p), rng.random_range(0..40 * s_max));
    }
    for _ in 0..ROUNDS_PER_CASE {
        while game.open_count() < params.list_size {
            let truth = match rng.random_range(0..10) {
                0 if tri_state => TruthValue::Undecidable,
                0..=5 => TruthValue::True,
                _ => TruthValue::False,
            };
            game.submit_proposition(truth, rng.random_range(1..60))
                .unwrap();
        }
        if rng.random_bool(0.2) {
            game.fund(
                PlayerId(rng.random_range(0..PLAYERS)),
                rng.random_range(1..20 * s_max),
            );
        }

        // Certifications, revealed immediately or left sealed until settlement.
        for _ in 0..rng.random_range(0..4) {
            let open: Vec<_> = game.open_propositions().map(|p| p.id).collect();
            let target = *open.choose(&mut rng).unwrap();
            let player = PlayerId(rng.random_range(0..PLAYERS));
            let stake = rng.random_range(params.sigma_min - 1..=3 * params.sigma_min);
            let value = if rng.random_bool(0.1) {
                Outcome::Unknown
            } else {
                position(&mut rng, false)
            };
            let nonce = Nonce::random(&mut rng);
            let Ok(id) =
                game.commit_certification(player, target, stake, commitment_digest(value, &nonce))
            else {
                continue;
            };
            let result = match pick_reveal(&mut rng) {
                Reveal::Honest => Some(game.reveal_certification(id, value, nonce)),
                Reveal::WrongNonce => Some(game.reveal_certification(id, value, flip_nonce(nonce))),
                Reveal::WrongValue => Some(game.reveal_certification(id, other(value), nonce)),
                Reveal::Missing => None,
            };
            if let Some(result) = result {
                if value == Outcome::Unknown {
                    assert!(result.is_err());
                }
            }
            game.check_conservation().unwrap();
        }

        // Votes, all revealed (or not) after every request of the round.
        let mut sealed = Vec::new();
        for _ in 0..rng.random_range(0..3 * PLAYERS) {
            let player = PlayerId(rng.random_range(0..PLAYERS));
            let stake = rng.random_range(0..=s_max + 1);
            let Ok((assignment, _)) = game.request_vote(player, stake, &mut rng) else {
                continue;
            };
            if rng.random_bool(0.05) {
                sealed.push((assignment, Outcome::True, Nonce([0; 32]), Reveal::Missing));
                continue;
            }
            let value = if rng.random_bool(0.05) {
                Outcome::Unknown
            } else {
                position(&mut rng, tri_state)
            };
            let nonce = Nonce::random(&mut rng);
            game.commit_vote(assignment, commitment_digest(value, &nonce))
                .unwrap();
            sealed.push((assignment, value, nonce, pick_reveal(&mut rng)));
        }
        for (assignment, value, nonce, reveal) in sealed {
            let result = match reveal {
                Reveal::Honest => game.reveal_vote(assignment, value, nonce),
                Reveal::WrongNonce => game.reveal_vote(assignment, value, flip_nonce(nonce)),
                Reveal::WrongValue => game.reveal_vote(assignment, other(value), nonce),
                Reveal::Missing => Ok(()),
            };
            match result {
                Err(ProtocolError::DigestMismatch { .. }) => {}
                Err(ProtocolError::InvalidPosition) => assert!(!tri_state),
                Err(e) => panic!("unexpected reveal error {e}"),
                Ok(()) => {}
            }
            if game.assignment(assignment).is_some() {
                game.expire_vote(assignment).unwrap();
            }
            game.check_conservation().unwrap();
        }

        for id in game.decidable() {
            let before = game.clone();
            let result = game.settle(id).unwrap();
            check_settlement(&before, &game, &result);
            game.check_conservation().unwrap();
            SETTLED.fetch_add(1, Ordering::Relaxed);
        }
        ROUNDS.fetch_add(1, Ordering::Relaxed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: CASES,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn money_is_conserved_after_every_step(
        seed in any::<u64>(),
        s_max in 1u64..5,
        votes_to_decide in 1u64..8,
        tau in 1u64..20,
        tri_state in any::<bool>(),
        super_majority in any::<bool>(),
    ) {
        run_case(seed, s_max, votes_to_decide, tau, tri_state, super_majority);
    }
}

#[test]
fn at_least_a_thousand_rounds_are_exercised() {
    let before = ROUNDS.load(Ordering::Relaxed);
    let settled = SETTLED.load(Ordering::Relaxed);
    for seed in 0..CASES as u64 {
        run_case(
            seed,
            1 + seed % 4,
            1 + seed % 7,
            1 + seed % 19,
            seed % 2 == 0,
            seed % 3 == 0,
        );
    }
    assert!(ROUNDS.load(Ordering::Relaxed) - before >= 1000);
    let settled = SETTLED.load(Ordering::Relaxed) - settled;
    println!("{settled} settlements");
    assert!(settled >= 1000);
}
