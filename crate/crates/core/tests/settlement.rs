use oracle_game::protocol::{
    commitment_digest, AssignmentId, Game, Money, Nonce, Outcome, PlayerId, PropositionId,
    ProtocolError, RewardPools, SystemParams, Totals, TruthValue,
};
use oracle_game::seed::{stream, StreamRng};

fn rng() -> StreamRng {
    stream(11, "settlement-test", &[])
}

fn params(s_max: Money, decision_stake: Money) -> SystemParams {
    SystemParams {
        s_max,
        sigma_min: 10,
        decision_stake,
        list_size: 100,
        tau: 10,
        ..SystemParams::default()
    }
}

fn nonce(tag: u8) -> Nonce {
    Nonce([tag; 32])
}

/// Requests, commits and reveals one vote. Only meaningful with a single open proposition.
fn vote(
    game: &mut Game,
    player: u32,
    stake: Money,
    position: Outcome,
    rng: &mut StreamRng,
) -> PropositionId {
    let (a, p) = game.request_vote(PlayerId(player), stake, rng).unwrap();
    game.commit_vote(a, commitment_digest(position, &nonce(7)))
        .unwrap();
    game.reveal_vote(a, position, nonce(7)).unwrap();
    p
}

fn certify(game: &mut Game, player: u32, prop: PropositionId, stake: Money, position: Outcome) {
    let c = game
        .commit_certification(
            PlayerId(player),
            prop,
            stake,
            commitment_digest(position, &nonce(9)),
        )
        .unwrap();
    game.reveal_certification(c, position, nonce(9)).unwrap();
}

#[test]
fn pool_drain_pays_one_tenth_then_one_tenth_of_the_rest() {
    let mut rng = rng();
    let mut game = Game::new(params(1, 20)).unwrap();
    game.seed_pools(RewardPools {
        r_true: 1000,
        r_false: 0,
    });
    for p in 0..20 {
        game.fund(PlayerId(p), 2);
    }
    game.fund(PlayerId(100), 10);
    let mut payouts = Vec::new();
    for _ in 0..2 {
        let id = game.submit_proposition(TruthValue::True, 20).unwrap();
        for p in 0..20 {
            vote(&mut game, p, 1, Outcome::True, &mut rng);
        }
        certify(&mut game, 100, id, 10, Outcome::True);
        let result = game.settle(id).unwrap();
        assert_eq!(result.game, Outcome::True);
        assert_eq!(result.certifier_payout, result.pool_drain);
        assert_eq!(
            result.deltas[&PlayerId(100)].certify,
            result.pool_drain as i64
        );
        assert_eq!(result.routed_to_pools, 0);
        payouts.push(result.pool_drain);
    }
    assert_eq!(payouts, vec![100, 90]);
    assert_eq!(game.pools().r_true, 810);
    assert_eq!(game.balance(PlayerId(100)), 10 + 190);
    for p in 0..20 {
        assert_eq!(game.balance(PlayerId(p)), 2 + 2);
    }
    game.check_conservation().unwrap();
}

#[test]
fn sole_winner_takes_the_whole_bounty() {
    let mut rng = rng();
    let mut game = Game::new(params(1, 1)).unwrap();
    game.fund(PlayerId(0), 1);
    game.fund(PlayerId(1), 10);
    let id = game.submit_proposition(TruthValue::True, 5).unwrap();
    vote(&mut game, 0, 1, Outcome::True, &mut rng);
    certify(&mut game, 1, id, 10, Outcome::True);
    let result = game.settle(id).unwrap();
    assert_eq!(result.deltas[&PlayerId(0)].vote, 5);
    assert_eq!(game.balance(PlayerId(0)), 6);
    game.check_conservation().unwrap();
}

#[test]
fn outweighed_certifier_loses_stake_and_drain_moves_across() {
    let mut rng = rng();
    let mut game = Game::new(params(1, 20)).unwrap();
    game.seed_pools(RewardPools {
        r_true: 1000,
        r_false: 0,
    });
    for p in 0..20 {
        game.fund(PlayerId(p), 1);
    }
    game.fund(PlayerId(100), 10);
    game.fund(PlayerId(101), 20);
    let id = game.submit_proposition(TruthValue::True, 20).unwrap();
    for p in 0..20 {
        vote(&mut game, p, 1, Outcome::True, &mut rng);
    }
    certify(&mut game, 100, id, 10, Outcome::True);
    certify(&mut game, 101, id, 20, Outcome::False);
    let result = game.settle(id).unwrap();
    assert_eq!(result.voting, Outcome::True);
    assert_eq!(result.certification, Outcome::False);
    assert_eq!(result.game, Outcome::Unknown);
    assert_eq!(result.oracle, Outcome::Unknown);
    assert_eq!(result.deltas[&PlayerId(100)].certify, -10);
    assert_eq!(result.deltas[&PlayerId(101)].certify, -20);
    assert_eq!(result.voter_delta_sum(), 0);
    assert_eq!((result.pool_drain, result.pool_transfer), (100, 100));
    // Unclaimed bounty 20 plus penalties 30, split evenly.
    assert_eq!(result.routed_to_pools, 50);
    assert_eq!(
        game.pools(),
        RewardPools {
            r_true: 900 + 25,
            r_false: 100 + 25,
        }
    );
    for p in 0..20 {
        assert_eq!(game.balance(PlayerId(p)), 1);
    }
    game.check_conservation().unwrap();
}

#[test]
fn floor_shares_and_penalties_are_routed_evenly() {
    let mut rng = rng();
    let mut game = Game::new(params(1, 20)).unwrap();
    for p in 0..20 {
        game.fund(PlayerId(p), 1);
    }
    game.fund(PlayerId(100), 10);
    let id = game.submit_proposition(TruthValue::True, 31).unwrap();
    for p in 0..20 {
        let side = if p < 15 {
            Outcome::True
        } else {
            Outcome::False
        };
        vote(&mut game, p, 1, side, &mut rng);
    }
    certify(&mut game, 100, id, 10, Outcome::True);
    let result = game.settle(id).unwrap();
    for p in 0..15 {
        // floor(31 / 15) = 2
        assert_eq!(result.deltas[&PlayerId(p)].vote, 2);
    }
    for p in 15..20 {
        assert_eq!(result.deltas[&PlayerId(p)].vote, -1);
    }
    // Remainder 31 - 30 = 1 plus five penalties = 6, split 3 / 3.
    assert_eq!(result.routed_to_pools, 6);
    assert_eq!(game.ledger().sink, 0);
    assert_eq!(
        game.pools(),
        RewardPools {
            r_true: 3,
            r_false: 3
        }
    );

    // Symmetric case on a false proposition.
    for p in 0..20 {
        game.fund(PlayerId(p), 1);
    }
    let id = game.submit_proposition(TruthValue::False, 33).unwrap();
    for p in 0..20 {
        let side = if p < 15 {
            Outcome::False
        } else {
            Outcome::True
        };
        vote(&mut game, p, 1, side, &mut rng);
    }
    certify(&mut game, 100, id, 10, Outcome::False);
    let result = game.settle(id).unwrap();
    // floor(33 / 15) = 2, remainder 3, penalties 5: 8 routed. R_F drain = 3 / 10 = 0.
    assert_eq!(result.pool_drain, 0);
    assert_eq!(result.routed_to_pools, 8);
    assert_eq!(
        game.pools(),
        RewardPools {
            r_true: 7,
            r_false: 7
        }
    );
    game.check_conservation().unwrap();
}

#[test]
fn odd_residue_unit_is_carried_in_the_sink() {
    let mut rng = rng();
    let mut game = Game::new(params(1, 3)).unwrap();
    for p in 0..3 {
        game.fund(PlayerId(p), 1);
    }
    let id = game.submit_proposition(TruthValue::True, 2).unwrap();
    for p in 0..3 {
        let side = if p < 2 { Outcome::True } else { Outcome::False };
        vote(&mut game, p, 1, side, &mut rng);
    }
    // Uncertified: bounty 2 unclaimed, no voter penalties; 2 routed evenly.
    let result = game.settle(id).unwrap();
    assert_eq!(result.routed_to_pools, 2);
    let id = game.submit_proposition(TruthValue::True, 3).unwrap();
    for p in 0..3 {
        vote(&mut game, p, 1, Outcome::True, &mut rng);
    }
    let result = game.settle(id).unwrap();
    assert_eq!(result.routed_to_pools, 2);
    assert_eq!(game.ledger().sink, 1);
    assert_eq!(
        game.pools(),
        RewardPools {
            r_true: 2,
            r_false: 2
        }
    );
    game.check_conservation().unwrap();
}

#[test]
fn submit_examples() {
    let mut game = Game::new(SystemParams {
        list_size: 2,
        ..SystemParams::default()
    })
    .unwrap();
    assert_eq!(
        game.submit_proposition(TruthValue::True, 100),
        Ok(PropositionId(0))
    );
    assert_eq!(game.open_count(), 1);
    assert_eq!(
        game.submit_proposition(TruthValue::True, 0),
        Err(ProtocolError::NonPositiveBounty)
    );
    assert_eq!(
        game.submit_proposition(TruthValue::Undecidable, 5),
        Err(ProtocolError::UndecidableDisabled)
    );
    let id = game.submit_proposition(TruthValue::False, 250).unwrap();
    assert_eq!(game.proposition(id).unwrap().bounty, 250);
    assert_eq!(
        game.submit_proposition(TruthValue::True, 1),
        Err(ProtocolError::ListFull)
    );
}

#[test]
fn request_vote_escrows_before_the_draw() {
    let mut rng = rng();
    let mut game = Game::new(params(5, 20)).unwrap();
    game.fund(PlayerId(3), 12);
    assert_eq!(
        game.request_vote(PlayerId(3), 5, &mut rng),
        Err(ProtocolError::NoOpenPropositions)
    );
    game.submit_proposition(TruthValue::True, 10).unwrap();
    let (a, p) = game.request_vote(PlayerId(3), 5, &mut rng).unwrap();
    assert_eq!(p, PropositionId(0));
    assert_eq!(game.balance(PlayerId(3)), 7);
    assert_eq!(game.ledger().escrow, 5);
    assert_eq!(game.assignment(a).unwrap().stake, 5);
    assert!(matches!(
        game.request_vote(PlayerId(3), 6, &mut rng),
        Err(ProtocolError::StakeTooLarge { stake: 6, s_max: 5 })
    ));
    assert_eq!(
        game.request_vote(PlayerId(3), 0, &mut rng),
        Err(ProtocolError::NonPositiveStake)
    );
    game.request_vote(PlayerId(3), 5, &mut rng).unwrap();
    assert!(matches!(
        game.request_vote(PlayerId(3), 5, &mut rng),
        Err(ProtocolError::InsufficientBalance {
            needed: 5,
            available: 2,
            ..
        })
    ));
    game.check_conservation().unwrap();
}

#[test]
fn commit_and_reveal_vote() {
    let mut rng = rng();
    let mut game = Game::new(SystemParams {
        tri_state: true,
        ..params(1, 20)
    })
    .unwrap();
    for p in 0..4 {
        game.fund(PlayerId(p), 1);
    }
    let id = game.submit_proposition(TruthValue::True, 10).unwrap();
    let assignments: Vec<AssignmentId> = (0..4)
        .map(|p| game.request_vote(PlayerId(p), 1, &mut rng).unwrap().0)
        .collect();
    let [a, b, c, d] = assignments[..] else {
        unreachable!()
    };

    assert_eq!(
        game.reveal_vote(a, Outcome::True, nonce(1)),
        Err(ProtocolError::NotCommitted)
    );
    game.commit_vote(a, commitment_digest(Outcome::True, &nonce(1)))
        .unwrap();
    assert_eq!(
        game.commit_vote(a, commitment_digest(Outcome::True, &nonce(1))),
        Err(ProtocolError::AlreadyCommitted)
    );
    assert_eq!(
        game.commit_vote(
            AssignmentId(99),
            commitment_digest(Outcome::True, &nonce(1))
        ),
        Err(ProtocolError::UnknownAssignment(AssignmentId(99)))
    );
    assert_eq!(game.compute_totals(id).unwrap(), Totals::default());
    game.reveal_vote(a, Outcome::True, nonce(1)).unwrap();
    assert_eq!(game.compute_totals(id).unwrap().s_tot_true, 1);

    game.commit_vote(b, commitment_digest(Outcome::True, &nonce(2)))
        .unwrap();
    assert_eq!(
        game.reveal_vote(b, Outcome::False, nonce(2)),
        Err(ProtocolError::DigestMismatch { forfeited: 1 })
    );
    assert_eq!(game.assignment(b), None);
    assert_eq!(game.ledger().sink, 1);
    assert_eq!(
        game.reveal_vote(b, Outcome::True, nonce(2)),
        Err(ProtocolError::UnknownAssignment(b))
    );

    game.commit_vote(c, commitment_digest(Outcome::Unknown, &nonce(3)))
        .unwrap();
    game.reveal_vote(c, Outcome::Unknown, nonce(3)).unwrap();
    assert_eq!(game.compute_totals(id).unwrap().s_tot_unknown, 1);

    game.commit_vote(d, commitment_digest(Outcome::False, &nonce(4)))
        .unwrap();
    assert_eq!(game.expire_vote(d), Ok(1));
    assert_eq!(game.assignment(d), None);
    assert_eq!(game.ledger().sink, 2);
    game.check_conservation().unwrap();
}

#[test]
fn unknown_vote_rejected_without_tri_state_and_commitment_survives() {
    let mut rng = rng();
    let mut game = Game::new(params(1, 20)).unwrap();
    game.fund(PlayerId(0), 1);
    let id = game.submit_proposition(TruthValue::True, 10).unwrap();
    let (a, _) = game.request_vote(PlayerId(0), 1, &mut rng).unwrap();
    game.commit_vote(a, commitment_digest(Outcome::Unknown, &nonce(5)))
        .unwrap();
    assert_eq!(
        game.reveal_vote(a, Outcome::Unknown, nonce(5)),
        Err(ProtocolError::InvalidPosition)
    );
    assert!(game.assignment(a).is_some());
    assert_eq!(game.compute_totals(id).unwrap(), Totals::default());
}

#[test]
fn certification_boundaries() {
    let mut game = Game::new(params(1, 20)).unwrap();
    game.fund(PlayerId(0), 100);
    let id = game.submit_proposition(TruthValue::True, 10).unwrap();
    assert!(matches!(
        game.commit_certification(
            PlayerId(0),
            id,
            9,
            commitment_digest(Outcome::True, &nonce(1))
        ),
        Err(ProtocolError::StakeTooSmall {
            stake: 9,
            sigma_min: 10
        })
    ));
    let c = game
        .commit_certification(
            PlayerId(0),
            id,
            10,
            commitment_digest(Outcome::True, &nonce(1)),
        )
        .unwrap();
    assert_eq!(game.balance(PlayerId(0)), 90);
    game.reveal_certification(c, Outcome::True, nonce(1))
        .unwrap();
    assert_eq!(game.compute_totals(id).unwrap().sigma_tot_true, 10);

    let c = game
        .commit_certification(
            PlayerId(0),
            id,
            10,
            commitment_digest(Outcome::Unknown, &nonce(2)),
        )
        .unwrap();
    assert_eq!(
        game.reveal_certification(c, Outcome::Unknown, nonce(2)),
        Err(ProtocolError::InvalidPosition)
    );
    let c = game
        .commit_certification(
            PlayerId(0),
            id,
            20,
            commitment_digest(Outcome::False, &nonce(3)),
        )
        .unwrap();
    assert_eq!(
        game.reveal_certification(c, Outcome::True, nonce(3)),
        Err(ProtocolError::DigestMismatch { forfeited: 20 })
    );
    assert!(matches!(
        game.commit_certification(
            PlayerId(0),
            id,
            70,
            commitment_digest(Outcome::True, &nonce(4))
        ),
        Err(ProtocolError::InsufficientBalance { .. })
    ));
    assert_eq!(
        game.commit_certification(
            PlayerId(0),
            PropositionId(9),
            10,
            commitment_digest(Outcome::True, &nonce(4))
        ),
        Err(ProtocolError::UnknownProposition(PropositionId(9)))
    );
    game.check_conservation().unwrap();
}

#[test]
fn totals_and_decision_boundary() {
    let mut rng = rng();
    let mut game = Game::new(params(2, 20)).unwrap();
    for p in 0..3 {
        game.fund(PlayerId(p), 2);
    }
    let id = game.submit_proposition(TruthValue::True, 10).unwrap();
    vote(&mut game, 0, 1, Outcome::True, &mut rng);
    vote(&mut game, 1, 1, Outcome::True, &mut rng);
    vote(&mut game, 2, 2, Outcome::False, &mut rng);
    let totals = game.compute_totals(id).unwrap();
    assert_eq!(
        (totals.s_tot_true, totals.s_tot_false, totals.s_tot_unknown),
        (2, 2, 0)
    );
    assert_eq!((totals.sigma_tot_true, totals.sigma_tot_false), (0, 0));

    let mut game = Game::new(params(1, 20)).unwrap();
    for p in 0..20 {
        game.fund(PlayerId(p), 1);
    }
    let id = game.submit_proposition(TruthValue::True, 10).unwrap();
    for p in 0..19 {
        let side = if p < 11 {
            Outcome::True
        } else {
            Outcome::False
        };
        vote(&mut game, p, 1, side, &mut rng);
    }
    assert_eq!(game.check_decision(id), Ok(false));
    assert_eq!(game.settle(id), Err(ProtocolError::NotDecidable(id)));
    vote(&mut game, 19, 1, Outcome::False, &mut rng);
    assert_eq!(game.check_decision(id), Ok(true));
    let totals = game.compute_totals(id).unwrap();
    assert_eq!((totals.s_tot_true, totals.s_tot_false), (11, 9));
    let result = game.settle(id).unwrap();
    assert_eq!(result.voting, Outcome::True);
    assert_eq!(game.proposition(id), None);
    assert_eq!(game.settle(id), Err(ProtocolError::UnknownProposition(id)));
}

#[test]
fn saturated_proposition_is_not_drawn_until_stake_frees_up() {
    let mut rng = rng();
    let mut game = Game::new(params(1, 2)).unwrap();
    for p in 0..3 {
        game.fund(PlayerId(p), 1);
    }
    game.submit_proposition(TruthValue::True, 10).unwrap();
    let (a, _) = game.request_vote(PlayerId(0), 1, &mut rng).unwrap();
    game.request_vote(PlayerId(1), 1, &mut rng).unwrap();
    assert_eq!(
        game.request_vote(PlayerId(2), 1, &mut rng),
        Err(ProtocolError::NoOpenPropositions)
    );
    game.expire_vote(a).unwrap();
    game.request_vote(PlayerId(2), 1, &mut rng).unwrap();
}

#[test]
fn unrevealed_certifications_are_forfeited_at_settlement() {
    let mut rng = rng();
    let mut game = Game::new(params(1, 1)).unwrap();
    game.fund(PlayerId(0), 1);
    game.fund(PlayerId(1), 10);
    let id = game.submit_proposition(TruthValue::True, 4).unwrap();
    game.commit_certification(
        PlayerId(1),
        id,
        10,
        commitment_digest(Outcome::True, &nonce(1)),
    )
    .unwrap();
    vote(&mut game, 0, 1, Outcome::True, &mut rng);
    let result = game.settle(id).unwrap();
    assert_eq!(result.forfeited, 10);
    assert_eq!(result.certification, Outcome::Unknown);
    // Bounty 4 unclaimed plus the forfeit 10.
    assert_eq!(result.routed_to_pools, 14);
    assert_eq!(game.balance(PlayerId(1)), 0);
    game.check_conservation().unwrap();
}
