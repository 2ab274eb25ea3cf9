use oracle_game::agents::CertifierStrategy;
use oracle_game::protocol::{
    commitment_digest, read_ndjson, replay, write_ndjson, Event, Game, Nonce, Outcome, PlayerId,
    ReplayError, RewardPools, SystemParams, TruthValue,
};
use oracle_game::seed::stream;
use oracle_game::sim::{run_trial, Cohort, RunSettings, ScenarioConfig};

fn round_trip(events: &[Event]) -> Vec<Event> {
    let mut buf = Vec::new();
    write_ndjson(&mut buf, events).unwrap();
    assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), events.len());
    read_ndjson(buf.as_slice()).unwrap()
}

/// A hand-built log with a rejected reveal, an expiry and a sealed certification.
fn scripted() -> Game {
    let mut game = Game::with_event_log(SystemParams {
        decision_stake: 3,
        ..SystemParams::default()
    })
    .unwrap();
    game.seed_pools(RewardPools {
        r_true: 50,
        r_false: 30,
    });
    for p in 0..5 {
        game.fund(PlayerId(p), 100);
    }
    let prop = game.submit_proposition(TruthValue::True, 40).unwrap();
    let mut rng = stream(7, "replay", &[]);

    let sealed = Nonce([9; 32]);
    game.commit_certification(
        PlayerId(4),
        prop,
        10,
        commitment_digest(Outcome::False, &sealed),
    )
    .unwrap();
    let nonce = Nonce([3; 32]);
    let cert = game
        .commit_certification(
            PlayerId(3),
            prop,
            12,
            commitment_digest(Outcome::True, &nonce),
        )
        .unwrap();
    game.reveal_certification(cert, Outcome::True, nonce)
        .unwrap();

    // A mismatched reveal and an expiry free their slots before the honest votes.
    let (a, _) = game.request_vote(PlayerId(0), 1, &mut rng).unwrap();
    game.commit_vote(a, commitment_digest(Outcome::True, &Nonce([1; 32])))
        .unwrap();
    assert!(game.reveal_vote(a, Outcome::True, Nonce([2; 32])).is_err());
    let (a, _) = game.request_vote(PlayerId(1), 1, &mut rng).unwrap();
    game.expire_vote(a).unwrap();
    for p in 0..3 {
        let nonce = Nonce([p as u8; 32]);
        let (a, _) = game.request_vote(PlayerId(p), 1, &mut rng).unwrap();
        game.commit_vote(a, commitment_digest(Outcome::True, &nonce))
            .unwrap();
        game.reveal_vote(a, Outcome::True, nonce).unwrap();
    }
    assert_eq!(game.settle_decidable().len(), 1);
    game
}

#[test]
fn scripted_log_round_trips_and_replays() {
    let mut game = scripted();
    let events = game.take_events().unwrap();
    for kind in ["vote-expire", "cert-reveal", "settle"] {
        assert!(
            events
                .iter()
                .any(|e| serde_json::to_value(e).unwrap()["event"] == kind),
            "{kind} missing"
        );
    }
    assert!(events.iter().any(|e| matches!(
        e,
        Event::VoteReveal {
            accepted: false,
            ..
        }
    )));

    let parsed = round_trip(&events);
    assert_eq!(parsed, events);
    let mut rebuilt = replay(&parsed).unwrap();
    assert_eq!(rebuilt.ledger(), game.ledger());
    assert_eq!(rebuilt.take_events().unwrap(), events);
}

#[test]
fn simulated_log_replays_to_the_same_ledger() {
    let config = ScenarioConfig {
        params: SystemParams {
            list_size: 10,
            ..SystemParams::default()
        },
        run: RunSettings {
            rounds: 30,
            record_events: true,
            ..RunSettings::default()
        },
        cohorts: vec![
            Cohort::voters("honest", 30, 0.8),
            Cohort::certifiers("certifiers", 3, 0.9, CertifierStrategy::Honest),
        ],
        ..ScenarioConfig::default()
    };
    let stats = run_trial(&config, 11).unwrap();
    let events = stats.events.expect("events recorded");
    let settled = events
        .iter()
        .filter(|e| matches!(e, Event::Settle { .. }))
        .count();
    assert!(settled > 10, "{settled} settlements");

    let game = replay(&round_trip(&events)).unwrap();
    game.check_conservation().unwrap();
    let final_pools = events
        .iter()
        .rev()
        .find_map(|e| match e {
            Event::Settle {
                r_true, r_false, ..
            } => Some((*r_true, *r_false)),
            _ => None,
        })
        .unwrap();
    assert_eq!((game.pools().r_true, game.pools().r_false), final_pools);
    assert_eq!(game.events().unwrap(), events.as_slice());
}

#[test]
fn tampered_logs_are_rejected() {
    let events = scripted().take_events().unwrap();

    assert!(matches!(
        replay(&events[1..]),
        Err(ReplayError::MissingGenesis)
    ));

    let mut doubled = events.clone();
    doubled.insert(1, events[0].clone());
    assert!(matches!(
        replay(&doubled),
        Err(ReplayError::Diverged { index: 1, .. })
    ));

    // Claiming the mismatched reveal was accepted.
    let mut forged = events.clone();
    let i = forged
        .iter()
        .position(|e| {
            matches!(
                e,
                Event::VoteReveal {
                    accepted: false,
                    ..
                }
            )
        })
        .unwrap();
    if let Event::VoteReveal { accepted, .. } = &mut forged[i] {
        *accepted = true;
    }
    assert!(matches!(replay(&forged), Err(ReplayError::Protocol { index, .. }) if index == i));

    // A settlement record that disagrees with the recomputed pools.
    let mut forged = events.clone();
    if let Some(Event::Settle { r_true, .. }) = forged.last_mut() {
        *r_true += 1;
    }
    assert!(matches!(replay(&forged), Err(ReplayError::Diverged { .. })));

    let text = "{\"event\":\"genesis\"}\n";
    assert!(matches!(
        read_ndjson(text.as_bytes()),
        Err(ReplayError::Parse { line: 1, .. })
    ));
}
