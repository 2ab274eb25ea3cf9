use oracle_game::protocol::{Game, PlayerId, SystemParams, TruthValue};
use oracle_game::seed::stream;

const DRAWS: u64 = 100_000;
const PROPS: usize = 100;
// Upper 0.1% point of chi-square with 99 degrees of freedom.
const CHI2_99_999: f64 = 148.230;
// Each proposition leaves its 3-sigma band with probability 0.0027, so the
// number that do is Binomial(100, 0.0027); more than 3 has probability 2e-4.
const MAX_OUTSIDE_3_SIGMA: usize = 3;

#[test]
fn draws_are_uniform_over_open_propositions() {
    let mut game = Game::new(SystemParams {
        decision_stake: 10 * DRAWS,
        list_size: PROPS,
        ..SystemParams::default()
    })
    .unwrap();
    game.fund(PlayerId(0), DRAWS);
    for i in 0..PROPS {
        let truth = TruthValue::from_bool(i % 2 == 0);
        game.submit_proposition(truth, 1).unwrap();
    }
    let mut rng = stream(2024, "uniform-draw", &[]);
    let mut counts = vec![0u64; PROPS];
    for _ in 0..DRAWS {
        let (_, prop) = game.request_vote(PlayerId(0), 1, &mut rng).unwrap();
        counts[prop.0 as usize] += 1;
    }

    let p = 1.0 / PROPS as f64;
    let mean = DRAWS as f64 * p;
    let sd = (DRAWS as f64 * p * (1.0 - p)).sqrt();
    let outside: Vec<(usize, u64)> = counts
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, c)| (c as f64 - mean).abs() > 3.0 * sd)
        .collect();
    assert!(
        outside.len() <= MAX_OUTSIDE_3_SIGMA,
        "outside {mean} ± {}: {outside:?}",
        3.0 * sd
    );
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - mean).powi(2) / mean)
        .sum();
    assert!(chi2 < CHI2_99_999, "chi-square {chi2}");
}

#[test]
fn repeated_draws_by_one_player_may_hit_the_same_proposition() {
    let mut game = Game::new(SystemParams::default()).unwrap();
    game.fund(PlayerId(0), 5);
    let id = game.submit_proposition(TruthValue::True, 1).unwrap();
    let mut rng = stream(1, "uniform-draw", &[]);
    for _ in 0..5 {
        assert_eq!(game.request_vote(PlayerId(0), 1, &mut rng).unwrap().1, id);
    }
}
