mod common;

use chess_style::board::Color;
use chess_style::eval::{evaluate, extract_features, win_probability, FeatureValues, FeatureVector, NUM_FEATURES};
use chess_style::learn::{adapt_rate, td_step, train_corpus, train_game, LearnerConfig, LearnerState, StyleProfile};
use chess_style::pgn::parse_pgn;
use chess_style::search::{SearchParams, Searcher};
use common::{fixture_game, random_positions, random_weights, reference_train_game};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn values(pairs: &[(usize, f64)]) -> FeatureValues {
    let mut v = FeatureValues::zeros();
    for &(i, x) in pairs {
        v.0[i] = x;
    }
    v
}

#[test]
fn hand_worked_step() {
    let cfg = LearnerConfig::default();
    let mut state = LearnerState::new(&cfg);
    td_step(&mut state, 0.5, 0.6, &values(&[(5, 50.0)]), &cfg).unwrap();
    assert!((state.phi[5] - 1.25).abs() < 1e-12);
    assert!((state.prev_delta[5] - 0.0125).abs() < 1e-12);
    assert!((state.weights[5] - 1.0125).abs() < 1e-12);
    assert_eq!(state.weights[6], 1.0);
}

#[test]
fn equal_predictions_change_nothing() {
    let cfg = LearnerConfig::default();
    let mut state = LearnerState::new(&cfg);
    let before = state.weights;
    td_step(&mut state, 0.7, 0.7, &values(&[(3, 40.0), (90, 20.0)]), &cfg).unwrap();
    assert_eq!(state.weights, before);
}

#[test]
fn weight_clamps_at_zero() {
    let cfg = LearnerConfig::default();
    let mut w = [1.0; NUM_FEATURES];
    w[7] = 0.005;
    let mut state = LearnerState::with_weights(FeatureVector::new(w).unwrap(), &cfg);
    // φ = (−0.1 / 0.01) · 0.01 · 0.25 · 80 = −2, Δw = 0.01 · −2 = −0.02.
    td_step(&mut state, 0.5, 0.4, &values(&[(7, 80.0)]), &cfg).unwrap();
    assert!((state.prev_delta[7] + 0.02).abs() < 1e-12);
    assert_eq!(state.weights[7], 0.0);
}

#[test]
fn rate_rule_examples() {
    let cfg = LearnerConfig::default();
    assert!((adapt_rate(0.05, 1.0, 2.0, &cfg) - 0.055).abs() < 1e-15);
    assert_eq!(adapt_rate(0.01, 1.0, -2.0, &cfg), 0.01);
    assert_eq!(adapt_rate(0.3, 1.0, 0.0, &cfg), 0.3);
    assert!((adapt_rate(0.3, -1.0, 2.0, &cfg) - 0.27).abs() < 1e-15);
    assert_eq!(adapt_rate(0.95, 1.0, 1.0, &cfg), 1.0);
}

#[test]
fn bad_inputs_leave_state_untouched() {
    let cfg = LearnerConfig::default();
    let mut state = LearnerState::new(&cfg);
    let before = state.clone();
    assert!(td_step(&mut state, f64::NAN, 0.5, &values(&[(4, 10.0)]), &cfg).is_err());
    assert!(td_step(&mut state, 0.5, 1.5, &values(&[(4, 10.0)]), &cfg).is_err());
    assert!(td_step(&mut state, 0.5, 0.6, &values(&[(4, f64::INFINITY)]), &cfg).is_err());
    assert_eq!(state.weights, before.weights);
    assert_eq!(state.eta, before.eta);
    assert_eq!(state.rejected_steps, 3);
}

/// ∂P(V)/∂w_i = κ·y·(1−y)·v_i against central differences of the static
/// evaluation. The step keeps κ·|v_i|·h fixed, and for V > 0 the difference
/// is taken on 1 − P = P(−V), which stays precise when P saturates.
#[test]
fn gradient_matches_finite_differences() {
    let kappa = 0.01;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    for p in random_positions(60, 8) {
        let w = random_weights(&mut rng);
        let v = extract_features(&p, p.side_to_move());
        let value = evaluate(&v, &w);
        let y = win_probability(value, kappa);
        let sign = if value > 0.0 { -1.0 } else { 1.0 };
        for i in (0..NUM_FEATURES).filter(|&i| v.0[i] != 0.0) {
            let analytic = kappa * y * (1.0 - y) * v.0[i];
            let h = 1e-4 / (kappa * v.0[i].abs());
            let shifted = |d: f64| {
                let mut x = [0.0; NUM_FEATURES];
                x.copy_from_slice(w.as_slice());
                x[i] += d;
                let v = chess_style::eval::evaluate_slices(v.as_slice(), &x).unwrap();
                win_probability(sign * v, kappa)
            };
            let numeric = sign * (shifted(h) - shifted(-h)) / (2.0 * h);
            let rel = (analytic - numeric).abs() / analytic.abs();
            assert!(rel < 1e-5, "feature {i}: analytic {analytic} numeric {numeric}");
            checked += 1;
        }
    }
    assert!(checked >= 50);
}

#[test]
fn momentum_off_with_fixed_rate_is_the_plain_delta_rule() {
    let cfg = LearnerConfig { alpha: 0.0, eta_init: 0.2, eta_min: 0.2, eta_max: 0.2, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut state = LearnerState::new(&cfg);
    let mut plain = [1.0; NUM_FEATURES];
    for _ in 0..2000 {
        let y: f64 = rng.gen_range(0.01..0.99);
        let z: f64 = rng.gen_range(0.01..0.99);
        let mut v = FeatureValues::zeros();
        for x in v.0.iter_mut() {
            *x = rng.gen_range(-100.0..100.0);
        }
        td_step(&mut state, y, z, &v, &cfg).unwrap();
        for (w, x) in plain.iter_mut().zip(v.0).skip(1) {
            let grad = cfg.kappa * y * (1.0 - y) * x;
            *w = (*w + 0.2 * ((z - y) / cfg.kappa * grad)).max(0.0);
        }
    }
    assert_eq!(state.weights.as_slice(), &plain[..]);
}

#[test]
fn train_game_matches_straight_line_reference() {
    let g = fixture_game();
    assert_eq!(g.moves.len(), 30);
    let cfg = LearnerConfig { search: SearchParams::with_depth(2), ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for color in [Color::White, Color::Black] {
        let start = random_weights(&mut rng);
        let reference = reference_train_game(&start, &g, color, &cfg);
        let mut state = LearnerState::with_weights(start, &cfg);
        let trace = train_game(&mut state, &mut Searcher::default(), &g, color, &cfg);
        assert!(reference.applied >= 10);
        assert_eq!(state.samples_seen, reference.applied);
        for i in 0..NUM_FEATURES {
            assert!((state.weights[i] - reference.weights[i]).abs() <= 1e-12, "{color} feature {i}");
        }
        assert_eq!(trace.mae.is_some(), reference.mae.is_some());
        assert!((trace.mae.unwrap() - reference.mae.unwrap()).abs() <= 1e-12);
    }
}

/// Knights out and back: nothing can be captured within the search horizon,
/// so a material-only evaluation predicts a draw everywhere.
#[test]
fn constant_predictions_leave_weights_unchanged() {
    let shuffle = "1. Nf3 Nf6 2. Ng1 Ng8 3. Nf3 Nf6 4. Ng1 Ng8 5. Nf3 Nf6 6. Ng1 Ng8 7. Nf3 Nf6 8. Ng1 Ng8 9. Nf3 Nf6 10. Ng1 Ng8 *";
    let g = parse_pgn(shuffle).games.remove(0);
    let cfg = LearnerConfig::default();
    let mut w = [0.0; NUM_FEATURES];
    w[0] = 1.0;
    let mut state = LearnerState::with_weights(FeatureVector::new(w).unwrap(), &cfg);
    let trace = train_game(&mut state, &mut Searcher::default(), &g, Color::White, &cfg);
    assert_eq!(state.weights.as_slice(), &w[..]);
    assert_eq!(trace.mae, Some(0.0));
    assert_eq!(state.mae_history, vec![0.0]);
}

#[test]
fn single_sample_game_applies_one_step() {
    // Ten ply: White's only window position is at move 5, two ply from the end.
    let g = parse_pgn("1. e4 e5 2. Nf3 Nc6 3. Bc4 Bc5 4. d3 d6 5. c3 Nf6 *").games.remove(0);
    let cfg = LearnerConfig { search: SearchParams::with_depth(2), ..Default::default() };
    let mut state = LearnerState::new(&cfg);
    let trace = train_game(&mut state, &mut Searcher::default(), &g, Color::White, &cfg);
    assert_eq!(trace.samples.len(), 1);
    assert_eq!(state.samples_seen, 1);
    assert_eq!(state.games_seen, 1);
}

#[test]
fn empty_corpus_yields_initial_profile_with_warning() {
    let cfg = LearnerConfig::default();
    let run = train_corpus(&[], "Nobody", &cfg).unwrap();
    assert_eq!(run.profile.weights, FeatureVector::uniform());
    assert!(!run.warnings.is_empty());
}

#[test]
fn training_is_deterministic() {
    let text = format!("{}\n{}", common::RUY_LOPEZ_30, common::RUY_LOPEZ_30.replace("Alpha", "Gamma"));
    let games = parse_pgn(&text).games;
    let cfg = LearnerConfig { search: SearchParams::with_depth(1), rng_seed: 5, ..Default::default() };
    let a = train_corpus(&games, "Beta", &cfg).unwrap();
    let b = train_corpus(&games, "Beta", &cfg).unwrap();
    assert_eq!(a.profile.to_toml(), b.profile.to_toml());
    assert_eq!(a.state.games_seen, 2);
    assert!(a.state.mae_history.iter().all(|m| (0.0..=1.0).contains(m)));
}

#[test]
fn profile_survives_a_file_round_trip() {
    let g = fixture_game();
    let cfg = LearnerConfig { search: SearchParams::with_depth(1), ..Default::default() };
    let run = train_corpus(&[g], "Alpha", &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alpha.profile");
    std::fs::write(&path, run.profile.to_toml()).unwrap();
    let back = StyleProfile::load(&path).unwrap();
    assert_eq!(back, run.profile);
    assert_eq!(back.weights[0], 1.0);
}

#[test]
fn invalid_configs_are_rejected() {
    for cfg in [
        LearnerConfig { u: 1.0, ..Default::default() },
        LearnerConfig { d: 1.0, ..Default::default() },
        LearnerConfig { alpha: 1.0, ..Default::default() },
        LearnerConfig { eta_init: 2.0, ..Default::default() },
        LearnerConfig { kappa: 0.0, ..Default::default() },
        LearnerConfig { start_move: 40, ..Default::default() },
    ] {
        assert!(cfg.validate().is_err(), "{cfg:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn state_invariants_hold_under_random_steps(seed in any::<u64>()) {
        let cfg = LearnerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = LearnerState::new(&cfg);
        for _ in 0..400 {
            let y: f64 = rng.gen_range(0.0..=1.0);
            let z: f64 = rng.gen_range(0.0..=1.0);
            let mut v = FeatureValues::zeros();
            for x in v.0.iter_mut() {
                *x = rng.gen_range(-200.0..200.0);
            }
            td_step(&mut state, y, z, &v, &cfg).unwrap();
        }
        prop_assert_eq!(state.weights[0], 1.0);
        prop_assert!(state.weights.as_slice().iter().all(|&w| w >= 0.0 && w.is_finite()));
        prop_assert!(state.eta.iter().all(|&e| (cfg.eta_min..=cfg.eta_max).contains(&e)));
    }
}
