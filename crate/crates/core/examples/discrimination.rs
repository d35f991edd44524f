//! Trains profiles for the two stock synthetic players and scores them on
//! games between the two.
//!
//! `cargo run --release -p chess-style --example discrimination -- [train_games] [validation_games] [depth] [seed]`

use std::time::Instant;

use chess_style::classify::{hit_ratio, MatchupConfig};
use chess_style::learn::{train_corpus, LearnerConfig};
use chess_style::search::SearchParams;
use chess_style::synth::{matchup, stock_players, GameSpec, SyntheticPlayer, STOCK_MARGIN};

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let train_games = args.first().copied().unwrap_or(200) as usize;
    let validation_games = args.get(1).copied().unwrap_or(60) as usize;
    let depth = args.get(2).copied().unwrap_or(1) as u32;
    let seed = args.get(3).copied().unwrap_or(1);

    let (a, b) = stock_players(depth, STOCK_MARGIN);
    let spec = GameSpec::default();
    let sparring = SyntheticPlayer::new("Sparring", chess_style::eval::FeatureVector::uniform(), depth, STOCK_MARGIN);

    let t = Instant::now();
    let corpus_a = matchup(&a, &sparring, train_games, spec, seed);
    let corpus_b = matchup(&b, &sparring, train_games, spec, seed + 1);
    let validation = matchup(&a, &b, validation_games, spec, seed + 2);
    eprintln!("generated corpora in {:.1?}", t.elapsed());

    let search = SearchParams { depth, ..Default::default() };
    let cfg = LearnerConfig { search: search.clone(), games_per_player: train_games, rng_seed: seed, ..Default::default() };
    let t = Instant::now();
    let (ra, rb) = rayon::join(|| train_corpus(&corpus_a, &a.name, &cfg).unwrap(), || train_corpus(&corpus_b, &b.name, &cfg).unwrap());
    eprintln!("trained in {:.1?}", t.elapsed());

    let mcfg = MatchupConfig { search, ..Default::default() };
    let t = Instant::now();
    let report = hit_ratio(&validation, &ra.profile, &rb.profile, &mcfg).unwrap();
    eprintln!("classified in {:.1?}", t.elapsed());
    print!("{}", report.summary(""));
    print!("{}", report.sweep_csv(""));
}
