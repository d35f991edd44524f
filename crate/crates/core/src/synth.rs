//! Synthetic players: engine instances with fixed weights that pick randomly
//! among their near-best moves. Games between them stand in for real game
//! records when testing whether training recovers a known style.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::board::{Move, Position};
use crate::eval::{FeatureCatalogue, FeatureVector, NUM_FEATURES};
use crate::pgn::GameRecord;
use crate::search::{SearchParams, Searcher};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticPlayer {
    pub name: String,
    pub weights: FeatureVector,
    pub depth: u32,
    /// Moves scoring within this many centipawns of the best are equally
    /// likely to be played.
    pub margin: f64,
}

impl SyntheticPlayer {
    pub fn new(name: &str, weights: FeatureVector, depth: u32, margin: f64) -> Self {
        SyntheticPlayer { name: name.to_string(), weights, depth, margin }
    }

    fn params(&self) -> SearchParams {
        SearchParams { depth: self.depth, tt_capacity: 1 << 14, ..Default::default() }
    }

    /// A seeded choice among moves within `margin` of the best, or `None`
    /// when `p` has no legal moves.
    pub fn choose(&self, searcher: &mut Searcher, p: &Position, rng: &mut impl Rng) -> Option<Move> {
        let scored = searcher.root_move_values(p, &self.weights, &self.params());
        let best = scored.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max);
        let near: Vec<Move> = scored.iter().filter(|&&(_, v)| v >= best - self.margin).map(|&(m, _)| m).collect();
        near.choose(rng).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    /// Uniformly random plies at the start, for opening variety.
    pub random_plies: u32,
    pub max_plies: u32,
}

impl Default for GameSpec {
    fn default() -> Self {
        // Seven plies: four for White and three for Black, so the same
        // player never moves twice in a row.
        GameSpec { random_plies: 7, max_plies: 74 }
    }
}

/// Plays one game; stops at `max_plies` or when the side to move has no
/// legal moves.
pub fn play_game(white: &SyntheticPlayer, black: &SyntheticPlayer, spec: GameSpec, seed: u64) -> GameRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut searcher = Searcher::new(1 << 14);
    let mut p = Position::startpos();
    let mut moves = Vec::new();
    for ply in 0..spec.max_plies {
        let mover = if ply % 2 == 0 { white } else { black };
        let m = if ply < spec.random_plies {
            p.generate_moves().choose(&mut rng).copied()
        } else {
            mover.choose(&mut searcher, &p, &mut rng)
        };
        let Some(m) = m else { break };
        p = p.apply_move(m).expect("chosen moves are legal");
        moves.push(m);
    }
    let mut g = GameRecord::from_moves(&white.name, &black.name, moves).expect("replayable");
    g.tags.insert("Event".into(), "synthetic".into());
    g.tags.insert("Round".into(), seed.to_string());
    g
}

fn game_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// `n` games between `a` and `b`, alternating colors (`a` has white in even
/// games). Deterministic for a given seed regardless of thread count.
pub fn matchup(a: &SyntheticPlayer, b: &SyntheticPlayer, n: usize, spec: GameSpec, seed: u64) -> Vec<GameRecord> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let s = game_seed(seed, i);
            if i % 2 == 0 {
                play_game(a, b, spec, s)
            } else {
                play_game(b, a, spec, s)
            }
        })
        .collect()
}

/// The uniform vector with the named features' weights multiplied by
/// `factor`.
pub fn emphasize(features: &[&str], factor: f64) -> Result<FeatureVector, String> {
    let cat = FeatureCatalogue::standard();
    let mut w = [1.0; NUM_FEATURES];
    for id in features {
        let i = cat.index_of(id).ok_or_else(|| format!("unknown feature {id:?}"))?;
        if i == 0 {
            return Err("the material weight is fixed at 1".into());
        }
        w[i] *= factor;
    }
    FeatureVector::new(w).map_err(|e| e.to_string())
}

/// Features the stock player A triples. Paired entry by entry with
/// [`STYLE_B`] so both sets carry a similar share of a typical evaluation.
pub const STYLE_A: [&str; 10] = [
    "complex_f6_h8",
    "complex_a1_c3",
    "complex_d1_e3",
    "pseudo_mobility",
    "bishop_pair",
    "own_doubled_pawns",
    "queenside_majority",
    "complex_a4_c5",
    "pawn_chain_c2_d3",
    "pawn_duo_d3_e3",
];

/// Features the stock player B triples.
pub const STYLE_B: [&str; 10] = [
    "complex_f1_h3",
    "complex_a6_c8",
    "complex_d6_e8",
    "castled_king_safety",
    "piece_square_tables",
    "opponent_doubled_pawns",
    "kingside_majority",
    "complex_f4_h5",
    "pawn_chain_f2_e3",
    "pawn_duo_f2_g2",
];

pub const STOCK_FACTOR: f64 = 3.0;
pub const STOCK_MARGIN: f64 = 10.0;

/// The stock pair: A and B each weight their own ten features by
/// [`STOCK_FACTOR`], everything else at 1.
pub fn stock_players(depth: u32, margin: f64) -> (SyntheticPlayer, SyntheticPlayer) {
    let a = SyntheticPlayer::new("Synthetic A", emphasize(&STYLE_A, STOCK_FACTOR).expect("known features"), depth, margin);
    let b = SyntheticPlayer::new("Synthetic B", emphasize(&STYLE_B, STOCK_FACTOR).expect("known features"), depth, margin);
    (a, b)
}
