//! Telling two profiled players apart in games between them.
//!
//! For a game `g`, a profile `p` and a perspective color `c`, the game error
//! is `E(g, p) = Σ |P(V_p(s')) − P(V_p(s))|` over the window positions `s`
//! where `c` is to move. A game is a hit for `S` against `M` when, from `S`'s
//! side of the board, `E(g, M) − E(g, S) > ε`; `H(S, M)` is the fraction of
//! hits.

mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Color, Position};
use crate::eval::{win_probability, FeatureVector, DEFAULT_KAPPA};
use crate::learn::StyleProfile;
use crate::pgn::{window_from_positions, GameRecord};
use crate::search::{SearchParams, Searcher};

pub use report::{GameRow, Perspective, SweepRow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchupConfig {
    pub epsilon: f64,
    pub start_move: u32,
    pub end_move: u32,
    pub kappa: f64,
    /// First start move of the sweep; the sweep runs up to `end_move` with
    /// the end fixed.
    pub sweep_from: u32,
    pub search: SearchParams,
}

impl Default for MatchupConfig {
    fn default() -> Self {
        MatchupConfig {
            epsilon: 0.0,
            start_move: 25,
            end_move: 35,
            kappa: DEFAULT_KAPPA,
            sweep_from: 25,
            search: SearchParams::default(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("invalid matchup configuration: {0}")]
    Config(String),
    #[error("the validation corpus has no games between {0:?} and {1:?}")]
    EmptyCorpus(String, String),
    #[error("profiles were trained against different feature catalogues ({0} vs {1})")]
    CatalogueMismatch(String, String),
    #[error("profile {0:?} was trained against catalogue {1}, this build uses {2}")]
    StaleCatalogue(String, String, String),
}

impl MatchupConfig {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        let bad = |m: String| Err(ClassifyError::Config(m));
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be finite and non-negative, got {}", self.epsilon));
        }
        if self.start_move == 0 || self.start_move > self.end_move {
            return bad(format!("window {}..={} is empty or starts before move 1", self.start_move, self.end_move));
        }
        if self.sweep_from == 0 || self.sweep_from > self.end_move {
            return bad(format!("sweep start {} lies outside 1..={}", self.sweep_from, self.end_move));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be positive, got {}", self.kappa));
        }
        self.search.validate().map_err(ClassifyError::Config)
    }
}

/// `|P(V(s')) − P(V(s))|` from searched values, or `None` when either search
/// found a forced mate.
pub fn position_error(
    searcher: &mut Searcher,
    s: &Position,
    s_next: &Position,
    weights: &FeatureVector,
    params: &SearchParams,
    kappa: f64,
) -> Option<f64> {
    let a = searcher.search(s, weights, params);
    let b = searcher.search(s_next, weights, params);
    if a.is_mate() || b.is_mate() {
        return None;
    }
    Some((win_probability(b.value, kappa) - win_probability(a.value, kappa)).abs())
}

/// Per-sample errors of one game under one profile, from `color`'s side, in
/// window order. Consecutive samples share a position, so each position is
/// searched once.
#[allow(clippy::too_many_arguments)]
fn sample_errors(
    searcher: &mut Searcher,
    positions: &[Position],
    color: Color,
    start_move: u32,
    end_move: u32,
    weights: &FeatureVector,
    params: &SearchParams,
    kappa: f64,
) -> Vec<(u32, Option<f64>)> {
    let window = window_from_positions(positions, color, start_move, end_move);
    let mut cache: Option<(u64, Option<f64>)> = None;
    let mut prob = |searcher: &mut Searcher, p: &Position| -> Option<f64> {
        if let Some((key, v)) = cache {
            if key == p.hash() {
                return v;
            }
        }
        let r = searcher.search(p, weights, params);
        let v = (!r.is_mate()).then(|| win_probability(r.value, kappa));
        cache = Some((p.hash(), v));
        v
    };
    window
        .iter()
        .map(|s| {
            let y = prob(searcher, &s.position);
            let z = prob(searcher, &s.successor);
            (s.move_number, y.zip(z).map(|(y, z)| (z - y).abs()))
        })
        .collect()
}

/// `E(g, p)` and the number of samples summed; mate samples are left out.
pub fn game_error(searcher: &mut Searcher, g: &GameRecord, profile: &StyleProfile, color: Color, cfg: &MatchupConfig) -> (f64, usize) {
    let errs = sample_errors(
        searcher,
        &g.replay(),
        color,
        cfg.start_move,
        cfg.end_move,
        &profile.weights,
        &cfg.search,
        cfg.kappa,
    );
    errs.iter().filter_map(|(_, e)| *e).fold((0.0, 0), |(sum, n), e| (sum + e, n + 1))
}

/// Eq. (5): strict inequality, so equal errors are never a hit.
pub fn is_hit(error_subject: f64, error_opponent: f64, epsilon: f64) -> bool {
    error_opponent - error_subject > epsilon
}

/// Per-sample errors of one game from one side under both profiles; a
/// sample counts only if neither profile saw a mate there.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSamples {
    pub move_numbers: Vec<u32>,
    /// Subject profile's error at each kept sample.
    pub own: Vec<f64>,
    /// Opponent profile's error at each kept sample.
    pub other: Vec<f64>,
    pub dropped_mate: usize,
}

impl PairedSamples {
    /// Sums over samples with `move_number >= start`.
    pub fn totals_from(&self, start: u32) -> (f64, f64, usize) {
        let from = self.move_numbers.partition_point(|&m| m < start);
        let own: f64 = self.own[from..].iter().sum();
        let other: f64 = self.other[from..].iter().sum();
        (own, other, self.move_numbers.len() - from)
    }
}

#[allow(clippy::too_many_arguments)]
fn paired(
    searcher: &mut Searcher,
    positions: &[Position],
    color: Color,
    subject: &FeatureVector,
    opponent: &FeatureVector,
    start: u32,
    cfg: &MatchupConfig,
) -> PairedSamples {
    let a = sample_errors(searcher, positions, color, start, cfg.end_move, subject, &cfg.search, cfg.kappa);
    let b = sample_errors(searcher, positions, color, start, cfg.end_move, opponent, &cfg.search, cfg.kappa);
    let mut out = PairedSamples { move_numbers: vec![], own: vec![], other: vec![], dropped_mate: 0 };
    for ((m, ea), (_, eb)) in a.into_iter().zip(b) {
        match (ea, eb) {
            (Some(x), Some(y)) => {
                out.move_numbers.push(m);
                out.own.push(x);
                out.other.push(y);
            }
            _ => out.dropped_mate += 1,
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchupReport {
    pub subject: String,
    pub opponent: String,
    pub config: MatchupConfig,
    pub rows: Vec<GameRow>,
    /// Games in the corpus that are not between the two players.
    pub skipped_games: usize,
    pub h_sm: f64,
    pub h_ms: f64,
    pub included_sm: usize,
    pub included_ms: usize,
    /// Mean of `MAE(M) − MAE(S)` over the hits counted for `H(S, M)`.
    pub mae_gap_sm: Option<f64>,
    /// Mean of `MAE(S) − MAE(M)` over the hits counted for `H(M, S)`.
    pub mae_gap_ms: Option<f64>,
    pub sweep: Vec<SweepRow>,
    pub sweep_mean_h_sm: f64,
    pub sweep_mean_h_ms: f64,
}

impl MatchupReport {
    /// Both hit ratios above one half at the configured window.
    pub fn discriminates(&self) -> bool {
        self.h_sm > 0.5 && self.h_ms > 0.5
    }

    /// Both sweep-mean hit ratios above one half.
    pub fn sweep_discriminates(&self) -> bool {
        self.sweep_mean_h_sm > 0.5 && self.sweep_mean_h_ms > 0.5
    }
}

pub(crate) fn check_catalogues(s: &StyleProfile, m: &StyleProfile) -> Result<(), ClassifyError> {
    if s.catalogue_hash != m.catalogue_hash {
        return Err(ClassifyError::CatalogueMismatch(s.catalogue_hash.clone(), m.catalogue_hash.clone()));
    }
    for p in [s, m] {
        if !p.matches_catalogue() {
            return Err(ClassifyError::StaleCatalogue(
                p.player_name.clone(),
                p.catalogue_hash.clone(),
                crate::eval::FeatureCatalogue::standard_hash().to_string(),
            ));
        }
    }
    Ok(())
}

fn ratio(hits: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        hits as f64 / n as f64
    }
}

/// Scores every game between `subject` and `opponent` from both players'
/// sides. Player colors are read from the game tags only to pick the side
/// of the board each ratio is computed from.
pub fn hit_ratio(corpus: &[GameRecord], subject: &StyleProfile, opponent: &StyleProfile, cfg: &MatchupConfig) -> Result<MatchupReport, ClassifyError> {
    cfg.validate()?;
    check_catalogues(subject, opponent)?;
    let s_name = subject.player_name.as_str();
    let m_name = opponent.player_name.as_str();

    let games: Vec<(usize, &GameRecord, Color)> = corpus
        .iter()
        .enumerate()
        .filter_map(|(i, g)| {
            let sc = g.color_of(s_name)?;
            let opponent_plays = s_name == m_name || g.color_of(m_name) == Some(!sc);
            opponent_plays.then_some((i, g, sc))
        })
        .collect();
    if games.is_empty() {
        return Err(ClassifyError::EmptyCorpus(s_name.into(), m_name.into()));
    }
    let skipped_games = corpus.len() - games.len();

    let first = cfg.sweep_from.min(cfg.start_move);
    let scored: Vec<(usize, Color, PairedSamples, PairedSamples)> = games
        .par_iter()
        .map_init(
            || Searcher::new(cfg.search.tt_capacity),
            |searcher, &(i, g, sc)| {
                let positions = g.replay();
                let from_s = paired(searcher, &positions, sc, &subject.weights, &opponent.weights, first, cfg);
                let from_m = paired(searcher, &positions, !sc, &opponent.weights, &subject.weights, first, cfg);
                (i, sc, from_s, from_m)
            },
        )
        .collect();

    let perspective = |samples: &PairedSamples, start: u32| -> Perspective {
        let (own, other, n) = samples.totals_from(start);
        Perspective::new(own, other, n, cfg.epsilon)
    };

    let rows: Vec<GameRow> = scored
        .iter()
        .map(|(i, sc, a, b)| GameRow {
            game_index: *i,
            subject_color: *sc,
            subject_side: perspective(a, cfg.start_move),
            opponent_side: perspective(b, cfg.start_move),
            dropped_mate: a.dropped_mate + b.dropped_mate,
        })
        .collect();

    let summarize = |start: u32| {
        let mut acc = [(0usize, 0usize, 0.0f64); 2];
        for (_, _, a, b) in &scored {
            for (slot, side) in [(0, a), (1, b)] {
                let p = perspective(side, start);
                if let Some(hit) = p.hit {
                    acc[slot].1 += 1;
                    if hit {
                        acc[slot].0 += 1;
                        acc[slot].2 += p.mae_gap().unwrap_or(0.0);
                    }
                }
            }
        }
        acc
    };

    let main = summarize(cfg.start_move);
    let gap = |(hits, _, sum): (usize, usize, f64)| (hits > 0).then(|| sum / hits as f64);

    let sweep: Vec<SweepRow> = (cfg.sweep_from..=cfg.end_move)
        .map(|start| {
            let a = summarize(start);
            SweepRow {
                start_move: start,
                h_sm: ratio(a[0].0, a[0].1),
                h_ms: ratio(a[1].0, a[1].1),
                included_sm: a[0].1,
                included_ms: a[1].1,
            }
        })
        .collect();
    let mean = |f: fn(&SweepRow) -> f64| sweep.iter().map(f).sum::<f64>() / sweep.len() as f64;

    Ok(MatchupReport {
        subject: s_name.to_string(),
        opponent: m_name.to_string(),
        config: cfg.clone(),
        rows,
        skipped_games,
        h_sm: ratio(main[0].0, main[0].1),
        h_ms: ratio(main[1].0, main[1].1),
        included_sm: main[0].1,
        included_ms: main[1].1,
        mae_gap_sm: gap(main[0]),
        mae_gap_ms: gap(main[1]),
        sweep_mean_h_sm: mean(|r| r.h_sm),
        sweep_mean_h_ms: mean(|r| r.h_ms),
        sweep,
    })
}
