//! TD(0) training of evaluation weights from one player's games.
//!
//! For each window position `s` where the player is to move, with `s'` the
//! position two ply later:
//!
//! ```text
//! y = P(V(s)), z = P(V(s'))            V searched under the current weights
//! φᵢ ← (z − y)/κ · κ·y·(1 − y)·vᵢ + α·φᵢ
//! ηᵢ ← adapt(ηᵢ, ηᵢ·φᵢ, Δwᵢ(prev))
//! Δwᵢ = ηᵢ·φᵢ,  wᵢ ← max(0, wᵢ + Δwᵢ)   for i ≥ 1
//! ```
//!
//! `vᵢ` are the features of the principal-variation leaf of the search from
//! `s`, which is the position whose static value the search returned.

mod profile;

use log::{debug, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::Color;
use crate::eval::{win_probability, FeatureValues, FeatureVector, NUM_FEATURES};
use crate::pgn::{window_from_positions, GameRecord};
use crate::search::{SearchParams, Searcher};

pub use profile::{config_hash, ProfileError, StyleProfile, TrainingSummary, PROFILE_FORMAT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    pub kappa: f64,
    pub eta_init: f64,
    pub eta_min: f64,
    pub eta_max: f64,
    pub u: f64,
    pub d: f64,
    pub alpha: f64,
    pub start_move: u32,
    pub end_move: u32,
    pub games_per_player: usize,
    pub rng_seed: u64,
    pub search: SearchParams,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            kappa: crate::eval::DEFAULT_KAPPA,
            eta_init: 0.01,
            eta_min: 0.01,
            eta_max: 1.0,
            u: 1.1,
            d: 0.9,
            alpha: 0.6,
            start_move: 5,
            end_move: 35,
            games_per_player: 1000,
            rng_seed: 0,
            search: SearchParams::default(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid learner configuration: {0}")]
    Invalid(String),
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return bad(format!("kappa must be positive, got {}", self.kappa));
        }
        if !(self.u > 1.0 && self.u.is_finite()) {
            return bad(format!("u must exceed 1, got {}", self.u));
        }
        if !(self.d > 0.0 && self.d < 1.0) {
            return bad(format!("d must lie in (0, 1), got {}", self.d));
        }
        if !(self.alpha >= 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in [0, 1), got {}", self.alpha));
        }
        if !(self.eta_min > 0.0 && self.eta_min <= self.eta_init && self.eta_init <= self.eta_max && self.eta_max.is_finite()) {
            return bad(format!(
                "learning rates need 0 < eta_min <= eta_init <= eta_max, got {} / {} / {}",
                self.eta_min, self.eta_init, self.eta_max
            ));
        }
        if self.start_move == 0 || self.start_move > self.end_move {
            return bad(format!("window {}..={} is empty or starts before move 1", self.start_move, self.end_move));
        }
        self.search.validate().map_err(ConfigError::Invalid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    pub weights: FeatureVector,
    pub eta: [f64; NUM_FEATURES],
    pub phi: [f64; NUM_FEATURES],
    pub prev_delta: [f64; NUM_FEATURES],
    pub games_seen: usize,
    /// MAE of each trained game that contributed at least one sample.
    pub mae_history: Vec<f64>,
    pub samples_seen: usize,
    pub rejected_steps: usize,
}

impl LearnerState {
    pub fn new(cfg: &LearnerConfig) -> Self {
        Self::with_weights(FeatureVector::uniform(), cfg)
    }

    pub fn with_weights(weights: FeatureVector, cfg: &LearnerConfig) -> Self {
        LearnerState {
            weights,
            eta: [cfg.eta_init; NUM_FEATURES],
            phi: [0.0; NUM_FEATURES],
            prev_delta: [0.0; NUM_FEATURES],
            games_seen: 0,
            mae_history: Vec::new(),
            samples_seen: 0,
            rejected_steps: 0,
        }
    }
}

/// Multiplicative rate adaptation, clamped to `[eta_min, eta_max]`.
pub fn adapt_rate(eta_prev: f64, delta_now: f64, delta_prev: f64, cfg: &LearnerConfig) -> f64 {
    let product = delta_now * delta_prev;
    let eta = if product > 0.0 {
        cfg.u * eta_prev
    } else if product < 0.0 {
        cfg.d * eta_prev
    } else {
        eta_prev
    };
    eta.clamp(cfg.eta_min, cfg.eta_max)
}

#[derive(Debug, Error, PartialEq)]
pub enum StepError {
    #[error("prediction {name} = {value} is not a probability")]
    Prediction { name: &'static str, value: f64 },
    #[error("feature {index} at the leaf is {value}")]
    Feature { index: usize, value: f64 },
}

/// One TD(0) update. On error the state is left unchanged.
pub fn td_step(state: &mut LearnerState, y: f64, z: f64, leaf: &FeatureValues, cfg: &LearnerConfig) -> Result<(), StepError> {
    for (name, value) in [("y", y), ("z", z)] {
        if !(0.0..=1.0).contains(&value) {
            state.rejected_steps += 1;
            return Err(StepError::Prediction { name, value });
        }
    }
    if let Some((index, &value)) = leaf.0.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        state.rejected_steps += 1;
        return Err(StepError::Feature { index, value });
    }
    let slope = cfg.kappa * y * (1.0 - y);
    let scale = (z - y) / cfg.kappa;
    for i in 1..NUM_FEATURES {
        let grad = slope * leaf[i];
        let phi = scale * grad + cfg.alpha * state.phi[i];
        let eta = adapt_rate(state.eta[i], state.eta[i] * phi, state.prev_delta[i], cfg);
        let delta = eta * phi;
        state.weights.set_clamped(i, state.weights[i] + delta);
        state.phi[i] = phi;
        state.eta[i] = eta;
        state.prev_delta[i] = delta;
    }
    state.samples_seen += 1;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleOutcome {
    Applied,
    /// A search from `s` or `s'` ended in a forced mate.
    SkippedMate,
    Rejected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleTrace {
    pub move_number: u32,
    pub y: f64,
    pub z: f64,
    pub outcome: SampleOutcome,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GameTrace {
    pub samples: Vec<SampleTrace>,
    /// Mean `|z − y|` over applied samples, if any.
    pub mae: Option<f64>,
}

/// Trains on one game from `color`'s side, sample by sample in game order.
pub fn train_game(
    state: &mut LearnerState,
    searcher: &mut Searcher,
    g: &GameRecord,
    color: Color,
    cfg: &LearnerConfig,
) -> GameTrace {
    let positions = g.replay();
    let window = window_from_positions(&positions, color, cfg.start_move, cfg.end_move);
    let mut trace = GameTrace::default();
    let mut abs_sum = 0.0;
    let mut applied = 0usize;
    for sample in &window {
        let here = searcher.search(&sample.position, &state.weights, &cfg.search);
        let next = searcher.search(&sample.successor, &state.weights, &cfg.search);
        let y = win_probability(here.value, cfg.kappa);
        let z = win_probability(next.value, cfg.kappa);
        let outcome = if here.is_mate() || next.is_mate() {
            SampleOutcome::SkippedMate
        } else {
            match td_step(state, y, z, &here.leaf_features(color), cfg) {
                Ok(()) => {
                    abs_sum += (z - y).abs();
                    applied += 1;
                    SampleOutcome::Applied
                }
                Err(e) => {
                    warn!("move {}: update rejected: {e}", sample.move_number);
                    SampleOutcome::Rejected
                }
            }
        };
        trace.samples.push(SampleTrace { move_number: sample.move_number, y, z, outcome });
    }
    state.games_seen += 1;
    if applied > 0 {
        let mae = abs_sum / applied as f64;
        state.mae_history.push(mae);
        trace.mae = Some(mae);
    }
    debug!("game {}: {} window samples, {} applied", state.games_seen, window.len(), applied);
    trace
}

/// Result of training one player's profile.
#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub profile: StyleProfile,
    pub state: LearnerState,
    pub warnings: Vec<String>,
}

/// Selects up to `games_per_player` of `player`'s games in seeded random
/// order and trains on them sequentially from the initial state.
pub fn train_corpus(games: &[GameRecord], player: &str, cfg: &LearnerConfig) -> Result<TrainingRun, ConfigError> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    let mut selected: Vec<(&GameRecord, Color)> =
        games.iter().filter_map(|g| g.color_of(player).map(|c| (g, c))).collect();
    if selected.len() < games.len() {
        warnings.push(format!("{} of {} games do not feature {player:?}", games.len() - selected.len(), games.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    selected.shuffle(&mut rng);
    if selected.len() < cfg.games_per_player {
        warnings.push(format!(
            "requested {} games for {player:?}, training on the {} available",
            cfg.games_per_player,
            selected.len()
        ));
    }
    selected.truncate(cfg.games_per_player);
    for w in &warnings {
        warn!("{w}");
    }

    let mut state = LearnerState::new(cfg);
    let mut searcher = Searcher::new(cfg.search.tt_capacity);
    for (g, color) in selected {
        train_game(&mut state, &mut searcher, g, color, cfg);
    }
    let profile = StyleProfile::from_state(player, &state, cfg);
    Ok(TrainingRun { profile, state, warnings })
}

/// Trailing moving average with the given window; early entries average
/// over what is available.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for (i, v) in values.iter().enumerate() {
        sum += v;
        if i >= window {
            sum -= values[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

/// Games averaged in the MAE learning-curve report.
pub const MAE_WINDOW: usize = 50;
