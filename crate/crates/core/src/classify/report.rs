use std::fmt::Write as _;

use crate::board::Color;

use super::{is_hit, MatchupReport};

/// One game scored from one player's side of the board.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perspective {
    /// Error under the profile of the player whose side this is.
    pub own_error: f64,
    /// Error under the other player's profile.
    pub other_error: f64,
    pub samples: usize,
    /// `None` when the game has no usable samples from this side.
    pub hit: Option<bool>,
}

impl Perspective {
    pub fn new(own_error: f64, other_error: f64, samples: usize, epsilon: f64) -> Self {
        let hit = (samples > 0).then(|| is_hit(own_error, other_error, epsilon));
        Perspective { own_error, other_error, samples, hit }
    }

    /// `MAE(other) − MAE(own)`.
    pub fn mae_gap(&self) -> Option<f64> {
        (self.samples > 0).then(|| (self.other_error - self.own_error) / self.samples as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameRow {
    /// Zero-based index in the validation corpus.
    pub game_index: usize,
    pub subject_color: Color,
    /// Scored from the subject's side: own = `E(g,S)`, other = `E(g,M)`.
    pub subject_side: Perspective,
    /// Scored from the opponent's side: own = `E(g,M)`, other = `E(g,S)`.
    pub opponent_side: Perspective,
    pub dropped_mate: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub start_move: u32,
    pub h_sm: f64,
    pub h_ms: f64,
    pub included_sm: usize,
    pub included_ms: usize,
}

fn flag(hit: Option<bool>) -> &'static str {
    match hit {
        Some(true) => "1",
        Some(false) => "0",
        None => "",
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "NA".into())
}

impl MatchupReport {
    /// Per-game rows, with a leading `#` provenance line when `meta` is
    /// non-empty.
    pub fn games_csv(&self, meta: &str) -> String {
        let mut out = String::new();
        if !meta.is_empty() {
            writeln!(out, "# {meta}").unwrap();
        }
        out.push_str(
            "game_index,subject_color,samples_s,error_s_by_s,error_s_by_m,hit_s,samples_m,error_m_by_m,error_m_by_s,hit_m,dropped_mate\n",
        );
        for r in &self.rows {
            let s = &r.subject_side;
            let m = &r.opponent_side;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.game_index + 1,
                r.subject_color,
                s.samples,
                s.own_error,
                s.other_error,
                flag(s.hit),
                m.samples,
                m.own_error,
                m.other_error,
                flag(m.hit),
                r.dropped_mate
            )
            .unwrap();
        }
        out
    }

    /// Hit ratios against the sweep's start move, end move fixed.
    pub fn sweep_csv(&self, meta: &str) -> String {
        let mut out = String::new();
        if !meta.is_empty() {
            writeln!(out, "# {meta}").unwrap();
        }
        out.push_str("start_move,end_move,h_sm,h_ms,included_sm,included_ms\n");
        for r in &self.sweep {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.start_move, self.config.end_move, r.h_sm, r.h_ms, r.included_sm, r.included_ms
            )
            .unwrap();
        }
        out
    }

    pub fn summary(&self, meta: &str) -> String {
        let mut out = String::new();
        let c = &self.config;
        if !meta.is_empty() {
            writeln!(out, "# {meta}").unwrap();
        }
        writeln!(out, "subject S:  {}", self.subject).unwrap();
        writeln!(out, "opponent M: {}", self.opponent).unwrap();
        writeln!(out, "window:     moves {}-{}, epsilon {}", c.start_move, c.end_move, c.epsilon).unwrap();
        writeln!(
            out,
            "games:      {} scored, {} not between the two players",
            self.rows.len(),
            self.skipped_games
        )
        .unwrap();
        writeln!(
            out,
            "excluded:   {} from S's side, {} from M's side (no usable samples)",
            self.rows.len() - self.included_sm,
            self.rows.len() - self.included_ms
        )
        .unwrap();
        writeln!(out, "H(S,M):     {} over {} games", self.h_sm, self.included_sm).unwrap();
        writeln!(out, "H(M,S):     {} over {} games", self.h_ms, self.included_ms).unwrap();
        writeln!(out, "MAE gap over hits, S's side: {}", opt(self.mae_gap_sm)).unwrap();
        writeln!(out, "MAE gap over hits, M's side: {}", opt(self.mae_gap_ms)).unwrap();
        writeln!(
            out,
            "sweep {}-{} mean: H(S,M) {}, H(M,S) {}",
            c.sweep_from, c.end_move, self.sweep_mean_h_sm, self.sweep_mean_h_ms
        )
        .unwrap();
        writeln!(out, "discriminates: {}", self.discriminates()).unwrap();
        writeln!(out, "sweep discriminates: {}", self.sweep_discriminates()).unwrap();
        out
    }
}
