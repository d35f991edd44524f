//! Reference implementations shared by the integration tests. Each is written
//! independently of the engine code it checks and favours obviousness over
//! speed.

#![allow(dead_code)]

use chess_style::board::{Color, Position};
use chess_style::eval::{evaluate, extract_features, FeatureVector, NUM_FEATURES};
use chess_style::learn::LearnerConfig;
use chess_style::pgn::{parse_pgn, GameRecord};
use chess_style::search::{LeafKind, SearchParams, Searcher, MATE};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TACTICAL_FENS: [&str; 6] = [
    "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
    "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1",
    "r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1",
    "rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8",
    "r4rk1/1pp1qppp/p1np1n2/2b1p1B1/2B1P1b1/P1NP1N2/1PP1QPPP/R4RK1 w - - 0 10",
    "n1n5/PPPk4/8/8/8/8/4Kppp/5N1N b - - 0 1",
];

// ---------------------------------------------------------------------------
// 0x88 mailbox move generator
// ---------------------------------------------------------------------------

const PAWN: i8 = 1;
const KNIGHT: i8 = 2;
const BISHOP: i8 = 3;
const ROOK: i8 = 4;
const QUEEN: i8 = 5;
const KING: i8 = 6;

const KNIGHT_STEPS: [i32; 8] = [33, 31, 18, 14, -33, -31, -18, -14];
const KING_STEPS: [i32; 8] = [1, -1, 16, -16, 15, 17, -15, -17];
const ROOK_STEPS: [i32; 4] = [1, -1, 16, -16];
const BISHOP_STEPS: [i32; 4] = [15, 17, -15, -17];

/// Squares are `rank * 16 + file`; white pieces positive, black negative.
#[derive(Clone)]
pub struct Mailbox {
    board: [i8; 128],
    /// +1 white, −1 black.
    side: i8,
    /// K, Q, k, q as bits 0..3.
    castling: u8,
    ep: Option<i32>,
}

#[derive(Clone, Copy)]
struct MbMove {
    from: i32,
    to: i32,
    promo: i8,
}

fn on_board(sq: i32) -> bool {
    (0..128).contains(&sq) && sq & 0x88 == 0
}

fn sq_name(sq: i32) -> String {
    format!("{}{}", (b'a' + (sq & 7) as u8) as char, (sq >> 4) + 1)
}

impl Mailbox {
    pub fn from_fen(fen: &str) -> Mailbox {
        let fields: Vec<&str> = fen.split_whitespace().collect();
        let mut board = [0i8; 128];
        for (i, row) in fields[0].split('/').enumerate() {
            let rank = 7 - i as i32;
            let mut file = 0;
            for c in row.chars() {
                if let Some(n) = c.to_digit(10) {
                    file += n as i32;
                    continue;
                }
                let kind = match c.to_ascii_lowercase() {
                    'p' => PAWN,
                    'n' => KNIGHT,
                    'b' => BISHOP,
                    'r' => ROOK,
                    'q' => QUEEN,
                    'k' => KING,
                    _ => panic!("bad piece {c}"),
                };
                board[(rank * 16 + file) as usize] = if c.is_ascii_uppercase() { kind } else { -kind };
                file += 1;
            }
        }
        let side = if fields[1] == "w" { 1 } else { -1 };
        let mut castling = 0;
        for c in fields[2].chars() {
            castling |= match c {
                'K' => 1,
                'Q' => 2,
                'k' => 4,
                'q' => 8,
                _ => 0,
            };
        }
        let ep = (fields[3] != "-").then(|| {
            let b = fields[3].as_bytes();
            (b[1] - b'1') as i32 * 16 + (b[0] - b'a') as i32
        });
        Mailbox { board, side, castling, ep }
    }

    fn at(&self, sq: i32) -> i8 {
        self.board[sq as usize]
    }

    /// Whether `sq` is attacked by any piece of `by` (+1 / −1).
    fn attacked(&self, sq: i32, by: i8) -> bool {
        for d in [15, 17] {
            let from = sq - d * by as i32;
            if on_board(from) && self.at(from) == PAWN * by {
                return true;
            }
        }
        for d in KNIGHT_STEPS {
            if on_board(sq + d) && self.at(sq + d) == KNIGHT * by {
                return true;
            }
        }
        for d in KING_STEPS {
            if on_board(sq + d) && self.at(sq + d) == KING * by {
                return true;
            }
        }
        for (steps, slider) in [(ROOK_STEPS, ROOK), (BISHOP_STEPS, BISHOP)] {
            for d in steps {
                let mut t = sq + d;
                while on_board(t) {
                    let pc = self.at(t);
                    if pc != 0 {
                        if pc == slider * by || pc == QUEEN * by {
                            return true;
                        }
                        break;
                    }
                    t += d;
                }
            }
        }
        false
    }

    fn king(&self, side: i8) -> i32 {
        (0..128).find(|&s| on_board(s) && self.at(s) == KING * side).expect("king on board")
    }

    fn pseudo_moves(&self) -> Vec<MbMove> {
        let us = self.side;
        let mut out = Vec::new();
        let push = |out: &mut Vec<MbMove>, from: i32, to: i32, promote: bool| {
            if promote {
                for promo in [QUEEN, ROOK, BISHOP, KNIGHT] {
                    out.push(MbMove { from, to, promo });
                }
            } else {
                out.push(MbMove { from, to, promo: 0 });
            }
        };
        for from in 0..128 {
            if !on_board(from) {
                continue;
            }
            let pc = self.at(from);
            if pc == 0 || pc.signum() != us {
                continue;
            }
            let kind = pc.abs();
            match kind {
                PAWN => {
                    let fwd = 16 * us as i32;
                    let last_rank = if us == 1 { 7 } else { 0 };
                    let start_rank = if us == 1 { 1 } else { 6 };
                    let to = from + fwd;
                    if on_board(to) && self.at(to) == 0 {
                        push(&mut out, from, to, to >> 4 == last_rank);
                        if from >> 4 == start_rank && self.at(to + fwd) == 0 {
                            push(&mut out, from, to + fwd, false);
                        }
                    }
                    for side_step in [-1, 1] {
                        let to = from + fwd + side_step;
                        if !on_board(to) {
                            continue;
                        }
                        let target = self.at(to);
                        if (target != 0 && target.signum() == -us) || Some(to) == self.ep {
                            push(&mut out, from, to, to >> 4 == last_rank);
                        }
                    }
                }
                KNIGHT | KING => {
                    let steps = if kind == KNIGHT { KNIGHT_STEPS } else { KING_STEPS };
                    for d in steps {
                        let to = from + d;
                        if on_board(to) && self.at(to).signum() != us {
                            push(&mut out, from, to, false);
                        }
                    }
                }
                _ => {
                    let dirs: Vec<i32> = match kind {
                        BISHOP => BISHOP_STEPS.to_vec(),
                        ROOK => ROOK_STEPS.to_vec(),
                        _ => ROOK_STEPS.iter().chain(BISHOP_STEPS.iter()).copied().collect(),
                    };
                    for d in dirs {
                        let mut to = from + d;
                        while on_board(to) {
                            let target = self.at(to);
                            if target.signum() == us {
                                break;
                            }
                            push(&mut out, from, to, false);
                            if target != 0 {
                                break;
                            }
                            to += d;
                        }
                    }
                }
            }
        }
        // Castling: king and rook on their home squares, the path empty and
        // the king's start, transit and destination squares unattacked.
        let (home, kbit, qbit) = if us == 1 { (0, 1, 2) } else { (112, 4, 8) };
        let e = home + 4;
        if self.at(e) == KING * us && !self.attacked(e, -us) {
            if self.castling & kbit != 0
                && self.at(home + 7) == ROOK * us
                && self.at(home + 5) == 0
                && self.at(home + 6) == 0
                && !self.attacked(home + 5, -us)
                && !self.attacked(home + 6, -us)
            {
                out.push(MbMove { from: e, to: home + 6, promo: 0 });
            }
            if self.castling & qbit != 0
                && self.at(home) == ROOK * us
                && self.at(home + 1) == 0
                && self.at(home + 2) == 0
                && self.at(home + 3) == 0
                && !self.attacked(home + 3, -us)
                && !self.attacked(home + 2, -us)
            {
                out.push(MbMove { from: e, to: home + 2, promo: 0 });
            }
        }
        out
    }

    fn make(&self, m: MbMove) -> Mailbox {
        let mut next = self.clone();
        let us = self.side;
        let pc = self.at(m.from);
        let kind = pc.abs();
        if kind == PAWN && Some(m.to) == self.ep {
            next.board[(m.to - 16 * us as i32) as usize] = 0;
        }
        next.board[m.from as usize] = 0;
        next.board[m.to as usize] = if m.promo != 0 { m.promo * us } else { pc };
        if kind == KING && (m.to - m.from).abs() == 2 {
            let (rook_from, rook_to) = if m.to > m.from { (m.from + 3, m.from + 1) } else { (m.from - 4, m.from - 1) };
            next.board[rook_to as usize] = next.board[rook_from as usize];
            next.board[rook_from as usize] = 0;
        }
        next.ep = (kind == PAWN && (m.to - m.from).abs() == 32).then(|| (m.from + m.to) / 2);
        for (sq, lost) in [(4, 3u8), (0, 2), (7, 1), (116, 12), (112, 8), (119, 4)] {
            if m.from == sq || m.to == sq {
                next.castling &= !lost;
            }
        }
        next.side = -us;
        next
    }

    fn legal(&self) -> Vec<(MbMove, Mailbox)> {
        self.pseudo_moves()
            .into_iter()
            .filter_map(|m| {
                let next = self.make(m);
                (!next.attacked(next.king(self.side), -self.side)).then_some((m, next))
            })
            .collect()
    }

    /// Legal moves in UCI notation, sorted.
    pub fn legal_uci(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .legal()
            .into_iter()
            .map(|(m, _)| {
                let promo = match m.promo {
                    0 => String::new(),
                    p => ["", "", "n", "b", "r", "q"][p as usize].to_string(),
                };
                format!("{}{}{promo}", sq_name(m.from), sq_name(m.to))
            })
            .collect();
        v.sort();
        v
    }

    pub fn perft(&self, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        self.legal().iter().map(|(_, next)| next.perft(depth - 1)).sum()
    }
}

pub fn engine_uci(p: &Position) -> Vec<String> {
    let mut v: Vec<String> = p.generate_moves().iter().map(|m| m.uci()).collect();
    v.sort();
    v
}

// ---------------------------------------------------------------------------
// Plain negamax: no pruning, no table, same extensions and quiescence rules
// ---------------------------------------------------------------------------

fn terminal(p: &Position, ply: u32) -> f64 {
    if p.in_check() {
        -(MATE - ply as f64)
    } else {
        0.0
    }
}

fn static_for_mover(p: &Position, root: Color, w: &FeatureVector) -> f64 {
    let v = evaluate(&extract_features(p, root), w);
    if p.side_to_move() == root {
        v
    } else {
        -v
    }
}

fn qs(p: &Position, root: Color, w: &FeatureVector, params: &SearchParams, qs_ply: u32, ply: u32) -> f64 {
    let moves = p.generate_moves();
    if moves.is_empty() {
        return terminal(p, ply);
    }
    if qs_ply >= params.qs_depth_cap {
        return static_for_mover(p, root, w);
    }
    let in_check = p.in_check();
    let checks_too = qs_ply == 0 && params.qs_first_ply_checks;
    let mut best = if in_check { f64::NEG_INFINITY } else { static_for_mover(p, root, w) };
    for m in moves {
        let child = p.apply_move(m).unwrap();
        if in_check || m.is_capture() || (checks_too && child.in_check()) {
            best = best.max(-qs(&child, root, w, params, qs_ply + 1, ply + 1));
        }
    }
    best
}

fn negamax(p: &Position, root: Color, w: &FeatureVector, params: &SearchParams, depth: u32, ply: u32, ext: u32) -> f64 {
    let moves = p.generate_moves();
    if moves.is_empty() {
        return terminal(p, ply);
    }
    if depth == 0 {
        return if params.quiescence { qs(p, root, w, params, 0, ply) } else { static_for_mover(p, root, w) };
    }
    let mut best = f64::NEG_INFINITY;
    for m in moves {
        let child = p.apply_move(m).unwrap();
        let e = (params.check_extension && ext < params.max_extensions && child.in_check()) as u32;
        best = best.max(-negamax(&child, root, w, params, depth - 1 + e, ply + 1, ext + e));
    }
    best
}

/// Full-width minimax value of `p` from its mover's side. Exponential in the
/// quiescence cap; keep `params.qs_depth_cap` small on tactical positions.
pub fn negamax_value(p: &Position, w: &FeatureVector, params: &SearchParams) -> f64 {
    negamax(p, p.side_to_move(), w, params, params.depth, 0, 0)
}

/// Quiescence value of `p` entered at `qs_ply`.
pub fn quiescence_value(p: &Position, w: &FeatureVector, params: &SearchParams, qs_ply: u32) -> f64 {
    qs(p, p.side_to_move(), w, params, qs_ply, 0)
}

/// Parameters for comparisons against [`negamax_value`]: the defaults with
/// the quiescence cap lowered so the unpruned tree stays tractable.
pub fn oracle_params(depth: u32) -> SearchParams {
    SearchParams { depth, qs_depth_cap: 2, ..Default::default() }
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

/// Non-terminal positions reached by random play from the start and from
/// the tactical suite.
pub fn random_positions(n: usize, seed: u64) -> Vec<Position> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut p = if rng.gen_bool(0.7) {
            Position::startpos()
        } else {
            Position::from_fen(TACTICAL_FENS.choose(&mut rng).unwrap()).unwrap()
        };
        let plies = rng.gen_range(4..40);
        for _ in 0..plies {
            let moves = p.generate_moves();
            let Some(&m) = moves.choose(&mut rng) else { break };
            p = p.apply_move(m).unwrap();
        }
        if !p.generate_moves().is_empty() {
            out.push(p);
        }
    }
    out
}

/// A record of exactly `plies` random moves, retrying seeds until no game
/// ends early.
pub fn random_game(white: &str, black: &str, plies: usize, seed: u64) -> GameRecord {
    for attempt in 0.. {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let mut p = Position::startpos();
        let mut moves = Vec::new();
        while moves.len() < plies {
            let Some(&m) = p.generate_moves().choose(&mut rng) else { break };
            p = p.apply_move(m).unwrap();
            moves.push(m);
        }
        if moves.len() == plies {
            return GameRecord::from_moves(white, black, moves).unwrap();
        }
    }
    unreachable!()
}

/// A weight vector with every non-material weight drawn from `[0, 2)`.
pub fn random_weights(rng: &mut impl Rng) -> FeatureVector {
    let mut w = [1.0; NUM_FEATURES];
    for x in w.iter_mut().skip(1) {
        *x = rng.gen_range(0.0..2.0);
    }
    FeatureVector::new(w).unwrap()
}

/// Thirty ply of a closed Ruy Lopez.
pub const RUY_LOPEZ_30: &str = "[White \"Alpha\"]\n[Black \"Beta\"]\n\n\
1. e4 e5 2. Nf3 Nc6 3. Bb5 a6 4. Ba4 Nf6 5. O-O Be7 6. Re1 b5 7. Bb3 d6 \
8. c3 O-O 9. h3 Nb8 10. d4 Nbd7 11. c4 c6 12. cxb5 axb5 13. Nc3 Bb7 \
14. Bg5 b4 15. Nb1 h6 *\n";

pub fn fixture_game() -> GameRecord {
    let parsed = parse_pgn(RUY_LOPEZ_30);
    assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
    parsed.games.into_iter().next().unwrap()
}

// ---------------------------------------------------------------------------
// Straight-line TD(0) reference
// ---------------------------------------------------------------------------

pub struct ReferenceRun {
    pub weights: [f64; NUM_FEATURES],
    pub applied: usize,
    pub skipped: usize,
    pub mae: Option<f64>,
}

/// One game of training written directly from the update rules: logistic
/// prediction, delta rule with momentum, sign-based rate adaptation and
/// clamping at zero. Only the searches are shared with the engine.
pub fn reference_train_game(start: &FeatureVector, g: &GameRecord, color: Color, cfg: &LearnerConfig) -> ReferenceRun {
    let mut w = [0.0; NUM_FEATURES];
    w.copy_from_slice(start.as_slice());
    let mut eta = [cfg.eta_init; NUM_FEATURES];
    let mut phi = [0.0; NUM_FEATURES];
    let mut prev = [0.0; NUM_FEATURES];
    let logistic = |v: f64| 1.0 / (1.0 + (-cfg.kappa * v).exp());

    let mut positions = vec![Position::startpos()];
    for &m in &g.moves {
        let next = positions.last().unwrap().apply_move(m).unwrap();
        positions.push(next);
    }

    let mut searcher = Searcher::new(cfg.search.tt_capacity);
    let (mut applied, mut skipped, mut abs_sum) = (0, 0, 0.0);
    for i in 0..positions.len().saturating_sub(2) {
        let s = &positions[i];
        let n = s.fullmove_number();
        if s.side_to_move() != color || n < cfg.start_move || n > cfg.end_move {
            continue;
        }
        let weights = FeatureVector::from_slice(&w).unwrap();
        let here = searcher.search(s, &weights, &cfg.search);
        let next = searcher.search(&positions[i + 2], &weights, &cfg.search);
        if here.is_mate() || next.is_mate() {
            skipped += 1;
            continue;
        }
        let y = logistic(here.value);
        let z = logistic(next.value);
        let v = match here.leaf_kind {
            LeafKind::Static => extract_features(&here.leaf, color).0,
            _ => [0.0; NUM_FEATURES],
        };
        for k in 1..NUM_FEATURES {
            let g = cfg.kappa * y * (1.0 - y) * v[k];
            let f = (z - y) / cfg.kappa * g + cfg.alpha * phi[k];
            let candidate = eta[k] * f;
            let mut rate = eta[k];
            if candidate * prev[k] > 0.0 {
                rate *= cfg.u;
            } else if candidate * prev[k] < 0.0 {
                rate *= cfg.d;
            }
            rate = rate.max(cfg.eta_min).min(cfg.eta_max);
            let delta = rate * f;
            w[k] = (w[k] + delta).max(0.0);
            phi[k] = f;
            eta[k] = rate;
            prev[k] = delta;
        }
        abs_sum += (z - y).abs();
        applied += 1;
    }
    let mae = (applied > 0).then(|| abs_sum / applied as f64);
    ReferenceRun { weights: w, applied, skipped, mae }
}
