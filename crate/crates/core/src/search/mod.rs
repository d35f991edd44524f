//! Fixed-depth NegaScout search with quiescence, check extensions and a
//! transposition table.
//!
//! Values are always measured by the root mover's evaluation function: a node
//! where the opponent is to move scores `-V_root(p)`. This makes the search a
//! zero-sum game over the root mover's evaluation even though some features
//! (pawn structures, doubled pawns) are not antisymmetric between the sides.
//!
//! Bounds are fail-hard. Together with exact-state transposition hits, that
//! makes the returned value and best move identical to a full-width negamax
//! over the same tree; NegaScout and the table only save nodes.

mod tt;

use crate::board::{Color, Move, PieceKind, Position};
use crate::eval::{evaluate, extract_features, FeatureValues, FeatureVector};

pub use tt::{Bound, Entry, TranspositionTable};

/// Checkmate score at the root; mate in `n` ply scores `MATE - n`.
pub const MATE: f64 = 1.0e7;
/// Any value at least this large in magnitude is a mate score.
pub const MATE_THRESHOLD: f64 = MATE - 1000.0;

#[inline]
pub fn is_mate_score(v: f64) -> bool {
    v.abs() >= MATE_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SearchParams {
    pub depth: u32,
    pub quiescence: bool,
    /// Also search checking non-captures at the first quiescence ply.
    pub qs_first_ply_checks: bool,
    pub qs_depth_cap: u32,
    pub check_extension: bool,
    /// Cap on check extensions along one path.
    pub max_extensions: u32,
    /// Entries; 0 disables the table.
    pub tt_capacity: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            depth: 3,
            quiescence: true,
            qs_first_ply_checks: true,
            qs_depth_cap: 8,
            check_extension: true,
            max_extensions: 2,
            tt_capacity: 1 << 16,
        }
    }
}

impl SearchParams {
    pub fn with_depth(depth: u32) -> Self {
        SearchParams { depth, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.depth == 0 {
            return Err("search depth must be at least 1".into());
        }
        if self.depth > 60 {
            return Err(format!("search depth {} is unreasonable", self.depth));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafKind {
    /// The value is the static evaluation of the leaf.
    Static,
    Checkmate,
    Stalemate,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    /// From the root mover's perspective.
    pub value: f64,
    pub best_move: Option<Move>,
    pub pv: Vec<Move>,
    /// Position reached by replaying `pv` from the root.
    pub leaf: Position,
    pub leaf_kind: LeafKind,
    pub nodes: u64,
}

impl SearchResult {
    pub fn is_mate(&self) -> bool {
        is_mate_score(self.value)
    }

    /// `∂value/∂w` for every weight: the leaf's features from the root
    /// mover's side, or zeros when the PV ends in a terminal position (whose
    /// score does not depend on the weights).
    pub fn leaf_features(&self, root_mover: Color) -> FeatureValues {
        match self.leaf_kind {
            LeafKind::Static => extract_features(&self.leaf, root_mover),
            _ => FeatureValues::zeros(),
        }
    }
}

struct Ctx {
    weights: FeatureVector,
    params: SearchParams,
    root: Color,
    root_key: u64,
}

/// One search instance with its own transposition table. Single-threaded;
/// create one per worker.
pub struct Searcher {
    tt: Option<TranspositionTable>,
    nodes: u64,
}

impl Default for Searcher {
    fn default() -> Self {
        Searcher::new(SearchParams::default().tt_capacity)
    }
}

const PERSPECTIVE_KEY: u64 = 0x9D3B_7A1F_44C2_E805;

#[inline]
fn null_width(alpha: f64) -> f64 {
    1e-9 * alpha.abs().max(1.0)
}

#[inline]
fn clamp_hard(v: f64, alpha: f64, beta: f64) -> f64 {
    if v <= alpha {
        alpha
    } else if v >= beta {
        beta
    } else {
        v
    }
}

fn fingerprint(w: &FeatureVector, params: &SearchParams) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    let mut mix = |x: u64| {
        h ^= x;
        h = h.wrapping_mul(0x100_0000_01b3);
    };
    for &x in w.as_slice() {
        mix(x.to_bits());
    }
    mix(params.depth as u64);
    mix(params.quiescence as u64);
    mix(params.qs_first_ply_checks as u64);
    mix(params.qs_depth_cap as u64);
    mix(params.check_extension as u64);
    mix(params.max_extensions as u64);
    h
}

/// Captures first by most-valuable-victim / least-valuable-attacker, then the
/// rest; ties keep generation order (from-square, to-square).
pub fn order_moves(p: &Position, moves: &mut [Move]) {
    moves.sort_by_key(|m| {
        if m.is_capture() {
            let victim = if m.is_en_passant() {
                PieceKind::Pawn
            } else {
                p.piece_at(m.to).map(|(_, k)| k).unwrap_or(PieceKind::Pawn)
            };
            let attacker = p.piece_at(m.from).map(|(_, k)| k).unwrap_or(PieceKind::Pawn);
            (0, 5 - victim.index() as i32, attacker.index() as i32)
        } else {
            (1, 0, 0)
        }
    });
}

impl Searcher {
    pub fn new(tt_capacity: usize) -> Self {
        Searcher {
            tt: (tt_capacity > 0).then(|| TranspositionTable::new(tt_capacity)),
            nodes: 0,
        }
    }

    pub fn without_tt() -> Self {
        Searcher::new(0)
    }

    /// Starts a search under `w`/`params`. The weight fingerprint is mixed
    /// into every table key, so entries from other weights never match and
    /// the table needs no clearing.
    fn prepare(&mut self, w: &FeatureVector, params: &SearchParams, root: Color) -> Ctx {
        if let Some(tt) = &mut self.tt {
            tt.new_generation();
        }
        self.nodes = 0;
        let perspective = if root == Color::White { 0 } else { PERSPECTIVE_KEY };
        Ctx { weights: *w, params: params.clone(), root, root_key: fingerprint(w, params) ^ perspective }
    }

    /// Searches `p` to `params.depth` ply under weights `w`.
    pub fn search(&mut self, p: &Position, w: &FeatureVector, params: &SearchParams) -> SearchResult {
        let ctx = self.prepare(w, params, p.side_to_move());
        let mut pv = Vec::new();
        let value = self.node(&ctx, p, params.depth, 0, 0, f64::NEG_INFINITY, f64::INFINITY, true, &mut pv);
        self.finish(p, value, pv)
    }

    /// Full-window value of every legal root move, in generation order,
    /// each from the root mover's perspective.
    pub fn root_move_values(&mut self, p: &Position, w: &FeatureVector, params: &SearchParams) -> Vec<(Move, f64)> {
        let ctx = self.prepare(w, params, p.side_to_move());
        let mut pv = Vec::new();
        p.generate_moves()
            .into_iter()
            .map(|m| {
                let child = p.make_move(m);
                let ext = self.extension(&ctx, &child, 0);
                let depth = params.depth - 1 + ext;
                let v = -self.node(&ctx, &child, depth, 1, ext, f64::NEG_INFINITY, f64::INFINITY, true, &mut pv);
                (m, v)
            })
            .collect()
    }

    /// Quiescence search of `p` as a frontier node, from its mover's side.
    pub fn quiescence(
        &mut self,
        p: &Position,
        alpha: f64,
        beta: f64,
        w: &FeatureVector,
        params: &SearchParams,
        qs_ply: u32,
    ) -> SearchResult {
        let ctx = self.prepare(w, params, p.side_to_move());
        let mut pv = Vec::new();
        let value = self.qsearch(&ctx, p, qs_ply, 0, alpha, beta, &mut pv);
        self.finish(p, value, pv)
    }

    fn finish(&self, root: &Position, value: f64, pv: Vec<Move>) -> SearchResult {
        let leaf = pv.iter().fold(*root, |p, &m| p.make_move(m));
        let leaf_kind = if !leaf.generate_moves().is_empty() {
            LeafKind::Static
        } else if leaf.in_check() {
            LeafKind::Checkmate
        } else {
            LeafKind::Stalemate
        };
        SearchResult { value, best_move: pv.first().copied(), pv, leaf, leaf_kind, nodes: self.nodes }
    }

    /// Static evaluation of `p`, signed for the side to move at `p`.
    fn static_eval(&self, ctx: &Ctx, p: &Position) -> f64 {
        let v = evaluate(&extract_features(p, ctx.root), &ctx.weights);
        if p.side_to_move() == ctx.root {
            v
        } else {
            -v
        }
    }

    fn extension(&self, ctx: &Ctx, child: &Position, used: u32) -> u32 {
        (ctx.params.check_extension && used < ctx.params.max_extensions && child.in_check()) as u32
    }

    #[allow(clippy::too_many_arguments)]
    fn node(
        &mut self,
        ctx: &Ctx,
        p: &Position,
        depth: u32,
        ply: u32,
        extensions: u32,
        mut alpha: f64,
        beta: f64,
        is_pv: bool,
        pv: &mut Vec<Move>,
    ) -> f64 {
        self.nodes += 1;
        pv.clear();
        let mut moves = p.generate_moves();
        if moves.is_empty() {
            let v = if p.in_check() { -(MATE - ply as f64) } else { 0.0 };
            return clamp_hard(v, alpha, beta);
        }
        if depth == 0 {
            return if ctx.params.quiescence {
                self.qsearch_with(ctx, p, moves, 0, ply, alpha, beta, pv)
            } else {
                clamp_hard(self.static_eval(ctx, p), alpha, beta)
            };
        }

        let key = p.hash() ^ ctx.root_key;
        let (tt_depth, tt_ext) = (depth.min(255) as u8, extensions.min(255) as u8);
        if !is_pv {
            if let Some(e) = self.tt.as_ref().and_then(|tt| tt.probe(key, tt_depth, tt_ext)) {
                match e.bound {
                    Bound::Exact => return clamp_hard(e.value, alpha, beta),
                    Bound::Lower if e.value >= beta => return beta,
                    Bound::Upper if e.value <= alpha => return alpha,
                    _ => {}
                }
            }
        }

        order_moves(p, &mut moves);
        let alpha_orig = alpha;
        let mut best_move = None;
        let mut child_pv = Vec::new();
        for (i, &m) in moves.iter().enumerate() {
            let child = p.make_move(m);
            let ext = self.extension(ctx, &child, extensions);
            let d = depth - 1 + ext;
            let e = extensions + ext;
            let score = if i == 0 || !is_pv {
                -self.node(ctx, &child, d, ply + 1, e, -beta, -alpha, is_pv, &mut child_pv)
            } else {
                let probe = alpha + null_width(alpha);
                let s = -self.node(ctx, &child, d, ply + 1, e, -probe, -alpha, false, &mut child_pv);
                if s > alpha && s < beta {
                    -self.node(ctx, &child, d, ply + 1, e, -beta, -alpha, true, &mut child_pv)
                } else {
                    s
                }
            };
            if score >= beta {
                self.store(key, tt_depth, tt_ext, Bound::Lower, beta, Some(m));
                return beta;
            }
            if score > alpha {
                alpha = score;
                best_move = Some(m);
                pv.clear();
                pv.push(m);
                pv.extend_from_slice(&child_pv);
            }
        }
        match best_move {
            Some(m) => self.store(key, tt_depth, tt_ext, Bound::Exact, alpha, Some(m)),
            None => self.store(key, tt_depth, tt_ext, Bound::Upper, alpha_orig, None),
        }
        alpha
    }

    fn store(&mut self, key: u64, depth: u8, extensions: u8, bound: Bound, value: f64, best_move: Option<Move>) {
        // Mate distances depend on the path; keep them out of the table.
        if is_mate_score(value) || !value.is_finite() {
            return;
        }
        if let Some(tt) = &mut self.tt {
            tt.store(Entry { key, depth, extensions, age: 0, bound, value, best_move });
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn qsearch(&mut self, ctx: &Ctx, p: &Position, qs_ply: u32, ply: u32, alpha: f64, beta: f64, pv: &mut Vec<Move>) -> f64 {
        self.nodes += 1;
        pv.clear();
        let moves = p.generate_moves();
        if moves.is_empty() {
            let v = if p.in_check() { -(MATE - ply as f64) } else { 0.0 };
            return clamp_hard(v, alpha, beta);
        }
        self.qsearch_with(ctx, p, moves, qs_ply, ply, alpha, beta, pv)
    }

    /// Quiescence at a node whose (non-empty) legal moves are already known.
    #[allow(clippy::too_many_arguments)]
    fn qsearch_with(
        &mut self,
        ctx: &Ctx,
        p: &Position,
        mut moves: Vec<Move>,
        qs_ply: u32,
        ply: u32,
        mut alpha: f64,
        beta: f64,
        pv: &mut Vec<Move>,
    ) -> f64 {
        pv.clear();
        if qs_ply >= ctx.params.qs_depth_cap {
            return clamp_hard(self.static_eval(ctx, p), alpha, beta);
        }
        let in_check = p.in_check();
        if !in_check {
            let stand_pat = self.static_eval(ctx, p);
            if stand_pat >= beta {
                return beta;
            }
            if stand_pat > alpha {
                alpha = stand_pat;
            }
            let with_checks = qs_ply == 0 && ctx.params.qs_first_ply_checks;
            moves.retain(|&m| m.is_capture() || (with_checks && p.make_move(m).in_check()));
        }
        order_moves(p, &mut moves);

        let mut child_pv = Vec::new();
        for &m in &moves {
            let child = p.make_move(m);
            let score = -self.qsearch(ctx, &child, qs_ply + 1, ply + 1, -beta, -alpha, &mut child_pv);
            if score >= beta {
                return beta;
            }
            if score > alpha {
                alpha = score;
                pv.clear();
                pv.push(m);
                pv.extend_from_slice(&child_pv);
            }
        }
        alpha
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::win_probability;

    fn pos(fen: &str) -> Position {
        Position::from_fen(fen).unwrap()
    }

    fn static_value(p: &Position, root: Color, w: &FeatureVector) -> f64 {
        evaluate(&extract_features(p, root), w)
    }

    #[test]
    fn captures_hanging_queen_at_depth_one() {
        let p = pos("4k3/8/8/3q4/8/8/3R4/4K3 w - - 0 1");
        let w = FeatureVector::uniform();
        let params = SearchParams { depth: 1, ..Default::default() };
        let r = Searcher::default().search(&p, &w, &params);
        assert_eq!(r.best_move.unwrap().uci(), "d2d5");
        assert!(r.value >= 450.0, "{}", r.value);
    }

    #[test]
    fn quiet_position_quiescence_is_static() {
        // No captures and no checks for white.
        let p = pos("4k3/8/8/8/8/8/PP6/K7 w - - 0 1");
        let w = FeatureVector::uniform();
        let params = SearchParams::default();
        let r = Searcher::default().quiescence(&p, f64::NEG_INFINITY, f64::INFINITY, &w, &params, 0);
        assert_eq!(r.value, static_value(&p, Color::White, &w));
        assert!(r.pv.is_empty());
    }

    #[test]
    fn in_check_has_no_stand_pat() {
        // White king in check from a rook; the only legal replies are king moves.
        let p = pos("4k3/8/8/8/8/8/8/r3K3 w - - 0 1");
        let w = FeatureVector::uniform();
        let r = Searcher::default().quiescence(&p, f64::NEG_INFINITY, f64::INFINITY, &w, &SearchParams::default(), 0);
        assert!(!r.pv.is_empty());
    }

    #[test]
    fn leaf_reproduces_value() {
        let w = FeatureVector::uniform();
        for fen in [
            "r1bqkbnr/pppp1ppp/2n5/4p3/4P3/5N2/PPPP1PPP/RNBQKB1R w KQkq - 2 3",
            "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
            "r2q1rk1/pp2bppp/2n1bn2/3p4/3P4/2NBPN2/PP3PPP/R1BQ1RK1 b - - 3 10",
        ] {
            let p = pos(fen);
            let r = Searcher::default().search(&p, &w, &SearchParams::with_depth(2));
            assert_eq!(r.leaf_kind, LeafKind::Static);
            assert_eq!(r.value, static_value(&r.leaf, p.side_to_move(), &w), "{fen}");
        }
    }

    #[test]
    fn finds_mate_in_one() {
        // Back-rank mate: Ra8#.
        let p = pos("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1");
        let r = Searcher::default().search(&p, &FeatureVector::uniform(), &SearchParams::with_depth(2));
        assert!(r.is_mate());
        assert_eq!(r.value, MATE - 1.0);
        assert_eq!(r.best_move.unwrap().uci(), "a1a8");
        assert_eq!(r.leaf_kind, LeafKind::Checkmate);
        assert!(win_probability(r.value, 0.01) == 1.0);
    }

    #[test]
    fn terminal_root() {
        let mate = pos("R5k1/5ppp/8/8/8/8/8/6K1 b - - 0 1");
        let r = Searcher::default().search(&mate, &FeatureVector::uniform(), &SearchParams::default());
        assert_eq!(r.value, -MATE);
        assert!(r.pv.is_empty() && r.best_move.is_none());
        let stale = pos("k7/8/1QK5/8/8/8/8/8 b - - 0 1");
        let r = Searcher::default().search(&stale, &FeatureVector::uniform(), &SearchParams::default());
        assert_eq!(r.value, 0.0);
        assert_eq!(r.leaf_kind, LeafKind::Stalemate);
    }

    #[test]
    fn tt_on_off_identical() {
        let w = FeatureVector::uniform();
        let p = pos("r1bqkb1r/pppp1ppp/2n2n2/4p3/2B1P3/5N2/PPPP1PPP/RNBQK2R w KQkq - 4 4");
        let params = SearchParams::with_depth(3);
        let a = Searcher::default().search(&p, &w, &params);
        let b = Searcher::without_tt().search(&p, &w, &params);
        assert_eq!(a.value, b.value);
        assert_eq!(a.best_move, b.best_move);
        assert!(a.nodes <= b.nodes);
    }

    #[test]
    fn repeated_search_reuses_table() {
        let w = FeatureVector::uniform();
        let p = pos("r1bqkb1r/pppp1ppp/2n2n2/4p3/2B1P3/5N2/PPPP1PPP/RNBQK2R w KQkq - 4 4");
        let params = SearchParams::with_depth(3);
        let mut s = Searcher::default();
        let first = s.search(&p, &w, &params);
        let second = s.search(&p, &w, &params);
        assert_eq!(first.value, second.value);
        assert_eq!(first.best_move, second.best_move);
    }
}
