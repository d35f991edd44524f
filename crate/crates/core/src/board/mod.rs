//! Bitboard chess representation, legal move generation and move application.
//!
//! Squares use little-endian rank-file mapping: a1 = 0, b1 = 1, ..., h8 = 63.
//! A [`Position`] is a plain `Copy` value; [`Position::apply_move`] returns a new
//! position and never mutates its input.

mod attacks;
mod fen;
mod movegen;
mod zobrist;

use std::fmt;

use thiserror::Error;

pub use fen::{FenError, START_FEN};
pub use movegen::perft;
pub(crate) use movegen::pseudo_mobility as movegen_mobility;

pub type Bitboard = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub const ALL: [Color; 2] = [Color::White, Color::Black];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn opposite(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

impl std::ops::Not for Color {
    type Output = Color;

    fn not(self) -> Color {
        self.opposite()
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::White => "white",
            Color::Black => "black",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PieceKind {
    Pawn,
    Knight,
    Bishop,
    Rook,
    Queen,
    King,
}

impl PieceKind {
    pub const ALL: [PieceKind; 6] = [
        PieceKind::Pawn,
        PieceKind::Knight,
        PieceKind::Bishop,
        PieceKind::Rook,
        PieceKind::Queen,
        PieceKind::King,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> PieceKind {
        Self::ALL[i]
    }

    /// Upper-case SAN/FEN letter; pawns are `P`.
    pub fn letter(self) -> char {
        match self {
            PieceKind::Pawn => 'P',
            PieceKind::Knight => 'N',
            PieceKind::Bishop => 'B',
            PieceKind::Rook => 'R',
            PieceKind::Queen => 'Q',
            PieceKind::King => 'K',
        }
    }

    pub fn from_letter(c: char) -> Option<PieceKind> {
        Some(match c.to_ascii_uppercase() {
            'P' => PieceKind::Pawn,
            'N' => PieceKind::Knight,
            'B' => PieceKind::Bishop,
            'R' => PieceKind::Rook,
            'Q' => PieceKind::Queen,
            'K' => PieceKind::King,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Square(u8);

impl Square {
    #[inline]
    pub const fn new(index: u8) -> Square {
        debug_assert!(index < 64);
        Square(index)
    }

    #[inline]
    pub const fn from_coords(file: u8, rank: u8) -> Square {
        Square(rank * 8 + file)
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    /// 0 = a-file.
    #[inline]
    pub const fn file(self) -> u8 {
        self.0 & 7
    }

    /// 0 = first rank.
    #[inline]
    pub const fn rank(self) -> u8 {
        self.0 >> 3
    }

    #[inline]
    pub const fn bb(self) -> Bitboard {
        1u64 << self.0
    }

    /// Same file, rank reflected (a1 <-> a8).
    #[inline]
    pub const fn flip_rank(self) -> Square {
        Square(self.0 ^ 56)
    }

    pub fn parse(s: &str) -> Option<Square> {
        let b = s.as_bytes();
        if b.len() != 2 {
            return None;
        }
        let file = b[0].wrapping_sub(b'a');
        let rank = b[1].wrapping_sub(b'1');
        (file < 8 && rank < 8).then(|| Square::from_coords(file, rank))
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'a' + self.file()) as char, (b'1' + self.rank()) as char)
    }
}

/// Iterator over the set squares of a bitboard, lowest first.
pub struct Squares(Bitboard);

impl Iterator for Squares {
    type Item = Square;

    #[inline]
    fn next(&mut self) -> Option<Square> {
        if self.0 == 0 {
            return None;
        }
        let sq = self.0.trailing_zeros() as u8;
        self.0 &= self.0 - 1;
        Some(Square(sq))
    }
}

#[inline]
pub fn squares(bb: Bitboard) -> Squares {
    Squares(bb)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MoveFlags(u8);

impl MoveFlags {
    pub const QUIET: MoveFlags = MoveFlags(0);
    pub const CAPTURE: MoveFlags = MoveFlags(1);
    pub const EN_PASSANT: MoveFlags = MoveFlags(2);
    pub const CASTLE: MoveFlags = MoveFlags(4);
    pub const DOUBLE_PUSH: MoveFlags = MoveFlags(8);

    #[inline]
    pub fn contains(self, other: MoveFlags) -> bool {
        self.0 & other.0 == other.0
    }
}

impl std::ops::BitOr for MoveFlags {
    type Output = MoveFlags;

    fn bitor(self, rhs: MoveFlags) -> MoveFlags {
        MoveFlags(self.0 | rhs.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub from: Square,
    pub to: Square,
    pub promotion: Option<PieceKind>,
    pub flags: MoveFlags,
}

impl Move {
    /// Captures include en passant.
    #[inline]
    pub fn is_capture(&self) -> bool {
        self.flags.contains(MoveFlags::CAPTURE)
    }

    #[inline]
    pub fn is_castle(&self) -> bool {
        self.flags.contains(MoveFlags::CASTLE)
    }

    #[inline]
    pub fn is_en_passant(&self) -> bool {
        self.flags.contains(MoveFlags::EN_PASSANT)
    }

    /// Long algebraic (UCI) spelling, e.g. `e7e8q`.
    pub fn uci(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.from, self.to)?;
        if let Some(p) = self.promotion {
            write!(f, "{}", p.letter().to_ascii_lowercase())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CastlingRights(u8);

impl CastlingRights {
    pub const NONE: CastlingRights = CastlingRights(0);
    pub const WHITE_KING: CastlingRights = CastlingRights(1);
    pub const WHITE_QUEEN: CastlingRights = CastlingRights(2);
    pub const BLACK_KING: CastlingRights = CastlingRights(4);
    pub const BLACK_QUEEN: CastlingRights = CastlingRights(8);
    pub const ALL: CastlingRights = CastlingRights(15);

    #[inline]
    pub fn bits(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn has(self, r: CastlingRights) -> bool {
        self.0 & r.0 != 0
    }

    #[inline]
    pub fn insert(&mut self, r: CastlingRights) {
        self.0 |= r.0;
    }

    #[inline]
    pub fn remove(&mut self, r: CastlingRights) {
        self.0 &= !r.0;
    }

    pub fn king_side(color: Color) -> CastlingRights {
        match color {
            Color::White => Self::WHITE_KING,
            Color::Black => Self::BLACK_KING,
        }
    }

    pub fn queen_side(color: Color) -> CastlingRights {
        match color {
            Color::White => Self::WHITE_QUEEN,
            Color::Black => Self::BLACK_QUEEN,
        }
    }

    /// Rights with colours exchanged.
    pub fn swapped(self) -> CastlingRights {
        CastlingRights(((self.0 & 3) << 2) | ((self.0 >> 2) & 3))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PositionError {
    #[error("{0} has {1} kings (exactly one required)")]
    KingCount(Color, u32),
    #[error("pawn on back rank at {0}")]
    PawnOnBackRank(Square),
    #[error("en-passant square {0} is not on the third or sixth rank")]
    BadEnPassant(Square),
    #[error("side not to move ({0}) is in check")]
    OpponentInCheck(Color),
    #[error("fullmove number must be at least 1")]
    FullmoveZero,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("illegal move {mv} in position {fen}")]
pub struct IllegalMove {
    pub mv: Move,
    pub fen: String,
}

/// Full chess state: twelve piece bitboards plus side to move, castling rights,
/// en-passant target and move clocks.
///
/// `castled` records whether each side has castled during the game; it feeds
/// the king-safety evaluation feature. Positions read from FEN have no history,
/// so the flag is inferred from king and rook placement there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Position {
    pieces: [[Bitboard; 6]; 2],
    side_to_move: Color,
    castling: CastlingRights,
    en_passant: Option<Square>,
    halfmove_clock: u32,
    fullmove_number: u32,
    castled: [bool; 2],
    key: u64,
}

impl Default for Position {
    fn default() -> Self {
        Position::startpos()
    }
}

impl Position {
    pub fn startpos() -> Position {
        Position::from_fen(START_FEN).expect("start FEN is valid")
    }

    pub(crate) fn empty() -> Position {
        Position {
            pieces: [[0; 6]; 2],
            side_to_move: Color::White,
            castling: CastlingRights::NONE,
            en_passant: None,
            halfmove_clock: 0,
            fullmove_number: 1,
            castled: [false; 2],
            key: 0,
        }
    }

    #[inline]
    pub fn side_to_move(&self) -> Color {
        self.side_to_move
    }

    #[inline]
    pub fn castling_rights(&self) -> CastlingRights {
        self.castling
    }

    #[inline]
    pub fn en_passant(&self) -> Option<Square> {
        self.en_passant
    }

    #[inline]
    pub fn halfmove_clock(&self) -> u32 {
        self.halfmove_clock
    }

    #[inline]
    pub fn fullmove_number(&self) -> u32 {
        self.fullmove_number
    }

    /// Whether `color` has castled in the game leading to this position.
    #[inline]
    pub fn has_castled(&self, color: Color) -> bool {
        self.castled[color.index()]
    }

    /// 64-bit Zobrist key. Maintained incrementally by [`Position::apply_move`].
    #[inline]
    pub fn hash(&self) -> u64 {
        self.key
    }

    #[inline]
    pub fn pieces(&self, color: Color, kind: PieceKind) -> Bitboard {
        self.pieces[color.index()][kind.index()]
    }

    #[inline]
    pub fn occupied_by(&self, color: Color) -> Bitboard {
        let p = &self.pieces[color.index()];
        p[0] | p[1] | p[2] | p[3] | p[4] | p[5]
    }

    #[inline]
    pub fn occupied(&self) -> Bitboard {
        self.occupied_by(Color::White) | self.occupied_by(Color::Black)
    }

    pub fn piece_at(&self, sq: Square) -> Option<(Color, PieceKind)> {
        let bb = sq.bb();
        for color in Color::ALL {
            for kind in PieceKind::ALL {
                if self.pieces[color.index()][kind.index()] & bb != 0 {
                    return Some((color, kind));
                }
            }
        }
        None
    }

    #[inline]
    pub fn king_square(&self, color: Color) -> Square {
        Square(self.pieces(color, PieceKind::King).trailing_zeros() as u8)
    }

    pub fn is_square_attacked(&self, sq: Square, by: Color) -> bool {
        attacks::is_attacked(self, sq, by, self.occupied())
    }

    pub fn in_check(&self) -> bool {
        let us = self.side_to_move;
        self.is_square_attacked(self.king_square(us), !us)
    }

    /// Fifty-move rule reached. Tracked only; never terminal in search.
    pub fn is_fifty_move_draw(&self) -> bool {
        self.halfmove_clock >= 100
    }

    /// Legal moves for the side to move, ordered by from-square, then
    /// to-square, then promotion piece (knight < bishop < rook < queen).
    pub fn generate_moves(&self) -> Vec<Move> {
        movegen::legal_moves(self)
    }

    /// Successor position after a legal move.
    pub fn apply_move(&self, mv: Move) -> Result<Position, IllegalMove> {
        if !self.generate_moves().contains(&mv) {
            return Err(IllegalMove { mv, fen: self.to_fen() });
        }
        Ok(self.make_move(mv))
    }

    /// Finds the legal move matching `from`/`to`/`promotion`, ignoring flags.
    pub fn find_move(&self, from: Square, to: Square, promotion: Option<PieceKind>) -> Option<Move> {
        self.generate_moves()
            .into_iter()
            .find(|m| m.from == from && m.to == to && m.promotion == promotion)
    }

    /// Parses a UCI move string (`e2e4`, `e7e8q`) against the legal moves.
    pub fn parse_uci(&self, s: &str) -> Option<Move> {
        if s.len() < 4 || s.len() > 5 {
            return None;
        }
        let from = Square::parse(s.get(0..2)?)?;
        let to = Square::parse(s.get(2..4)?)?;
        let promo = match s.get(4..5) {
            Some(c) => Some(PieceKind::from_letter(c.chars().next()?)?),
            None => None,
        };
        self.find_move(from, to, promo)
    }

    /// Applies a move known to be legal (pseudo-legal moves also work, but the
    /// result may leave the mover in check).
    pub(crate) fn make_move(&self, mv: Move) -> Position {
        let keys = zobrist::keys();
        let mut next = *self;
        let us = self.side_to_move;
        let them = !us;
        let (_, kind) = self.piece_at(mv.from).expect("move from an empty square");

        next.key ^= keys.castling[self.castling.bits() as usize];
        if let Some(ep) = self.en_passant {
            next.key ^= keys.en_passant[ep.file() as usize];
        }
        next.en_passant = None;

        if mv.is_en_passant() {
            let cap = Square::from_coords(mv.to.file(), mv.from.rank());
            next.toggle(them, PieceKind::Pawn, cap);
        } else if let Some((_, captured)) = self.piece_at(mv.to) {
            next.toggle(them, captured, mv.to);
        }

        next.toggle(us, kind, mv.from);
        next.toggle(us, mv.promotion.unwrap_or(kind), mv.to);

        if mv.is_castle() {
            let rank = mv.from.rank();
            let (rook_from, rook_to) = if mv.to.file() == 6 {
                (Square::from_coords(7, rank), Square::from_coords(5, rank))
            } else {
                (Square::from_coords(0, rank), Square::from_coords(3, rank))
            };
            next.toggle(us, PieceKind::Rook, rook_from);
            next.toggle(us, PieceKind::Rook, rook_to);
            if !next.castled[us.index()] {
                next.castled[us.index()] = true;
                next.key ^= keys.castled[us.index()];
            }
        }

        if mv.flags.contains(MoveFlags::DOUBLE_PUSH) {
            let ep = Square::from_coords(mv.from.file(), (mv.from.rank() + mv.to.rank()) / 2);
            next.en_passant = Some(ep);
            next.key ^= keys.en_passant[ep.file() as usize];
        }

        for sq in [mv.from, mv.to] {
            next.castling.remove(CastlingRights(castle_mask(sq)));
        }
        next.key ^= keys.castling[next.castling.bits() as usize];

        next.halfmove_clock = if kind == PieceKind::Pawn || mv.is_capture() {
            0
        } else {
            self.halfmove_clock + 1
        };
        if us == Color::Black {
            next.fullmove_number += 1;
        }
        next.side_to_move = them;
        next.key ^= keys.side;
        next
    }

    #[inline]
    fn toggle(&mut self, color: Color, kind: PieceKind, sq: Square) {
        self.pieces[color.index()][kind.index()] ^= sq.bb();
        self.key ^= zobrist::keys().piece[color.index()][kind.index()][sq.index()];
    }

    /// Colour-and-rank reflection: white pieces become black pieces on the
    /// mirrored rank, side to move, castling rights and castled flags swap.
    pub fn mirror(&self) -> Position {
        let mut m = Position::empty();
        for color in Color::ALL {
            for kind in PieceKind::ALL {
                m.pieces[(!color).index()][kind.index()] = self.pieces(color, kind).swap_bytes();
            }
        }
        m.side_to_move = !self.side_to_move;
        m.castling = self.castling.swapped();
        m.en_passant = self.en_passant.map(Square::flip_rank);
        m.halfmove_clock = self.halfmove_clock;
        m.fullmove_number = self.fullmove_number;
        m.castled = [self.castled[1], self.castled[0]];
        m.key = m.compute_key();
        m
    }

    /// Zobrist key recomputed from scratch.
    pub fn compute_key(&self) -> u64 {
        let keys = zobrist::keys();
        let mut key = 0;
        for color in Color::ALL {
            for kind in PieceKind::ALL {
                for sq in squares(self.pieces(color, kind)) {
                    key ^= keys.piece[color.index()][kind.index()][sq.index()];
                }
            }
        }
        key ^= keys.castling[self.castling.bits() as usize];
        if let Some(ep) = self.en_passant {
            key ^= keys.en_passant[ep.file() as usize];
        }
        if self.side_to_move == Color::Black {
            key ^= keys.side;
        }
        for color in Color::ALL {
            if self.castled[color.index()] {
                key ^= keys.castled[color.index()];
            }
        }
        key
    }

    /// Checks every structural invariant a legal position must satisfy.
    pub fn validate(&self) -> Result<(), PositionError> {
        for color in Color::ALL {
            let kings = self.pieces(color, PieceKind::King).count_ones();
            if kings != 1 {
                return Err(PositionError::KingCount(color, kings));
            }
        }
        const BACK_RANKS: Bitboard = 0xFF00_0000_0000_00FF;
        let pawns = self.pieces(Color::White, PieceKind::Pawn) | self.pieces(Color::Black, PieceKind::Pawn);
        if let Some(sq) = squares(pawns & BACK_RANKS).next() {
            return Err(PositionError::PawnOnBackRank(sq));
        }
        if let Some(ep) = self.en_passant {
            let expected = if self.side_to_move == Color::White { 5 } else { 2 };
            if ep.rank() != expected {
                return Err(PositionError::BadEnPassant(ep));
            }
        }
        let them = !self.side_to_move;
        if self.is_square_attacked(self.king_square(them), self.side_to_move) {
            return Err(PositionError::OpponentInCheck(them));
        }
        if self.fullmove_number == 0 {
            return Err(PositionError::FullmoveZero);
        }
        Ok(())
    }

    pub fn piece_count(&self) -> u32 {
        self.occupied().count_ones()
    }
}

/// Castling rights lost when a piece moves from or to `sq`.
fn castle_mask(sq: Square) -> u8 {
    match sq.index() {
        0 => CastlingRights::WHITE_QUEEN.0,
        7 => CastlingRights::WHITE_KING.0,
        4 => CastlingRights::WHITE_KING.0 | CastlingRights::WHITE_QUEEN.0,
        56 => CastlingRights::BLACK_QUEEN.0,
        63 => CastlingRights::BLACK_KING.0,
        60 => CastlingRights::BLACK_KING.0 | CastlingRights::BLACK_QUEEN.0,
        _ => 0,
    }
}
