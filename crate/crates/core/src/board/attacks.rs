//! Attack tables. Leapers are precomputed; sliders use precomputed rays
//! truncated at the first blocker.

use std::sync::OnceLock;

use super::{Bitboard, Color, PieceKind, Position, Square};

// Direction order: N, NE, E, NW, S, SW, W, SE. The first four increase the
// square index, the last four decrease it.
const DIRS: [(i8, i8); 8] = [(0, 1), (1, 1), (1, 0), (-1, 1), (0, -1), (-1, -1), (-1, 0), (1, -1)];
const ROOK_DIRS: [usize; 4] = [0, 2, 4, 6];
const BISHOP_DIRS: [usize; 4] = [1, 3, 5, 7];

struct Tables {
    knight: [Bitboard; 64],
    king: [Bitboard; 64],
    pawn: [[Bitboard; 64]; 2],
    rays: [[Bitboard; 64]; 8],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(build)
}

fn offset(sq: usize, df: i8, dr: i8) -> Option<usize> {
    let f = (sq % 8) as i8 + df;
    let r = (sq / 8) as i8 + dr;
    ((0..8).contains(&f) && (0..8).contains(&r)).then(|| (r * 8 + f) as usize)
}

fn build() -> Tables {
    let mut t = Tables {
        knight: [0; 64],
        king: [0; 64],
        pawn: [[0; 64]; 2],
        rays: [[0; 64]; 8],
    };
    let knight_steps = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)];
    for sq in 0..64 {
        for (df, dr) in knight_steps {
            if let Some(to) = offset(sq, df, dr) {
                t.knight[sq] |= 1 << to;
            }
        }
        for (df, dr) in DIRS {
            if let Some(to) = offset(sq, df, dr) {
                t.king[sq] |= 1 << to;
            }
        }
        for df in [-1, 1] {
            if let Some(to) = offset(sq, df, 1) {
                t.pawn[Color::White.index()][sq] |= 1 << to;
            }
            if let Some(to) = offset(sq, df, -1) {
                t.pawn[Color::Black.index()][sq] |= 1 << to;
            }
        }
        for (d, (df, dr)) in DIRS.iter().enumerate() {
            let mut cur = sq;
            while let Some(to) = offset(cur, *df, *dr) {
                t.rays[d][sq] |= 1 << to;
                cur = to;
            }
        }
    }
    t
}

#[inline]
fn ray_attacks(dir: usize, sq: usize, occ: Bitboard) -> Bitboard {
    let rays = &tables().rays[dir];
    let ray = rays[sq];
    let blockers = ray & occ;
    if blockers == 0 {
        return ray;
    }
    let first = if dir < 4 {
        blockers.trailing_zeros() as usize
    } else {
        63 - blockers.leading_zeros() as usize
    };
    ray ^ rays[first]
}

#[inline]
pub fn knight(sq: Square) -> Bitboard {
    tables().knight[sq.index()]
}

#[inline]
pub fn king(sq: Square) -> Bitboard {
    tables().king[sq.index()]
}

/// Squares attacked by a pawn of `color` standing on `sq`.
#[inline]
pub fn pawn(color: Color, sq: Square) -> Bitboard {
    tables().pawn[color.index()][sq.index()]
}

#[inline]
pub fn rook(sq: Square, occ: Bitboard) -> Bitboard {
    ROOK_DIRS.iter().fold(0, |acc, &d| acc | ray_attacks(d, sq.index(), occ))
}

#[inline]
pub fn bishop(sq: Square, occ: Bitboard) -> Bitboard {
    BISHOP_DIRS.iter().fold(0, |acc, &d| acc | ray_attacks(d, sq.index(), occ))
}

#[inline]
pub fn queen(sq: Square, occ: Bitboard) -> Bitboard {
    rook(sq, occ) | bishop(sq, occ)
}

pub fn piece(kind: PieceKind, color: Color, sq: Square, occ: Bitboard) -> Bitboard {
    match kind {
        PieceKind::Pawn => pawn(color, sq),
        PieceKind::Knight => knight(sq),
        PieceKind::Bishop => bishop(sq, occ),
        PieceKind::Rook => rook(sq, occ),
        PieceKind::Queen => queen(sq, occ),
        PieceKind::King => king(sq),
    }
}

pub fn is_attacked(p: &Position, sq: Square, by: Color, occ: Bitboard) -> bool {
    let queens = p.pieces(by, PieceKind::Queen);
    pawn(!by, sq) & p.pieces(by, PieceKind::Pawn) != 0
        || knight(sq) & p.pieces(by, PieceKind::Knight) != 0
        || king(sq) & p.pieces(by, PieceKind::King) != 0
        || rook(sq, occ) & (p.pieces(by, PieceKind::Rook) | queens) != 0
        || bishop(sq, occ) & (p.pieces(by, PieceKind::Bishop) | queens) != 0
}
