use super::attacks;
use super::{squares, Bitboard, CastlingRights, Color, Move, MoveFlags, PieceKind, Position, Square};

const RANK_1: Bitboard = 0xFF;
const RANK_8: Bitboard = 0xFF << 56;
const PROMOTIONS: [PieceKind; 4] = [PieceKind::Knight, PieceKind::Bishop, PieceKind::Rook, PieceKind::Queen];

fn push(moves: &mut Vec<Move>, from: Square, to: Square, flags: MoveFlags) {
    moves.push(Move { from, to, promotion: None, flags });
}

fn push_pawn(moves: &mut Vec<Move>, from: Square, to: Square, flags: MoveFlags) {
    if to.bb() & (RANK_1 | RANK_8) != 0 {
        for promo in PROMOTIONS {
            moves.push(Move { from, to, promotion: Some(promo), flags });
        }
    } else {
        push(moves, from, to, flags);
    }
}

/// Pseudo-legal moves of the side to move, including castling and en passant.
pub(crate) fn pseudo_legal(p: &Position, moves: &mut Vec<Move>) {
    let us = p.side_to_move();
    let them = !us;
    let own = p.occupied_by(us);
    let enemy = p.occupied_by(them);
    let occ = own | enemy;

    let forward: i8 = if us == Color::White { 8 } else { -8 };
    let start_rank = if us == Color::White { 1 } else { 6 };
    for from in squares(p.pieces(us, PieceKind::Pawn)) {
        let one = Square::new((from.index() as i8 + forward) as u8);
        if occ & one.bb() == 0 {
            push_pawn(moves, from, one, MoveFlags::QUIET);
            if from.rank() == start_rank {
                let two = Square::new((one.index() as i8 + forward) as u8);
                if occ & two.bb() == 0 {
                    push(moves, from, two, MoveFlags::DOUBLE_PUSH);
                }
            }
        }
        let att = attacks::pawn(us, from);
        for to in squares(att & enemy) {
            push_pawn(moves, from, to, MoveFlags::CAPTURE);
        }
        if let Some(ep) = p.en_passant() {
            if att & ep.bb() != 0 {
                push(moves, from, ep, MoveFlags::CAPTURE | MoveFlags::EN_PASSANT);
            }
        }
    }

    for kind in [PieceKind::Knight, PieceKind::Bishop, PieceKind::Rook, PieceKind::Queen, PieceKind::King] {
        for from in squares(p.pieces(us, kind)) {
            let targets = attacks::piece(kind, us, from, occ) & !own;
            for to in squares(targets) {
                let flags = if enemy & to.bb() != 0 { MoveFlags::CAPTURE } else { MoveFlags::QUIET };
                push(moves, from, to, flags);
            }
        }
    }

    castling(p, us, occ, moves);
}

fn castling(p: &Position, us: Color, occ: Bitboard, moves: &mut Vec<Move>) {
    let rights = p.castling_rights();
    let rank = if us == Color::White { 0 } else { 7 };
    let king_from = Square::from_coords(4, rank);
    if p.pieces(us, PieceKind::King) & king_from.bb() == 0 {
        return;
    }
    let sq = |f| Square::from_coords(f, rank);
    let rooks = p.pieces(us, PieceKind::Rook);
    let safe = |files: &[u8]| files.iter().all(|&f| !p.is_square_attacked(sq(f), !us));

    if rights.has(CastlingRights::king_side(us))
        && rooks & sq(7).bb() != 0
        && occ & (sq(5).bb() | sq(6).bb()) == 0
        && safe(&[4, 5, 6])
    {
        push(moves, king_from, sq(6), MoveFlags::CASTLE);
    }
    if rights.has(CastlingRights::queen_side(us))
        && rooks & sq(0).bb() != 0
        && occ & (sq(1).bb() | sq(2).bb() | sq(3).bb()) == 0
        && safe(&[4, 3, 2])
    {
        push(moves, king_from, sq(2), MoveFlags::CASTLE);
    }
}

pub(crate) fn legal_moves(p: &Position) -> Vec<Move> {
    let mut pseudo = Vec::with_capacity(64);
    pseudo_legal(p, &mut pseudo);
    let us = p.side_to_move();
    let mut legal: Vec<Move> = pseudo
        .into_iter()
        .filter(|&m| {
            let next = p.make_move(m);
            !next.is_square_attacked(next.king_square(us), !us)
        })
        .collect();
    legal.sort_by_key(|m| (m.from, m.to, m.promotion));
    legal
}

/// Pseudo-legal destination count for `color` as if it were to move, without
/// castling or en passant (both depend on whose turn it is). Promotions count
/// once per destination.
pub(crate) fn pseudo_mobility(p: &Position, color: Color) -> u32 {
    let own = p.occupied_by(color);
    let enemy = p.occupied_by(!color);
    let occ = own | enemy;
    let mut count = 0;

    let pawns = p.pieces(color, PieceKind::Pawn);
    let (single, double) = if color == Color::White {
        let single = (pawns << 8) & !occ;
        (single, ((single & (0xFF << 16)) << 8) & !occ)
    } else {
        let single = (pawns >> 8) & !occ;
        (single, ((single & (0xFF << 40)) >> 8) & !occ)
    };
    count += single.count_ones() + double.count_ones();
    for from in squares(pawns) {
        count += (attacks::pawn(color, from) & enemy).count_ones();
    }
    for kind in [PieceKind::Knight, PieceKind::Bishop, PieceKind::Rook, PieceKind::Queen, PieceKind::King] {
        for from in squares(p.pieces(color, kind)) {
            count += (attacks::piece(kind, color, from, occ) & !own).count_ones();
        }
    }
    count
}

/// Leaf count of the legal move tree at exactly `depth` ply.
pub fn perft(p: &Position, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let moves = legal_moves(p);
    if depth == 1 {
        return moves.len() as u64;
    }
    moves.iter().map(|&m| perft(&p.make_move(m), depth - 1)).sum()
}
