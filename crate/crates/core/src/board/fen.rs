use thiserror::Error;

use super::{CastlingRights, Color, PieceKind, Position, PositionError, Square};

pub const START_FEN: &str = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FenError {
    #[error("expected 4 to 6 space-separated fields, found {0}")]
    FieldCount(usize),
    #[error("piece placement: {0}")]
    Placement(String),
    #[error("side to move: {0:?}")]
    SideToMove(String),
    #[error("castling rights: {0:?}")]
    Castling(String),
    #[error("en-passant square: {0:?}")]
    EnPassant(String),
    #[error("halfmove clock: {0:?}")]
    Halfmove(String),
    #[error("fullmove number: {0:?}")]
    Fullmove(String),
    #[error("illegal position: {0}")]
    Illegal(#[from] PositionError),
}

impl Position {
    pub fn from_fen(fen: &str) -> Result<Position, FenError> {
        let fields: Vec<&str> = fen.split_whitespace().collect();
        if !(4..=6).contains(&fields.len()) {
            return Err(FenError::FieldCount(fields.len()));
        }
        let mut p = Position::empty();

        let ranks: Vec<&str> = fields[0].split('/').collect();
        if ranks.len() != 8 {
            return Err(FenError::Placement(format!("expected 8 ranks, found {}", ranks.len())));
        }
        for (i, rank_text) in ranks.iter().enumerate() {
            let rank = 7 - i as u8;
            let mut file = 0u8;
            for c in rank_text.chars() {
                if let Some(skip) = c.to_digit(10) {
                    if !(1..=8).contains(&skip) {
                        return Err(FenError::Placement(format!("bad empty-square count {c:?}")));
                    }
                    file += skip as u8;
                } else {
                    let kind = PieceKind::from_letter(c)
                        .ok_or_else(|| FenError::Placement(format!("unknown piece {c:?}")))?;
                    if file >= 8 {
                        return Err(FenError::Placement(format!("rank {} has more than 8 files", rank + 1)));
                    }
                    let color = if c.is_ascii_uppercase() { Color::White } else { Color::Black };
                    p.pieces[color.index()][kind.index()] |= Square::from_coords(file, rank).bb();
                    file += 1;
                }
                if file > 8 {
                    return Err(FenError::Placement(format!("rank {} has more than 8 files", rank + 1)));
                }
            }
            if file != 8 {
                return Err(FenError::Placement(format!("rank {} has {file} files", rank + 1)));
            }
        }

        p.side_to_move = match fields[1] {
            "w" => Color::White,
            "b" => Color::Black,
            other => return Err(FenError::SideToMove(other.to_string())),
        };

        if fields[2] != "-" {
            for c in fields[2].chars() {
                let right = match c {
                    'K' => CastlingRights::WHITE_KING,
                    'Q' => CastlingRights::WHITE_QUEEN,
                    'k' => CastlingRights::BLACK_KING,
                    'q' => CastlingRights::BLACK_QUEEN,
                    _ => return Err(FenError::Castling(fields[2].to_string())),
                };
                p.castling.insert(right);
            }
        }
        p.castling = sanitize_castling(&p, p.castling);

        p.en_passant = match fields[3] {
            "-" => None,
            s => Some(Square::parse(s).ok_or_else(|| FenError::EnPassant(s.to_string()))?),
        };

        if let Some(s) = fields.get(4) {
            p.halfmove_clock = s.parse().map_err(|_| FenError::Halfmove(s.to_string()))?;
        }
        if let Some(s) = fields.get(5) {
            p.fullmove_number = s.parse().map_err(|_| FenError::Fullmove(s.to_string()))?;
        }

        for color in Color::ALL {
            p.castled[color.index()] = looks_castled(&p, color);
        }
        p.validate()?;
        p.key = p.compute_key();
        Ok(p)
    }

    /// Normalised FEN: all six fields, castling in `KQkq` order.
    pub fn to_fen(&self) -> String {
        let mut out = String::with_capacity(90);
        for rank in (0..8).rev() {
            let mut empty = 0;
            for file in 0..8 {
                match self.piece_at(Square::from_coords(file, rank)) {
                    Some((color, kind)) => {
                        if empty > 0 {
                            out.push(char::from(b'0' + empty));
                            empty = 0;
                        }
                        let c = kind.letter();
                        out.push(if color == Color::White { c } else { c.to_ascii_lowercase() });
                    }
                    None => empty += 1,
                }
            }
            if empty > 0 {
                out.push(char::from(b'0' + empty));
            }
            if rank > 0 {
                out.push('/');
            }
        }
        out.push(' ');
        out.push(if self.side_to_move == Color::White { 'w' } else { 'b' });
        out.push(' ');
        if self.castling == CastlingRights::NONE {
            out.push('-');
        } else {
            for (right, c) in [
                (CastlingRights::WHITE_KING, 'K'),
                (CastlingRights::WHITE_QUEEN, 'Q'),
                (CastlingRights::BLACK_KING, 'k'),
                (CastlingRights::BLACK_QUEEN, 'q'),
            ] {
                if self.castling.has(right) {
                    out.push(c);
                }
            }
        }
        out.push(' ');
        match self.en_passant {
            Some(sq) => out.push_str(&sq.to_string()),
            None => out.push('-'),
        }
        out.push_str(&format!(" {} {}", self.halfmove_clock, self.fullmove_number));
        out
    }
}

/// Drops rights whose king or rook is not on its home square.
fn sanitize_castling(p: &Position, mut rights: CastlingRights) -> CastlingRights {
    for color in Color::ALL {
        let rank = if color == Color::White { 0 } else { 7 };
        let king_home = p.pieces(color, PieceKind::King) & Square::from_coords(4, rank).bb() != 0;
        let rooks = p.pieces(color, PieceKind::Rook);
        if !king_home || rooks & Square::from_coords(7, rank).bb() == 0 {
            rights.remove(CastlingRights::king_side(color));
        }
        if !king_home || rooks & Square::from_coords(0, rank).bb() == 0 {
            rights.remove(CastlingRights::queen_side(color));
        }
    }
    rights
}

/// Without game history, a king on g1/c1 (g8/c8) next to its rook on f1/d1
/// (f8/d8) counts as castled.
fn looks_castled(p: &Position, color: Color) -> bool {
    let rank = if color == Color::White { 0 } else { 7 };
    let king = p.pieces(color, PieceKind::King);
    let rooks = p.pieces(color, PieceKind::Rook);
    let at = |f| Square::from_coords(f, rank).bb();
    (king & at(6) != 0 && rooks & at(5) != 0) || (king & at(2) != 0 && rooks & at(3) != 0)
}
