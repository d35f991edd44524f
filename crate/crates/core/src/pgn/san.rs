//! Standard Algebraic Notation: resolving SAN tokens against a position and
//! writing moves back out.

use thiserror::Error;

use crate::board::{Move, PieceKind, Position, Square};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SanError {
    #[error("malformed SAN {0:?}")]
    Syntax(String),
    #[error("no legal move matches {0:?}")]
    NoMatch(String),
    #[error("{token:?} is ambiguous between {count} legal moves")]
    Ambiguous { token: String, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parsed {
    Castle { king_side: bool },
    Normal {
        piece: PieceKind,
        from_file: Option<u8>,
        from_rank: Option<u8>,
        to: Square,
        promotion: Option<PieceKind>,
    },
}

fn parse(token: &str) -> Option<Parsed> {
    let s = token.trim_end_matches(['+', '#', '!', '?']);
    match s {
        "O-O" | "0-0" => return Some(Parsed::Castle { king_side: true }),
        "O-O-O" | "0-0-0" => return Some(Parsed::Castle { king_side: false }),
        _ => {}
    }
    let mut chars: Vec<char> = s.chars().collect();

    let mut promotion = None;
    if let Some(eq) = chars.iter().position(|&c| c == '=') {
        if eq + 2 != chars.len() {
            return None;
        }
        promotion = Some(promotion_kind(chars[eq + 1])?);
        chars.truncate(eq);
    } else if chars.len() >= 3 && matches!(chars[chars.len() - 1], 'N' | 'B' | 'R' | 'Q') {
        // Promotion written without '=' (e8Q).
        let rank = chars[chars.len() - 2];
        if rank == '1' || rank == '8' {
            promotion = promotion_kind(chars.pop()?);
        }
    }

    let piece = match chars.first()? {
        c @ ('N' | 'B' | 'R' | 'Q' | 'K') => {
            let k = PieceKind::from_letter(*c)?;
            chars.remove(0);
            k
        }
        _ => PieceKind::Pawn,
    };
    if chars.len() < 2 {
        return None;
    }
    let dest: String = chars[chars.len() - 2..].iter().collect();
    let to = Square::parse(&dest)?;
    chars.truncate(chars.len() - 2);

    let mut from_file = None;
    let mut from_rank = None;
    for c in chars {
        match c {
            'a'..='h' if from_file.is_none() && from_rank.is_none() => from_file = Some(c as u8 - b'a'),
            '1'..='8' if from_rank.is_none() => from_rank = Some(c as u8 - b'1'),
            'x' | ':' | '-' => {}
            _ => return None,
        }
    }
    if promotion.is_some() && piece != PieceKind::Pawn {
        return None;
    }
    Some(Parsed::Normal { piece, from_file, from_rank, to, promotion })
}

fn promotion_kind(c: char) -> Option<PieceKind> {
    match c {
        'N' | 'B' | 'R' | 'Q' => PieceKind::from_letter(c),
        _ => None,
    }
}

/// Resolves a SAN token to the unique legal move it denotes in `p`.
///
/// Check and annotation suffixes are ignored, as is the capture marker; the
/// token must still identify exactly one legal move.
pub fn resolve_san(p: &Position, token: &str) -> Result<Move, SanError> {
    let parsed = parse(token).ok_or_else(|| SanError::Syntax(token.to_string()))?;
    let legal = p.generate_moves();
    let candidates: Vec<Move> = match parsed {
        Parsed::Castle { king_side } => legal
            .into_iter()
            .filter(|m| m.is_castle() && (m.to.file() == 6) == king_side)
            .collect(),
        Parsed::Normal { piece, from_file, from_rank, to, promotion } => legal
            .into_iter()
            .filter(|m| {
                m.to == to
                    && m.promotion == promotion
                    && p.piece_at(m.from).map(|(_, k)| k) == Some(piece)
                    && from_file.is_none_or(|f| m.from.file() == f)
                    && from_rank.is_none_or(|r| m.from.rank() == r)
                    && !(piece == PieceKind::King && m.is_castle())
            })
            .collect(),
    };
    match candidates.len() {
        1 => Ok(candidates[0]),
        0 => Err(SanError::NoMatch(token.to_string())),
        count => Err(SanError::Ambiguous { token: token.to_string(), count }),
    }
}

/// Writes `m` (legal in `p`) in SAN with minimal disambiguation and a
/// `+`/`#` suffix.
pub fn to_san(p: &Position, m: Move) -> String {
    let mut s = String::new();
    if m.is_castle() {
        s.push_str(if m.to.file() == 6 { "O-O" } else { "O-O-O" });
    } else {
        let piece = p.piece_at(m.from).map(|(_, k)| k).unwrap_or(PieceKind::Pawn);
        if piece == PieceKind::Pawn {
            if m.is_capture() {
                s.push((b'a' + m.from.file()) as char);
            }
        } else {
            s.push(piece.letter().to_ascii_uppercase());
            let rivals: Vec<Move> = p
                .generate_moves()
                .into_iter()
                .filter(|o| o.to == m.to && o.from != m.from && p.piece_at(o.from).map(|(_, k)| k) == Some(piece))
                .collect();
            if !rivals.is_empty() {
                let file_unique = rivals.iter().all(|o| o.from.file() != m.from.file());
                let rank_unique = rivals.iter().all(|o| o.from.rank() != m.from.rank());
                if file_unique {
                    s.push((b'a' + m.from.file()) as char);
                } else if rank_unique {
                    s.push((b'1' + m.from.rank()) as char);
                } else {
                    s.push_str(&m.from.to_string());
                }
            }
        }
        if m.is_capture() {
            s.push('x');
        }
        s.push_str(&m.to.to_string());
        if let Some(k) = m.promotion {
            s.push('=');
            s.push(k.letter().to_ascii_uppercase());
        }
    }
    let next = p.apply_move(m).expect("to_san requires a legal move");
    if next.in_check() {
        s.push(if next.generate_moves().is_empty() { '#' } else { '+' });
    }
    s
}
