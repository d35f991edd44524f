//! Feature extraction. Rules are written once for the "own" side as white;
//! black's view is computed on the mirrored board. Square complexes are the
//! exception: they name absolute squares and are measured on the real board.

use super::catalogue::{FeatureCatalogue, Formation, Rule, NUM_FEATURES};
use super::{pst, FeatureValues};
use crate::board::{movegen_mobility, squares, Bitboard, Color, PieceKind, Position, Square};

const FILE_A: Bitboard = 0x0101_0101_0101_0101;
const QUEENSIDE: Bitboard = FILE_A * 0x0F;
const KINGSIDE: Bitboard = FILE_A * 0xF0;

#[inline]
fn file_mask(file: u8) -> Bitboard {
    FILE_A << file
}

#[inline]
fn rank_mask(rank: u8) -> Bitboard {
    0xFF << (rank * 8)
}

fn rect_mask(low: Square, high: Square) -> Bitboard {
    let mut m = 0;
    for r in low.rank()..=high.rank() {
        for f in low.file()..=high.file() {
            m |= Square::from_coords(f, r).bb();
        }
    }
    m
}

/// Everything the own-side rules need, on a board where "own" is white.
struct View<'a> {
    p: &'a Position,
    cat: &'a FeatureCatalogue,
}

impl View<'_> {
    fn count(&self, color: Color, kind: PieceKind) -> u32 {
        self.p.pieces(color, kind).count_ones()
    }

    fn material(&self, color: Color) -> f64 {
        PieceKind::ALL[..5]
            .iter()
            .map(|&k| self.count(color, k) as f64 * self.cat.piece_value(k))
            .sum()
    }

    fn pst_sum(&self, color: Color) -> i32 {
        let mut sum = 0;
        for kind in PieceKind::ALL {
            for sq in squares(self.p.pieces(color, kind)) {
                // Black's pieces are scored from black's side of the board.
                let sq = if color == Color::White { sq } else { sq.flip_rank() };
                sum += pst::value(kind, sq);
            }
        }
        sum
    }

    fn doubled_files(&self, color: Color) -> u32 {
        let pawns = self.p.pieces(color, PieceKind::Pawn);
        (0..8).filter(|&f| (pawns & file_mask(f)).count_ones() >= 2).count() as u32
    }

    fn expansion(&self, color: Color) -> i64 {
        let men = self.p.occupied_by(color);
        (0..8u8)
            .map(|r| {
                let from_own_side = if color == Color::White { r + 1 } else { 8 - r };
                from_own_side as i64 * (men & rank_mask(r)).count_ones() as i64
            })
            .sum()
    }

    fn lone_minor(&self, color: Color, kind: PieceKind) -> bool {
        let other = if kind == PieceKind::Bishop { PieceKind::Knight } else { PieceKind::Bishop };
        self.count(color, kind) == 1 && self.count(color, other) == 0
    }

    fn majority(&self, region: Bitboard) -> f64 {
        let own = (self.p.pieces(Color::White, PieceKind::Pawn) & region).count_ones();
        let opp = (self.p.pieces(Color::Black, PieceKind::Pawn) & region).count_ones();
        (own as i64 - opp as i64).signum() as f64
    }

    fn formation(&self, formation: Formation) -> bool {
        let pawns = self.p.pieces(Color::White, PieceKind::Pawn);
        let on = |s: &str| pawns & Square::parse(s).unwrap().bb() != 0;
        let c = pawns & file_mask(2) != 0;
        let d_pawns = pawns & file_mask(3);
        let d = d_pawns != 0;
        let e = pawns & file_mask(4) != 0;
        let d_supported = c || e;
        match formation {
            Formation::IsolatedDPawn => d && !d_supported,
            Formation::D4WithoutCPawn => !c && on("d4") && d_supported,
            Formation::D4WithCPawnWithoutEPawn => !e && c && on("d4"),
            Formation::MaroczyBind => on("c4") && on("e4") && !d,
            Formation::E4WithoutDPawnOrC4 => !d && !on("c4") && on("e4"),
            Formation::SemiOpenCFile => {
                !c && d_supported && d_pawns & !Square::parse("d4").unwrap().bb() != 0
            }
        }
    }

    /// Raw (unscaled) measure of an own-side rule.
    fn raw(&self, rule: Rule) -> f64 {
        use Color::{Black as Opp, White as Own};
        let diff = |a: bool, b: bool| a as i32 as f64 - b as i32 as f64;
        match rule {
            Rule::Material => self.material(Own) - self.material(Opp),
            Rule::PseudoMobility => {
                movegen_mobility(self.p, Own) as f64 - movegen_mobility(self.p, Opp) as f64
            }
            Rule::PieceSquare => (self.pst_sum(Own) - self.pst_sum(Opp)) as f64,
            Rule::BishopPair => diff(self.count(Own, PieceKind::Bishop) >= 2, self.count(Opp, PieceKind::Bishop) >= 2),
            Rule::KnightPair => diff(self.count(Own, PieceKind::Knight) >= 2, self.count(Opp, PieceKind::Knight) >= 2),
            Rule::BishopOverKnight => diff(
                self.lone_minor(Own, PieceKind::Bishop) && self.lone_minor(Opp, PieceKind::Knight),
                self.lone_minor(Opp, PieceKind::Bishop) && self.lone_minor(Own, PieceKind::Knight),
            ),
            Rule::KnightOverBishop => diff(
                self.lone_minor(Own, PieceKind::Knight) && self.lone_minor(Opp, PieceKind::Bishop),
                self.lone_minor(Opp, PieceKind::Knight) && self.lone_minor(Own, PieceKind::Bishop),
            ),
            Rule::CastledKingSafety => {
                if self.count(Own, PieceKind::Queen) > 0 && self.count(Opp, PieceKind::Queen) > 0 {
                    diff(self.p.has_castled(Own), self.p.has_castled(Opp))
                } else {
                    0.0
                }
            }
            Rule::OwnDoubledPawns => self.doubled_files(Own) as f64,
            Rule::OpponentDoubledPawns => self.doubled_files(Opp) as f64,
            Rule::QueensideMajority => self.majority(QUEENSIDE),
            Rule::KingsideMajority => self.majority(KINGSIDE),
            Rule::ExpansionFactor => (self.expansion(Own) - self.expansion(Opp)) as f64,
            Rule::PawnPair { a, b } => {
                let both = Square::new(a).bb() | Square::new(b).bb();
                (self.p.pieces(Own, PieceKind::Pawn) & both == both) as i32 as f64
            }
            Rule::PawnFormation { formation } => self.formation(formation) as i32 as f64,
            Rule::SquareComplex { .. } => unreachable!("complexes are measured on the real board"),
        }
    }
}

/// The 140 feature values of `p` in centipawns, seen by `perspective`.
pub fn extract_features(p: &Position, perspective: Color) -> FeatureValues {
    extract_with(FeatureCatalogue::standard(), p, perspective)
}

pub fn extract_with(cat: &FeatureCatalogue, p: &Position, perspective: Color) -> FeatureValues {
    debug_assert_eq!(cat.len(), NUM_FEATURES);
    let mirrored;
    let own_view = if perspective == Color::White {
        p
    } else {
        mirrored = p.mirror();
        &mirrored
    };
    let view = View { p: own_view, cat };
    let own_men = p.occupied_by(perspective);
    let opp_men = p.occupied_by(!perspective);

    let mut values = [0.0; NUM_FEATURES];
    for (slot, feature) in values.iter_mut().zip(&cat.features) {
        let raw = match feature.rule {
            Rule::SquareComplex { low, high } => {
                let m = rect_mask(Square::new(low), Square::new(high));
                (own_men & m).count_ones() as f64 - (opp_men & m).count_ones() as f64
            }
            rule => view.raw(rule),
        };
        let v = raw * feature.base;
        *slot = match feature.rule {
            Rule::Material => v,
            _ => v.clamp(-cat.saturation, cat.saturation),
        };
    }
    FeatureValues(values)
}
