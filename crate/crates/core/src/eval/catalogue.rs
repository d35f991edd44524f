//! The 140-entry feature catalogue.
//!
//! Layout:
//!
//! | indices   | group                                   |
//! |-----------|-----------------------------------------|
//! | 0         | material balance                        |
//! | 1..=12    | conventional features                   |
//! | 13..=21   | nine square complexes (absolute board)  |
//! | 22..=133  | 112 adjacent two-pawn structures        |
//! | 134..=139 | six centre pawn formations              |
//!
//! The pawn structures are every placement of two own pawns on adjacent files
//! that touch: side-by-side duos (ranks 2-7, 7 file pairs, 42 entries) and
//! diagonal chains (rear pawn on ranks 2-6, 7 file pairs, rising towards the
//! h-file or towards the a-file, 70 entries). Their squares, like those of the
//! formations, are named from the owner's side of the board, as if the owner
//! were white.
//!
//! Each entry's `base` is the centipawn value of one unit of its raw measure.
//! Every non-material value saturates at `saturation` so positional features
//! stay below one pawn.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::board::{PieceKind, Square};

pub const NUM_FEATURES: usize = 140;
pub const CATALOGUE_VERSION: u32 = 1;

pub const FIRST_COMPLEX: usize = 13;
pub const FIRST_PAWN_STRUCTURE: usize = 22;
pub const FIRST_FORMATION: usize = 134;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formation {
    IsolatedDPawn,
    D4WithoutCPawn,
    D4WithCPawnWithoutEPawn,
    MaroczyBind,
    E4WithoutDPawnOrC4,
    SemiOpenCFile,
}

/// How a feature's raw measure is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rule {
    Material,
    PseudoMobility,
    PieceSquare,
    BishopPair,
    KnightPair,
    BishopOverKnight,
    KnightOverBishop,
    CastledKingSafety,
    OwnDoubledPawns,
    OpponentDoubledPawns,
    QueensideMajority,
    KingsideMajority,
    ExpansionFactor,
    /// Inclusive rectangle on the real board, not perspective-flipped.
    SquareComplex { low: u8, high: u8 },
    /// Two own pawns, owner-relative squares.
    PawnPair { a: u8, b: u8 },
    PawnFormation { formation: Formation },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub id: String,
    pub description: String,
    pub base: f64,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCatalogue {
    pub version: u32,
    /// Pawn, knight, bishop, rook, queen.
    pub piece_values: [f64; 5],
    pub saturation: f64,
    pub pst_source: String,
    pub features: Vec<FeatureSpec>,
}

fn spec(id: impl Into<String>, description: impl Into<String>, base: f64, rule: Rule) -> FeatureSpec {
    FeatureSpec { id: id.into(), description: description.into(), base, rule }
}

fn sq_name(index: u8) -> String {
    Square::new(index).to_string()
}

impl FeatureCatalogue {
    /// The catalogue every profile in this crate is trained against.
    pub fn standard() -> &'static FeatureCatalogue {
        static CATALOGUE: OnceLock<FeatureCatalogue> = OnceLock::new();
        CATALOGUE.get_or_init(FeatureCatalogue::build)
    }

    fn build() -> FeatureCatalogue {
        let mut f = vec![
            spec("material_balance", "own minus opponent material (P=100 N=325 B=325 R=500 Q=900)", 1.0, Rule::Material),
            spec("pseudo_mobility", "own minus opponent pseudo-legal destinations, 2 cp each", 2.0, Rule::PseudoMobility),
            spec("piece_square_tables", "own minus opponent piece-square table sum, 0.25 cp per table point", 0.25, Rule::PieceSquare),
            spec("bishop_pair", "own has two or more bishops minus opponent has", 50.0, Rule::BishopPair),
            spec("knight_pair", "own has two or more knights minus opponent has", 20.0, Rule::KnightPair),
            spec("single_bishop_over_knight", "lone bishop against lone knight, signed", 30.0, Rule::BishopOverKnight),
            spec("single_knight_over_bishop", "lone knight against lone bishop, signed", 30.0, Rule::KnightOverBishop),
            spec("castled_king_safety", "own castled minus opponent castled, only with both queens on", 40.0, Rule::CastledKingSafety),
            spec("own_doubled_pawns", "files holding two or more own pawns", 25.0, Rule::OwnDoubledPawns),
            spec("opponent_doubled_pawns", "files holding two or more opponent pawns", 25.0, Rule::OpponentDoubledPawns),
            spec("queenside_majority", "more own than opponent pawns on files a-d, signed", 30.0, Rule::QueensideMajority),
            spec("kingside_majority", "more own than opponent pawns on files e-h, signed", 30.0, Rule::KingsideMajority),
            spec("relative_expansion", "own minus opponent sum of men times rank from own side", 1.0, Rule::ExpansionFactor),
        ];

        let complexes = [
            ("a1", "c3"), ("d1", "e3"), ("f1", "h3"),
            ("a4", "c5"), ("d4", "e5"), ("f4", "h5"),
            ("a6", "c8"), ("d6", "e8"), ("f6", "h8"),
        ];
        for (lo, hi) in complexes {
            let low = Square::parse(lo).unwrap().index() as u8;
            let high = Square::parse(hi).unwrap().index() as u8;
            f.push(spec(
                format!("complex_{lo}_{hi}"),
                format!("own minus opponent men inside {lo}-{hi}"),
                10.0,
                Rule::SquareComplex { low, high },
            ));
        }

        for rank in 1..=6u8 {
            for file in 0..7u8 {
                let a = rank * 8 + file;
                let b = a + 1;
                f.push(spec(
                    format!("pawn_duo_{}_{}", sq_name(a), sq_name(b)),
                    format!("own pawns side by side on {} and {}", sq_name(a), sq_name(b)),
                    20.0,
                    Rule::PawnPair { a, b },
                ));
            }
        }
        for rank in 1..=5u8 {
            for file in 0..7u8 {
                let rear = rank * 8 + file;
                let front = rear + 9;
                f.push(spec(
                    format!("pawn_chain_{}_{}", sq_name(rear), sq_name(front)),
                    format!("own pawn chain {} defending {}", sq_name(rear), sq_name(front)),
                    20.0,
                    Rule::PawnPair { a: rear, b: front },
                ));
                let rear = rank * 8 + file + 1;
                let front = rear + 7;
                f.push(spec(
                    format!("pawn_chain_{}_{}", sq_name(rear), sq_name(front)),
                    format!("own pawn chain {} defending {}", sq_name(rear), sq_name(front)),
                    20.0,
                    Rule::PawnPair { a: rear, b: front },
                ));
            }
        }

        let formations = [
            ("isolated_d_pawn", "d-pawn with no own c- or e-pawn", Formation::IsolatedDPawn),
            ("d4_without_c_pawn", "no c-pawn and a non-isolated pawn on d4", Formation::D4WithoutCPawn),
            ("d4_with_c_pawn_without_e_pawn", "no e-pawn, a c-pawn and a non-isolated pawn on d4", Formation::D4WithCPawnWithoutEPawn),
            ("maroczy_bind", "pawns on c4 and e4 with no d-pawn", Formation::MaroczyBind),
            ("e4_without_d_pawn_or_c4", "no d-pawn and no pawn on c4 but a pawn on e4", Formation::E4WithoutDPawnOrC4),
            ("semi_open_c_file", "no c-pawn but a non-isolated d-pawn not on d4", Formation::SemiOpenCFile),
        ];
        for (id, desc, formation) in formations {
            f.push(spec(id, desc, 30.0, Rule::PawnFormation { formation }));
        }

        FeatureCatalogue {
            version: CATALOGUE_VERSION,
            piece_values: [100.0, 325.0, 325.0, 500.0, 900.0],
            saturation: 99.0,
            pst_source: super::pst::SOURCE.to_string(),
            features: f,
        }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn piece_value(&self, kind: PieceKind) -> f64 {
        match kind {
            PieceKind::King => 0.0,
            k => self.piece_values[k.index()],
        }
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.features.iter().position(|f| f.id == id)
    }

    /// Structured text form (TOML), one `[[features]]` table per entry.
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("catalogue serializes")
    }

    /// Hex SHA-256 of [`FeatureCatalogue::to_text`]. Profiles trained under
    /// different catalogues carry different hashes and are not comparable.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    /// Cached [`FeatureCatalogue::hash`] of the standard catalogue.
    pub fn standard_hash() -> &'static str {
        static HASH: OnceLock<String> = OnceLock::new();
        HASH.get_or_init(|| FeatureCatalogue::standard().hash())
    }
}
