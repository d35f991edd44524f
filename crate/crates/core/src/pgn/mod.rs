//! PGN game records: parsing, replay, and the same-mover position windows
//! used for training and classification.
//!
//! Only the move sequence of a game is ever handed to learning code. Tags
//! are kept for corpus filtering (player names, colors) and nothing else.

mod san;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::board::{Color, Move, Position};

pub use san::{resolve_san, to_san, SanError};

#[derive(Debug, Clone, PartialEq)]
pub struct GameRecord {
    pub white_name: String,
    pub black_name: String,
    /// Legal from the standard starting position, in order.
    pub moves: Vec<Move>,
    pub tags: BTreeMap<String, String>,
}

impl GameRecord {
    /// Builds a record from moves that must replay legally from the start.
    pub fn from_moves(white: &str, black: &str, moves: Vec<Move>) -> Result<Self, crate::board::IllegalMove> {
        let mut p = Position::startpos();
        for &m in &moves {
            p = p.apply_move(m)?;
        }
        let mut tags = BTreeMap::new();
        tags.insert("White".to_string(), white.to_string());
        tags.insert("Black".to_string(), black.to_string());
        Ok(GameRecord { white_name: white.to_string(), black_name: black.to_string(), moves, tags })
    }

    /// Every position of the game, starting position first; `len = moves + 1`.
    pub fn replay(&self) -> Vec<Position> {
        let mut out = Vec::with_capacity(self.moves.len() + 1);
        let mut p = Position::startpos();
        out.push(p);
        for &m in &self.moves {
            p = p.apply_move(m).expect("GameRecord moves are legal by construction");
            out.push(p);
        }
        out
    }

    /// The color `name` played, if it matches either player tag.
    pub fn color_of(&self, name: &str) -> Option<Color> {
        let name = name.trim();
        if self.white_name.trim() == name {
            Some(Color::White)
        } else if self.black_name.trim() == name {
            Some(Color::Black)
        } else {
            None
        }
    }

    /// Export-format PGN of this game: the seven-tag roster order first,
    /// remaining tags after, SAN movetext wrapped at 80 columns.
    pub fn to_pgn(&self) -> String {
        const ROSTER: [&str; 7] = ["Event", "Site", "Date", "Round", "White", "Black", "Result"];
        let mut out = String::new();
        let result = self.tags.get("Result").map(String::as_str).unwrap_or("*");
        for name in ROSTER {
            let default = match name {
                "White" => self.white_name.as_str(),
                "Black" => self.black_name.as_str(),
                "Result" => result,
                "Date" => "????.??.??",
                _ => "?",
            };
            let value = self.tags.get(name).map(String::as_str).unwrap_or(default);
            out.push_str(&format!("[{name} \"{}\"]\n", escape(value)));
        }
        for (name, value) in &self.tags {
            if !ROSTER.contains(&name.as_str()) {
                out.push_str(&format!("[{name} \"{}\"]\n", escape(value)));
            }
        }
        out.push('\n');

        let mut tokens = Vec::with_capacity(self.moves.len() * 3 / 2 + 1);
        let mut p = Position::startpos();
        for &m in &self.moves {
            if p.side_to_move() == Color::White {
                tokens.push(format!("{}.", p.fullmove_number()));
            }
            tokens.push(to_san(&p, m));
            p = p.apply_move(m).expect("GameRecord moves are legal by construction");
        }
        tokens.push(result.to_string());
        let mut line = String::new();
        for t in tokens {
            if !line.is_empty() && line.len() + 1 + t.len() > 80 {
                out.push_str(&line);
                out.push('\n');
                line.clear();
            }
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(&t);
        }
        out.push_str(&line);
        out.push_str("\n\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A per-game problem found while parsing; the game is left out of the
/// output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Zero-based index of the game in the file.
    pub game_index: usize,
    /// Zero-based ply at which the problem occurred, when it is a move.
    pub ply: Option<usize>,
    pub token: Option<String>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "game {}", self.game_index + 1)?;
        if let Some(ply) = self.ply {
            write!(f, ", ply {}", ply + 1)?;
        }
        if let Some(t) = &self.token {
            write!(f, ", token {t:?}")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedPgn {
    pub games: Vec<GameRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Tag(String, String),
    Symbol(String),
    Result(String),
    VariationStart,
    VariationEnd,
}

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '+' | '#' | '=' | ':' | '-' | '/' | '!' | '?')
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line_start = true;
    while let Some(c) = chars.next() {
        let at_line_start = line_start;
        line_start = c == '\n';
        match c {
            '%' if at_line_start => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        line_start = true;
                        break;
                    }
                }
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        line_start = true;
                        break;
                    }
                }
            }
            '{' => {
                for c in chars.by_ref() {
                    if c == '}' {
                        break;
                    }
                }
            }
            '[' => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '"' || c == ']' {
                        break;
                    }
                    name.push(c);
                    chars.next();
                }
                while chars.peek().is_some_and(|c| c.is_whitespace()) {
                    chars.next();
                }
                let mut value = String::new();
                if chars.peek() == Some(&'"') {
                    chars.next();
                    while let Some(c) = chars.next() {
                        match c {
                            '\\' => {
                                if let Some(n) = chars.next() {
                                    value.push(n);
                                }
                            }
                            '"' => break,
                            _ => value.push(c),
                        }
                    }
                }
                for c in chars.by_ref() {
                    if c == ']' {
                        break;
                    }
                }
                tokens.push(Token::Tag(name, value));
            }
            '(' => tokens.push(Token::VariationStart),
            ')' => tokens.push(Token::VariationEnd),
            '$' => {
                while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    chars.next();
                }
            }
            '*' => tokens.push(Token::Result("*".into())),
            c if is_symbol_char(c) => {
                let mut sym = String::from(c);
                while let Some(&n) = chars.peek() {
                    if !is_symbol_char(n) {
                        break;
                    }
                    sym.push(n);
                    chars.next();
                }
                match sym.as_str() {
                    "1-0" | "0-1" | "1/2-1/2" => tokens.push(Token::Result(sym)),
                    s if s.bytes().all(|b| b.is_ascii_digit()) => {} // move number
                    _ => tokens.push(Token::Symbol(sym)),
                }
            }
            _ => {} // whitespace, periods, stray punctuation
        }
    }
    tokens
}

#[derive(Default)]
struct Builder {
    tags: BTreeMap<String, String>,
    sans: Vec<String>,
    started: bool,
}

impl Builder {
    fn finish(self, index: usize, out: &mut ParsedPgn) {
        if !self.started {
            return;
        }
        let fail = |ply: Option<usize>, token: Option<String>, message: String| Diagnostic {
            game_index: index,
            ply,
            token,
            message,
        };
        if self.tags.contains_key("FEN") || self.tags.get("SetUp").is_some_and(|v| v == "1") {
            out.diagnostics.push(fail(None, None, "game does not start from the standard position".into()));
            return;
        }
        let mut p = Position::startpos();
        let mut moves = Vec::with_capacity(self.sans.len());
        for (ply, san) in self.sans.iter().enumerate() {
            match resolve_san(&p, san) {
                Ok(m) => {
                    moves.push(m);
                    p = p.make_move(m);
                }
                Err(e) => {
                    out.diagnostics.push(fail(Some(ply), Some(san.clone()), e.to_string()));
                    return;
                }
            }
        }
        let tag = |k: &str| self.tags.get(k).cloned().unwrap_or_default();
        out.games.push(GameRecord { white_name: tag("White"), black_name: tag("Black"), moves, tags: self.tags });
    }
}

/// Parses every game in `text`.
///
/// Comments, NAGs and variations are skipped. A game whose movetext cannot
/// be resolved, or which starts from a set-up position, is reported in
/// `diagnostics` and omitted; parsing continues with the next game.
pub fn parse_pgn(text: &str) -> ParsedPgn {
    let mut out = ParsedPgn::default();
    let mut game = Builder::default();
    let mut index = 0;
    let mut in_movetext = false;
    let mut depth = 0usize;
    for tok in tokenize(text) {
        match tok {
            Token::Tag(name, value) => {
                if in_movetext {
                    // New header without a result token: close the open game.
                    std::mem::take(&mut game).finish(index, &mut out);
                    index += 1;
                    in_movetext = false;
                    depth = 0;
                }
                game.started = true;
                game.tags.insert(name, value);
            }
            Token::VariationStart => depth += 1,
            Token::VariationEnd => depth = depth.saturating_sub(1),
            Token::Symbol(s) => {
                if depth == 0 {
                    game.started = true;
                    in_movetext = true;
                    game.sans.push(s);
                }
            }
            Token::Result(_) if depth > 0 => {}
            Token::Result(_) => {
                game.started = true;
                std::mem::take(&mut game).finish(index, &mut out);
                index += 1;
                in_movetext = false;
            }
        }
    }
    game.finish(index, &mut out);
    out
}

/// Decodes PGN bytes as UTF-8, falling back to Latin-1.
pub fn decode(bytes: &[u8]) -> String {
    match std::str::from_utf8(bytes) {
        Ok(s) => s.trim_start_matches('\u{feff}').to_string(),
        Err(_) => bytes.iter().map(|&b| b as char).collect(),
    }
}

pub fn read_pgn_file(path: impl AsRef<Path>) -> std::io::Result<ParsedPgn> {
    let bytes = std::fs::read(path)?;
    Ok(parse_pgn(&decode(&bytes)))
}

/// A position where the studied player is to move, and the position two
/// ply later where they are to move again.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionSample {
    pub position: Position,
    pub successor: Position,
    pub move_number: u32,
}

/// Samples at fullmoves `start_move..=end_move` where `color` is to move and
/// the record continues for at least two more ply.
pub fn extract_window(g: &GameRecord, color: Color, start_move: u32, end_move: u32) -> Vec<PositionSample> {
    window_from_positions(&g.replay(), color, start_move, end_move)
}

/// [`extract_window`] over an already replayed game.
pub fn window_from_positions(positions: &[Position], color: Color, start_move: u32, end_move: u32) -> Vec<PositionSample> {
    positions
        .iter()
        .zip(positions.iter().skip(2))
        .filter(|(p, _)| {
            p.side_to_move() == color && (start_move..=end_move).contains(&p.fullmove_number())
        })
        .map(|(p, s)| PositionSample { position: *p, successor: *s, move_number: p.fullmove_number() })
        .collect()
}
