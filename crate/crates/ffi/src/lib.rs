//! C ABI over the engine, learner and classifier.
//!
//! Objects cross the boundary as opaque handles created by `cs_*_new` or
//! `cs_*_load` style functions and released with the matching `cs_*_free`.
//! Every fallible call returns a [`CsStatus`]; on failure a description is
//! available from [`cs_last_error`] on the same thread. Strings returned to
//! the caller are owned by the caller and must be released with
//! [`cs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use chess_style::board::{perft, Position};
use chess_style::classify::{hit_ratio, MatchupConfig};
use chess_style::eval::{evaluate, extract_features, FeatureVector, NUM_FEATURES};
use chess_style::learn::{train_corpus, LearnerConfig, StyleProfile};
use chess_style::pgn::read_pgn_file;
use chess_style::search::{SearchParams, Searcher};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Parse = 5,
    NoMove = 6,
    Panic = 7,
}

/// A chess position.
pub struct CsPosition(Position);

/// A trained or hand-built style profile.
pub struct CsProfile(StyleProfile);

/// A search instance with its transposition table.
pub struct CsSearcher(Searcher);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(CsStatus, String);

impl Fail {
    fn new(status: CsStatus, msg: impl Into<String>) -> Self {
        Fail(status, msg.into())
    }
}

/// Runs `f`, converting errors and panics into a status and a stored
/// message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            CsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::new(CsStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail::new(CsStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(h: *const T, name: &str) -> Result<&'a T, Fail> {
    h.as_ref().ok_or_else(|| Fail::new(CsStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail::new(CsStatus::NullPointer, format!("{name} is null")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread, or null after a
/// successful one. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn cs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of features in every profile.
#[no_mangle]
pub extern "C" fn cs_feature_count() -> usize {
    NUM_FEATURES
}

// Positions

/// The standard starting position.
#[no_mangle]
pub extern "C" fn cs_position_startpos() -> *mut CsPosition {
    Box::into_raw(Box::new(CsPosition(Position::startpos())))
}

/// Parses a FEN string into a new position.
///
/// # Safety
/// `fen` must be a NUL-terminated string; `out_position` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_position_from_fen(fen: *const c_char, out_position: *mut *mut CsPosition) -> CsStatus {
    guard(|| {
        let fen = str_arg(fen, "fen")?;
        let slot = out(out_position, "out_position")?;
        let p = Position::from_fen(fen).map_err(|e| Fail::new(CsStatus::Parse, format!("bad FEN {fen:?}: {e}")))?;
        *slot = Box::into_raw(Box::new(CsPosition(p)));
        Ok(())
    })
}

/// # Safety
/// `position` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_position_free(position: *mut CsPosition) {
    if !position.is_null() {
        drop(Box::from_raw(position));
    }
}

/// FEN of `position`, to be released with [`cs_string_free`].
///
/// # Safety
/// `position` must be a live handle; `out_fen` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_position_to_fen(position: *const CsPosition, out_fen: *mut *mut c_char) -> CsStatus {
    guard(|| {
        let p = handle(position, "position")?;
        *out(out_fen, "out_fen")? = owned_string(p.0.to_fen());
        Ok(())
    })
}

/// Number of legal moves in `position`.
///
/// # Safety
/// `position` must be a live handle; `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_position_legal_move_count(position: *const CsPosition, out_count: *mut usize) -> CsStatus {
    guard(|| {
        let p = handle(position, "position")?;
        *out(out_count, "out_count")? = p.0.generate_moves().len();
        Ok(())
    })
}

/// Plays a move given in UCI notation ("e2e4", "e7e8q"), producing a new
/// position and leaving `position` unchanged.
///
/// # Safety
/// `position` must be a live handle, `uci` a NUL-terminated string and
/// `out_position` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_position_apply_uci(
    position: *const CsPosition,
    uci: *const c_char,
    out_position: *mut *mut CsPosition,
) -> CsStatus {
    guard(|| {
        let p = handle(position, "position")?;
        let uci = str_arg(uci, "uci")?;
        let slot = out(out_position, "out_position")?;
        let m = p.0.parse_uci(uci).ok_or_else(|| Fail::new(CsStatus::InvalidArgument, format!("{uci:?} is not a legal move")))?;
        let next = p.0.apply_move(m).map_err(|e| Fail::new(CsStatus::InvalidArgument, e.to_string()))?;
        *slot = Box::into_raw(Box::new(CsPosition(next)));
        Ok(())
    })
}

/// Leaf count of the legal move tree to `depth`.
///
/// # Safety
/// `position` must be a live handle; `out_nodes` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_perft(position: *const CsPosition, depth: u32, out_nodes: *mut u64) -> CsStatus {
    guard(|| {
        let p = handle(position, "position")?;
        *out(out_nodes, "out_nodes")? = perft(&p.0, depth);
        Ok(())
    })
}

// Profiles

/// A profile for `player` with every weight set to 1.
///
/// # Safety
/// `player` must be a NUL-terminated string; `out_profile` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_profile_uniform(player: *const c_char, out_profile: *mut *mut CsProfile) -> CsStatus {
    guard(|| {
        let name = str_arg(player, "player")?;
        let slot = out(out_profile, "out_profile")?;
        *slot = Box::into_raw(Box::new(CsProfile(StyleProfile::new(name, FeatureVector::uniform()))));
        Ok(())
    })
}

/// Reads a profile file written by the `train` command or
/// [`cs_profile_save`].
///
/// # Safety
/// `path` must be a NUL-terminated string; `out_profile` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_profile_load(path: *const c_char, out_profile: *mut *mut CsProfile) -> CsStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let slot = out(out_profile, "out_profile")?;
        let profile = StyleProfile::load(path).map_err(|e| match e {
            chess_style::learn::ProfileError::Io(_) => Fail::new(CsStatus::Io, format!("{path}: {e}")),
            _ => Fail::new(CsStatus::Parse, format!("{path}: {e}")),
        })?;
        *slot = Box::into_raw(Box::new(CsProfile(profile)));
        Ok(())
    })
}

/// Writes `profile` to `path`.
///
/// # Safety
/// `profile` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cs_profile_save(profile: *const CsProfile, path: *const c_char) -> CsStatus {
    guard(|| {
        let profile = handle(profile, "profile")?;
        let path = str_arg(path, "path")?;
        std::fs::write(path, profile.0.to_toml()).map_err(|e| Fail::new(CsStatus::Io, format!("{path}: {e}")))
    })
}

/// # Safety
/// `profile` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_profile_free(profile: *mut CsProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Weight of feature `index`.
///
/// # Safety
/// `profile` must be a live handle; `out_weight` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_profile_weight(profile: *const CsProfile, index: usize, out_weight: *mut f64) -> CsStatus {
    guard(|| {
        let profile = handle(profile, "profile")?;
        let slot = out(out_weight, "out_weight")?;
        if index >= NUM_FEATURES {
            return Err(Fail::new(CsStatus::InvalidArgument, format!("feature index {index} out of range 0..{NUM_FEATURES}")));
        }
        *slot = profile.0.weights[index];
        Ok(())
    })
}

/// Player name of `profile`, to be released with [`cs_string_free`].
///
/// # Safety
/// `profile` must be a live handle; `out_name` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_profile_player(profile: *const CsProfile, out_name: *mut *mut c_char) -> CsStatus {
    guard(|| {
        let profile = handle(profile, "profile")?;
        *out(out_name, "out_name")? = owned_string(profile.0.player_name.clone());
        Ok(())
    })
}

/// Static evaluation of `position` under `profile`, from the side to move.
///
/// # Safety
/// Both handles must be live; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_evaluate(position: *const CsPosition, profile: *const CsProfile, out_value: *mut f64) -> CsStatus {
    guard(|| {
        let p = handle(position, "position")?;
        let profile = handle(profile, "profile")?;
        let v = extract_features(&p.0, p.0.side_to_move());
        *out(out_value, "out_value")? = evaluate(&v, &profile.0.weights);
        Ok(())
    })
}

// Search

/// A searcher with a transposition table of `tt_entries` slots (0 disables
/// the table).
#[no_mangle]
pub extern "C" fn cs_searcher_new(tt_entries: usize) -> *mut CsSearcher {
    let searcher = if tt_entries == 0 { Searcher::without_tt() } else { Searcher::new(tt_entries) };
    Box::into_raw(Box::new(CsSearcher(searcher)))
}

/// # Safety
/// `searcher` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_searcher_free(searcher: *mut CsSearcher) {
    if !searcher.is_null() {
        drop(Box::from_raw(searcher));
    }
}

/// Searches `position` to `depth` ply under `profile`. The value is from
/// the side to move; the best move is written in UCI notation and must be
/// released with [`cs_string_free`]. Returns [`CsStatus::NoMove`] with the
/// value set when the position is checkmate or stalemate.
///
/// # Safety
/// All handles must be live; `out_value` and `out_best_move` must be
/// writable (`out_best_move` may be null to skip the move).
#[no_mangle]
pub unsafe extern "C" fn cs_search(
    searcher: *mut CsSearcher,
    position: *const CsPosition,
    profile: *const CsProfile,
    depth: u32,
    out_value: *mut f64,
    out_best_move: *mut *mut c_char,
) -> CsStatus {
    guard(|| {
        let searcher = searcher.as_mut().ok_or_else(|| Fail::new(CsStatus::NullPointer, "searcher is null"))?;
        let p = handle(position, "position")?;
        let profile = handle(profile, "profile")?;
        let value = out(out_value, "out_value")?;
        let params = SearchParams { depth, ..Default::default() };
        params.validate().map_err(|e| Fail::new(CsStatus::InvalidArgument, e))?;
        let r = searcher.0.search(&p.0, &profile.0.weights, &params);
        *value = r.value;
        if let Some(slot) = out_best_move.as_mut() {
            *slot = r.best_move.map_or(ptr::null_mut(), |m| owned_string(m.uci()));
        }
        match r.best_move {
            Some(_) => Ok(()),
            None => Err(Fail::new(CsStatus::NoMove, "the side to move has no legal moves")),
        }
    })
}

// Learning and classification

/// Trains a profile for `player` from the games in a PGN file.
///
/// # Safety
/// `pgn_path` and `player` must be NUL-terminated strings; `out_profile`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_train(
    pgn_path: *const c_char,
    player: *const c_char,
    depth: u32,
    max_games: usize,
    seed: u64,
    out_profile: *mut *mut CsProfile,
) -> CsStatus {
    guard(|| {
        let path = str_arg(pgn_path, "pgn_path")?;
        let player = str_arg(player, "player")?;
        let slot = out(out_profile, "out_profile")?;
        let games = read_pgn_file(Path::new(path)).map_err(|e| Fail::new(CsStatus::Io, format!("{path}: {e}")))?.games;
        let cfg = LearnerConfig {
            search: SearchParams { depth, ..Default::default() },
            games_per_player: max_games,
            rng_seed: seed,
            ..Default::default()
        };
        let run = train_corpus(&games, player, &cfg).map_err(|e| Fail::new(CsStatus::InvalidArgument, e.to_string()))?;
        *slot = Box::into_raw(Box::new(CsProfile(run.profile)));
        Ok(())
    })
}

/// Hit ratios `H(S, M)` and `H(M, S)` over the games in a PGN file, at the
/// default window (moves 25 to 35).
///
/// # Safety
/// `pgn_path` must be a NUL-terminated string, both profiles live handles
/// and both outputs writable.
#[no_mangle]
pub unsafe extern "C" fn cs_hit_ratio(
    pgn_path: *const c_char,
    subject: *const CsProfile,
    opponent: *const CsProfile,
    depth: u32,
    epsilon: f64,
    out_h_sm: *mut f64,
    out_h_ms: *mut f64,
) -> CsStatus {
    guard(|| {
        let path = str_arg(pgn_path, "pgn_path")?;
        let s = handle(subject, "subject")?;
        let m = handle(opponent, "opponent")?;
        let h_sm = out(out_h_sm, "out_h_sm")?;
        let h_ms = out(out_h_ms, "out_h_ms")?;
        let games = read_pgn_file(Path::new(path)).map_err(|e| Fail::new(CsStatus::Io, format!("{path}: {e}")))?.games;
        let cfg = MatchupConfig { epsilon, search: SearchParams { depth, ..Default::default() }, ..Default::default() };
        let report = hit_ratio(&games, &s.0, &m.0, &cfg).map_err(|e| Fail::new(CsStatus::InvalidArgument, e.to_string()))?;
        *h_sm = report.h_sm;
        *h_ms = report.h_ms;
        Ok(())
    })
}
