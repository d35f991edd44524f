/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef CHESS_STYLE_H
#define CHESS_STYLE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_UTF8 = 2,
  CS_STATUS_INVALID_ARGUMENT = 3,
  CS_STATUS_IO = 4,
  CS_STATUS_PARSE = 5,
  CS_STATUS_NO_MOVE = 6,
  CS_STATUS_PANIC = 7,
} CsStatus;

// A chess position.
typedef struct CsPosition CsPosition;

// A trained or hand-built style profile.
typedef struct CsProfile CsProfile;

// A search instance with its transposition table.
typedef struct CsSearcher CsSearcher;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null after a
// successful one. Valid until the next call on this thread.
const char *cs_last_error(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a pointer returned by this library and not yet freed.
void cs_string_free(char *s);

// Number of features in every profile.
size_t cs_feature_count(void);

// The standard starting position.
struct CsPosition *cs_position_startpos(void);

// Parses a FEN string into a new position.
//
// # Safety
// `fen` must be a NUL-terminated string; `out_position` must be writable.
enum CsStatus cs_position_from_fen(const char *fen, struct CsPosition **out_position);

// # Safety
// `position` must be null or a handle from this library not yet freed.
void cs_position_free(struct CsPosition *position);

// FEN of `position`, to be released with [`cs_string_free`].
//
// # Safety
// `position` must be a live handle; `out_fen` must be writable.
enum CsStatus cs_position_to_fen(const struct CsPosition *position, char **out_fen);

// Number of legal moves in `position`.
//
// # Safety
// `position` must be a live handle; `out_count` must be writable.
enum CsStatus cs_position_legal_move_count(const struct CsPosition *position, size_t *out_count);

// Plays a move given in UCI notation ("e2e4", "e7e8q"), producing a new
// position and leaving `position` unchanged.
//
// # Safety
// `position` must be a live handle, `uci` a NUL-terminated string and
// `out_position` writable.
enum CsStatus cs_position_apply_uci(const struct CsPosition *position,
                                    const char *uci,
                                    struct CsPosition **out_position);

// Leaf count of the legal move tree to `depth`.
//
// # Safety
// `position` must be a live handle; `out_nodes` must be writable.
enum CsStatus cs_perft(const struct CsPosition *position, uint32_t depth, uint64_t *out_nodes);

// A profile for `player` with every weight set to 1.
//
// # Safety
// `player` must be a NUL-terminated string; `out_profile` must be writable.
enum CsStatus cs_profile_uniform(const char *player, struct CsProfile **out_profile);

// Reads a profile file written by the `train` command or
// [`cs_profile_save`].
//
// # Safety
// `path` must be a NUL-terminated string; `out_profile` must be writable.
enum CsStatus cs_profile_load(const char *path, struct CsProfile **out_profile);

// Writes `profile` to `path`.
//
// # Safety
// `profile` must be a live handle and `path` a NUL-terminated string.
enum CsStatus cs_profile_save(const struct CsProfile *profile, const char *path);

// # Safety
// `profile` must be null or a handle from this library not yet freed.
void cs_profile_free(struct CsProfile *profile);

// Weight of feature `index`.
//
// # Safety
// `profile` must be a live handle; `out_weight` must be writable.
enum CsStatus cs_profile_weight(const struct CsProfile *profile, size_t index, double *out_weight);

// Player name of `profile`, to be released with [`cs_string_free`].
//
// # Safety
// `profile` must be a live handle; `out_name` must be writable.
enum CsStatus cs_profile_player(const struct CsProfile *profile, char **out_name);

// Static evaluation of `position` under `profile`, from the side to move.
//
// # Safety
// Both handles must be live; `out_value` must be writable.
enum CsStatus cs_evaluate(const struct CsPosition *position,
                          const struct CsProfile *profile,
                          double *out_value);

// A searcher with a transposition table of `tt_entries` slots (0 disables
// the table).
struct CsSearcher *cs_searcher_new(size_t tt_entries);

// # Safety
// `searcher` must be null or a handle from this library not yet freed.
void cs_searcher_free(struct CsSearcher *searcher);

// Searches `position` to `depth` ply under `profile`. The value is from
// the side to move; the best move is written in UCI notation and must be
// released with [`cs_string_free`]. Returns [`CsStatus::NoMove`] with the
// value set when the position is checkmate or stalemate.
//
// # Safety
// All handles must be live; `out_value` and `out_best_move` must be
// writable (`out_best_move` may be null to skip the move).
enum CsStatus cs_search(struct CsSearcher *searcher,
                        const struct CsPosition *position,
                        const struct CsProfile *profile,
                        uint32_t depth,
                        double *out_value,
                        char **out_best_move);

// Trains a profile for `player` from the games in a PGN file.
//
// # Safety
// `pgn_path` and `player` must be NUL-terminated strings; `out_profile`
// must be writable.
enum CsStatus cs_train(const char *pgn_path,
                       const char *player,
                       uint32_t depth,
                       size_t max_games,
                       uint64_t seed,
                       struct CsProfile **out_profile);

// Hit ratios `H(S, M)` and `H(M, S)` over the games in a PGN file, at the
// default window (moves 25 to 35).
//
// # Safety
// `pgn_path` must be a NUL-terminated string, both profiles live handles
// and both outputs writable.
enum CsStatus cs_hit_ratio(const char *pgn_path,
                           const struct CsProfile *subject,
                           const struct CsProfile *opponent,
                           uint32_t depth,
                           double epsilon,
                           double *out_h_sm,
                           double *out_h_ms);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHESS_STYLE_H */
