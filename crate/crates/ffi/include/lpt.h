/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef LPT_H
#define LPT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum LptStatus {
  LPT_STATUS_OK = 0,
  LPT_STATUS_NULL_ARGUMENT = 1,
  LPT_STATUS_INVALID_UTF8 = 2,
  LPT_STATUS_PARSE_ERROR = 3,
  LPT_STATUS_UNKNOWN_ENTRY = 4,
  LPT_STATUS_RULE_ERROR = 5,
  LPT_STATUS_ENGINE_ERROR = 6,
  LPT_STATUS_BRANCH_CONFLICT = 7,
  LPT_STATUS_NOTHING_TO_DO = 8,
  LPT_STATUS_PANIC = 9,
} LptStatus;

/**
 * A parsed program.
 */
typedef struct LptProgram LptProgram;

/**
 * A derivation session over a base program.
 */
typedef struct LptSession LptSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into this library on the same thread.
 */
const char *lpt_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` is null or was returned by this library and not yet freed.
 */
void lpt_string_free(char *s);

/**
 * Parses program text.
 *
 * # Safety
 * `text` is a NUL-terminated string; `out` is valid for one write.
 */
enum LptStatus lpt_program_parse(const char *text, struct LptProgram **out);

/**
 * Loads a program from the embedded corpus by name.
 *
 * # Safety
 * `name` is a NUL-terminated string; `out` is valid for one write.
 */
enum LptStatus lpt_program_load(const char *name, struct LptProgram **out);

/**
 * Canonical program text.
 *
 * # Safety
 * `p` is a live program handle; `out` is valid for one write.
 */
enum LptStatus lpt_program_to_string(const struct LptProgram *p, char **out);

/**
 * Number of clauses, or 0 for null.
 *
 * # Safety
 * `p` is null or a live program handle.
 */
size_t lpt_program_clause_count(const struct LptProgram *p);

/**
 * # Safety
 * `p` is null or a program handle not yet freed.
 */
void lpt_program_free(struct LptProgram *p);

/**
 * Solves `query`; writes a JSON document
 * `{"answers": [{"X": "..."}], "steps": n, "exhausted": b}`.
 * `max_answers == 0` means no limit.
 *
 * # Safety
 * `p` is a live program handle; `query` a NUL-terminated string; `out`
 * valid for one write.
 */
enum LptStatus lpt_solve(const struct LptProgram *p,
                         const char *query,
                         size_t max_answers,
                         char **out);

/**
 * Starts a session over a copy of `base`, with the corpus lemmas.
 *
 * # Safety
 * `base` is a live program handle; `out` is valid for one write.
 */
enum LptStatus lpt_session_new(const struct LptProgram *base, struct LptSession **out);

/**
 * Applies one step given as JSON (the script step format).
 *
 * # Safety
 * `s` is a live session handle; `step_json` a NUL-terminated string.
 */
enum LptStatus lpt_session_apply(struct LptSession *s, const char *step_json, bool verify_now);

/**
 * Moves the cursor back one step; `NothingToDo` at the start.
 *
 * # Safety
 * `s` is a live session handle.
 */
enum LptStatus lpt_session_undo(struct LptSession *s);

/**
 * Moves the cursor forward one step; `NothingToDo` at the end.
 *
 * # Safety
 * `s` is a live session handle.
 */
enum LptStatus lpt_session_redo(struct LptSession *s);

/**
 * Program text at the cursor.
 *
 * # Safety
 * `s` is a live session handle; `out` is valid for one write.
 */
enum LptStatus lpt_session_program(const struct LptSession *s, char **out);

/**
 * Ranked goal-introduction candidates for `clause`, as a JSON array.
 *
 * # Safety
 * `s` is a live session handle; `clause` a NUL-terminated string; `out`
 * valid for one write.
 */
enum LptStatus lpt_session_candidates(const struct LptSession *s, const char *clause, char **out);

/**
 * Applied steps up to the cursor as script JSON.
 *
 * # Safety
 * `s` is a live session handle; `base` a NUL-terminated string naming the
 * base program; `out` valid for one write.
 */
enum LptStatus lpt_session_export(const struct LptSession *s, const char *base, char **out);

/**
 * # Safety
 * `s` is null or a session handle not yet freed.
 */
void lpt_session_free(struct LptSession *s);

/**
 * Replays a corpus script (by name) or script JSON against the embedded
 * corpus. Writes `{"final": text, "matches_expected": bool|null}`.
 *
 * # Safety
 * `script` is a NUL-terminated string; `out` is valid for one write.
 */
enum LptStatus lpt_replay(const char *script, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LPT_H */
