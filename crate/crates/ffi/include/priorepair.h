#ifndef PRIOREPAIR_H
#define PRIOREPAIR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum {
  PR_STATUS_OK = 0,
  PR_STATUS_PARSE_ERROR = 1,
  PR_STATUS_VALIDATION_ERROR = 2,
  PR_STATUS_UNKNOWN_QUERY = 3,
  PR_STATUS_INVALID_ARGUMENT = 4,
  PR_STATUS_CAP_EXCEEDED = 5,
  PR_STATUS_IO_ERROR = 6,
  PR_STATUS_NULL_POINTER = 7,
  PR_STATUS_INVALID_UTF8 = 8,
  PR_STATUS_PANIC = 9,
} PrStatus;

/**
 * A parsed knowledge base with its conflicts.
 */
typedef struct PrKb PrKb;

/**
 * A resolved priority relation.
 */
typedef struct PrPriority PrPriority;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *pr_last_error(void);

/**
 * Library version as a static string.
 */
const char *pr_version(void);

/**
 * Parses a knowledge base from source texts; any text may be null.
 *
 * # Safety
 * Non-null text pointers must be nul-terminated; `out` must be writable.
 */
PrStatus pr_kb_new(const char *dataset,
                   const char *meta,
                   const char *constraints,
                   const char *queries,
                   const char *rules,
                   const char *taxonomy,
                   PrKb **out);

/**
 * Releases a knowledge base; null is ignored.
 *
 * # Safety
 * `kb` must come from `pr_kb_new` and not be used afterwards.
 */
void pr_kb_free(PrKb *kb);

/**
 * Number of facts and of minimal conflicts.
 *
 * # Safety
 * `kb` must be a live handle; the out-pointers must be writable.
 */
PrStatus pr_kb_sizes(const PrKb *kb, size_t *facts, size_t *conflicts);

/**
 * Minimal conflicts as a JSON array of sorted id arrays.
 *
 * # Safety
 * `kb` must be a live handle; `out` must be writable.
 */
PrStatus pr_conflicts_json(const PrKb *kb, char **out);

/**
 * Resolves the priority with strategy `u`, `d`, `ru` or `g`.
 *
 * # Safety
 * `kb` must be a live handle, `strategy` nul-terminated, `out` writable.
 */
PrStatus pr_priority_new(const PrKb *kb, const char *strategy, PrPriority **out);

/**
 * Releases a priority; null is ignored.
 *
 * # Safety
 * `p` must come from `pr_priority_new` and not be used afterwards.
 */
void pr_priority_free(PrPriority *p);

/**
 * Number of pairs in a priority.
 *
 * # Safety
 * `p` must be a live handle; `len` must be writable.
 */
PrStatus pr_priority_len(const PrPriority *p, size_t *len);

/**
 * Whether the answer `tuple` (of `arity` constants) to `query` is entailed
 * under repair kind `S`/`P`/`C` and semantics `brave`/`AR`/`IAR`.
 *
 * # Safety
 * Handles must be live; `tuple` must hold `arity` nul-terminated strings
 * (it may be null when `arity` is 0); `entailed` must be writable.
 */
PrStatus pr_decide(const PrKb *kb,
                   const PrPriority *priority,
                   const char *query,
                   const char *repair,
                   const char *semantics,
                   const char *const *tuple,
                   size_t arity,
                   bool *entailed);

/**
 * Verdicts for every candidate answer of `query` as a JSON array of
 * `{"tuple": [...], "entailed": bool}` objects sorted by tuple.
 *
 * # Safety
 * Handles must be live; strings nul-terminated; `out` writable.
 */
PrStatus pr_answers_json(const PrKb *kb,
                         const PrPriority *priority,
                         const char *query,
                         const char *repair,
                         const char *semantics,
                         char **out);

/**
 * The logic program computing the priority for a strategy.
 *
 * # Safety
 * `strategy` must be nul-terminated; `out` writable.
 */
PrStatus pr_emit_priority(const char *strategy, char **out);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void pr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRIOREPAIR_H */
