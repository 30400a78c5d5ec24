#ifndef PROPPR_H
#define PROPPR_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a C API call.
typedef enum PropprStatus {
  PROPPR_STATUS_OK = 0,
  // A required pointer argument was null.
  PROPPR_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  PROPPR_STATUS_INVALID_UTF8 = 2,
  // Rule or query syntax error.
  PROPPR_STATUS_SYNTAX = 3,
  // Inconsistent predicate arity, or a predicate with both rules and facts.
  PROPPR_STATUS_PROGRAM = 4,
  // Malformed facts or parameter file.
  PROPPR_STATUS_FORMAT = 5,
  // A query uses a predicate with no rules or facts.
  PROPPR_STATUS_UNKNOWN_PREDICATE = 6,
  // Grounding failed: bad edge weight, restart bound, node budget.
  PROPPR_STATUS_GROUNDING = 7,
  // Out-of-range parameter.
  PROPPR_STATUS_INVALID_PARAMS = 8,
  // An index was out of range.
  PROPPR_STATUS_OUT_OF_RANGE = 9,
  // Internal failure (a caught panic).
  PROPPR_STATUS_INTERNAL = 10,
} PropprStatus;

// Ranked answers of one query.
typedef struct PropprAnswers PropprAnswers;

// A loaded program, database, and parameters.
typedef struct PropprEngine PropprEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty if none. Valid
// until the next failing call on the same thread.
const char *proppr_last_error(void);

// Loads a program from rule text and tab-separated fact text (`facts` may
// be null). On success stores a new engine in `*out`.
//
// # Safety
// `rules` and `facts` must be null or NUL-terminated; `out` must be a valid
// pointer.
enum PropprStatus proppr_engine_new(const char *rules,
                                    const char *facts,
                                    struct PropprEngine **out);

// Releases an engine. Null is ignored.
//
// # Safety
// `engine` must be null or a pointer from [`proppr_engine_new`] not yet freed.
void proppr_engine_free(struct PropprEngine *engine);

// Replaces the feature weights with `feature<TAB>weight` lines. Features
// not listed weigh 1.
//
// # Safety
// `engine` must be a live engine; `tsv` NUL-terminated.
enum PropprStatus proppr_engine_set_weights(struct PropprEngine *engine, const char *tsv);

// Sets grounding parameters. `exp_weights` selects `exp` edge weighting
// instead of linear; `exact` answers by full grounding and power iteration.
//
// # Safety
// `engine` must be a live engine.
enum PropprStatus proppr_engine_configure(struct PropprEngine *engine,
                                          double alpha,
                                          double alpha_prime,
                                          double epsilon,
                                          uint32_t max_t,
                                          bool exp_weights,
                                          bool exact);

// Answers `query` (e.g. `"about(a,Z)"`). On success stores the ranked
// answers in `*out`; a query without solutions gives an empty list.
//
// # Safety
// `engine` must be a live engine; `query` NUL-terminated; `out` valid.
enum PropprStatus proppr_engine_answer(const struct PropprEngine *engine,
                                       const char *query,
                                       struct PropprAnswers **out);

// Number of answers; 0 for null.
//
// # Safety
// `answers` must be null or a live answer list.
uintptr_t proppr_answers_len(const struct PropprAnswers *answers);

// The answer at `rank` (0 = most probable). `*text` points into the answer
// list and lives until [`proppr_answers_free`].
//
// # Safety
// `answers` must be a live answer list; `text` and `probability` valid.
enum PropprStatus proppr_answers_get(const struct PropprAnswers *answers,
                                     uintptr_t rank,
                                     const char **text,
                                     double *probability);

// Releases an answer list. Null is ignored.
//
// # Safety
// `answers` must be null or a list from [`proppr_engine_answer`] not yet freed.
void proppr_answers_free(struct PropprAnswers *answers);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROPPR_H */
