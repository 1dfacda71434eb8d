#ifndef RELIC_H
#define RELIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RelicStatus {
  RELIC_STATUS_OK = 0,
  RELIC_STATUS_NULL_ARGUMENT = 1,
  RELIC_STATUS_INVALID_UTF8 = 2,
  RELIC_STATUS_SYNTAX = 3,
  RELIC_STATUS_INVALID = 4,
  RELIC_STATUS_UNKNOWN_NAME = 5,
  RELIC_STATUS_BUDGET_EXCEEDED = 6,
  RELIC_STATUS_SPACE_MISMATCH = 7,
  RELIC_STATUS_CONSISTENCY = 8,
  RELIC_STATUS_PANIC = 9,
} RelicStatus;

/**
 * A finite ordered algebra.
 */
typedef struct RelicAlgebra RelicAlgebra;

/**
 * A state space with named relations, parsed from `space ...` and `name = {...}` lines.
 */
typedef struct RelicEnv RelicEnv;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call on the same thread.
 */
const char *relic_last_error(void);

/**
 * # Safety
 * `s` is null or a string returned by this library that has not been freed.
 */
void relic_string_free(char *s);

/**
 * # Safety
 * `source` is a NUL-terminated string; `out` is writable.
 */
enum RelicStatus relic_env_parse(const char *source, struct RelicEnv **out);

/**
 * # Safety
 * `env` is null or a handle from [`relic_env_parse`] that has not been freed.
 */
void relic_env_free(struct RelicEnv *env);

/**
 * Evaluate a term over the relations of `env`. `*out` receives the relation literal,
 * or null when the term is undefined.
 *
 * # Safety
 * `env` is a live handle, `term` a NUL-terminated string, `out` writable.
 */
enum RelicStatus relic_env_eval(const struct RelicEnv *env, const char *term, char **out);

/**
 * Decide a triple such as `{1} a;b {1,2}`, totally correct when `total` is set and
 * partially correct otherwise.
 *
 * # Safety
 * `env` is a live handle, `triple` a NUL-terminated string, `holds` writable.
 */
enum RelicStatus relic_hoare_check(const struct RelicEnv *env,
                                   const char *triple,
                                   bool total,
                                   bool *holds);

/**
 * # Safety
 * `source` is a NUL-terminated string; `out` is writable.
 */
enum RelicStatus relic_algebra_parse(const char *source, struct RelicAlgebra **out);

/**
 * # Safety
 * `alg` is null or a handle from [`relic_algebra_parse`] that has not been freed.
 */
void relic_algebra_free(struct RelicAlgebra *alg);

/**
 * Class membership, by snake_case class name such as `ordered_semigroup`.
 *
 * # Safety
 * `alg` is a live handle, `class_name` a NUL-terminated string, `member` writable.
 */
enum RelicStatus relic_algebra_check_class(const struct RelicAlgebra *alg,
                                           const char *class_name,
                                           bool *member);

/**
 * Check a law exhaustively over one carrier size. `domain` is `REL`, `LTREL`, `TOTAL`
 * or `LTREL0`. When the law fails and `counterexample` is not null, it receives the
 * rendered counterexample.
 *
 * # Safety
 * `formula` and `domain` are NUL-terminated strings, `valid` is writable, and
 * `counterexample` is null or writable.
 */
enum RelicStatus relic_law_check(const char *formula,
                                 const char *domain,
                                 size_t size,
                                 uint64_t budget,
                                 bool *valid,
                                 char **counterexample);

/**
 * Check the `∀` script and the grid strategy on `A_n` with default sampling.
 * `holds` is false when a check fails or the budget ran out.
 *
 * # Safety
 * `holds` is writable.
 */
enum RelicStatus relic_game_verify(size_t n, uint64_t budget, uint64_t seed, bool *holds);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RELIC_H */
