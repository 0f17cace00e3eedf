#ifndef BLOCH_SCOPE_H
#define BLOCH_SCOPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Values 1 to 5 match the command-line exit codes.
 */
typedef enum BsStatus {
  BS_STATUS_OK = 0,
  BS_STATUS_IO = 1,
  BS_STATUS_INVALID_INPUT = 2,
  BS_STATUS_NOT_SELF_MAP = 3,
  BS_STATUS_UNSUPPORTED_WEIGHT = 4,
  BS_STATUS_NUMERIC_FAILURE = 5,
  BS_STATUS_NULL_POINTER = 6,
  BS_STATUS_PANIC = 7,
} BsStatus;

typedef enum BsVerdict {
  BS_VERDICT_COMPACT = 0,
  BS_VERDICT_NON_COMPACT = 1,
  BS_VERDICT_INCONCLUSIVE = 2,
} BsVerdict;

/**
 * Parsed analytic map.
 */
typedef struct BsSymbol BsSymbol;

/**
 * Parsed weight.
 */
typedef struct BsWeight BsWeight;

/**
 * Engine settings. Obtain defaults from `bs_options_default`.
 */
typedef struct BsOptions {
  uint32_t depth;
  double eps_boundary;
  uint32_t angles;
  uint32_t k_max;
  uint32_t j_max;
  double compact_tol;
} BsOptions;

typedef struct BsComplex {
  double re;
  double im;
} BsComplex;

typedef struct BsNorm {
  double value_at_zero;
  double seminorm;
  double total;
  struct BsComplex witness;
  bool converged;
} BsNorm;

typedef struct BsEssentialBounds {
  double l;
  double l_seminorm;
  double lower;
  double upper;
  double phi_norm;
  enum BsVerdict verdict;
  bool scan_converged;
} BsEssentialBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *bs_version(void);

/**
 * Message for the most recent failed call on this thread; empty after a
 * successful call. Valid until the next call on the same thread.
 */
const char *bs_last_error_message(void);

struct BsOptions bs_options_default(void);

/**
 * Parses a symbol expression into a new handle stored in `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BsStatus bs_symbol_parse(const char *text, struct BsSymbol **out);

/**
 * Releases a symbol handle. Null is ignored.
 *
 * # Safety
 * `symbol` must come from `bs_symbol_parse` and not be used afterwards.
 */
void bs_symbol_free(struct BsSymbol *symbol);

/**
 * Canonical text of a symbol; release it with `bs_string_free`. Returns
 * null if `symbol` is null.
 *
 * # Safety
 * `symbol` must be a live handle or null.
 */
char *bs_symbol_to_string(const struct BsSymbol *symbol);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from `bs_symbol_to_string` and not be used afterwards.
 */
void bs_string_free(char *s);

/**
 * Evaluates the symbol and its derivative at `z`, which must lie in the
 * open unit disk. Either output may be null.
 *
 * # Safety
 * `symbol` must be a live handle; outputs must be valid or null.
 */
enum BsStatus bs_symbol_eval(const struct BsSymbol *symbol,
                             struct BsComplex z,
                             struct BsComplex *value,
                             struct BsComplex *derivative);

/**
 * Parses a weight specification (`valpha:<a>`, `log`, `custom:<path>`).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BsStatus bs_weight_parse(const char *text, struct BsWeight **out);

/**
 * Releases a weight handle. Null is ignored.
 *
 * # Safety
 * `weight` must come from `bs_weight_parse` and not be used afterwards.
 */
void bs_weight_free(struct BsWeight *weight);

/**
 * # Safety
 * `weight` must be a live handle and `out` a valid pointer.
 */
enum BsStatus bs_weight_at(const struct BsWeight *weight, struct BsComplex z, double *out);

/**
 * `|f(0)| + sup μ|f'|`. `opts` may be null for defaults.
 *
 * # Safety
 * Handles must be live; `opts` valid or null; `out` valid.
 */
enum BsStatus bs_bloch_norm(const struct BsSymbol *symbol,
                            const struct BsWeight *weight,
                            const struct BsOptions *opts,
                            struct BsNorm *out);

/**
 * Boundary scan and essential-norm bounds for `C_φ: B^α → B^μ`.
 *
 * # Safety
 * Handles must be live; `opts` valid or null; `out` valid.
 */
enum BsStatus bs_essential_bounds(const struct BsSymbol *symbol,
                                  double alpha,
                                  const struct BsWeight *weight,
                                  const struct BsOptions *opts,
                                  struct BsEssentialBounds *out);

/**
 * Power-criterion estimate; requires a standard weight.
 *
 * # Safety
 * Handles must be live; `opts` valid or null; `out` valid.
 */
enum BsStatus bs_zhao_estimate(const struct BsSymbol *symbol,
                               double alpha,
                               const struct BsWeight *weight,
                               const struct BsOptions *opts,
                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLOCH_SCOPE_H */
