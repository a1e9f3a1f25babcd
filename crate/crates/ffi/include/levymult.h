#ifndef LEVYMULT_H
#define LEVYMULT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
enum LmStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  LM_STATUS_OK = 0,
  LM_STATUS_NULL_POINTER = 1,
  LM_STATUS_INVALID_ARGUMENT = 2,
  LM_STATUS_PARSE_ERROR = 3,
  LM_STATUS_EVALUATION_ERROR = 4,
  LM_STATUS_IO_ERROR = 5,
  LM_STATUS_CHECK_FAILED = 6,
  LM_STATUS_PANIC = 7,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum LmStatus LmStatus;
#else
typedef int32_t LmStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * A complex sample field on a periodic grid.
 */
typedef struct LmField LmField;

/**
 * A symmetric compound Poisson jump model.
 */
typedef struct LmJumpModel LmJumpModel;

/**
 * A symbol evaluator bound to a quadrature level.
 */
typedef struct LmSymbol LmSymbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success. Valid until the
 * next call on the same thread.
 */
const char *lm_last_error_message(void);

/**
 * Static name of a status code.
 */
const char *lm_status_name(int32_t status);

const char *lm_version(void);

/**
 * Frees a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void lm_string_free(char *s);

/**
 * Builds an evaluator from a descriptor JSON document. `level == 0` picks the default for
 * the descriptor's dimension.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
LmStatus lm_symbol_from_json(const char *json, uint32_t level, struct LmSymbol **out);

/**
 * # Safety
 * `symbol` must be null or a live handle.
 */
void lm_symbol_free(struct LmSymbol *symbol);

/**
 * # Safety
 * `symbol` must be a live handle; `out` writable.
 */
LmStatus lm_symbol_dim(const struct LmSymbol *symbol, size_t *out);

/**
 * Evaluates `m(xi)` for one frequency of `n` coordinates.
 *
 * # Safety
 * `xi` must hold `n` doubles; `re` and `im` writable.
 */
LmStatus lm_symbol_eval(const struct LmSymbol *symbol,
                        const double *xi,
                        size_t n,
                        double *re,
                        double *im);

/**
 * Creates a field from split real/imaginary samples in row-major order. `im` may be null
 * for real data.
 *
 * # Safety
 * `shape` and `box_len` hold `n` entries; `re` (and `im` if given) hold the product of
 * `shape`; `out` writable.
 */
LmStatus lm_field_new(size_t n,
                      const size_t *shape,
                      const double *box_len,
                      const double *re,
                      const double *im,
                      struct LmField **out);

/**
 * # Safety
 * `path` NUL-terminated; `out` writable.
 */
LmStatus lm_field_read_gf01(const char *path, struct LmField **out);

/**
 * # Safety
 * `field` live; `path` NUL-terminated.
 */
LmStatus lm_field_write_gf01(const struct LmField *field, const char *path);

/**
 * # Safety
 * `field` must be null or a live handle.
 */
void lm_field_free(struct LmField *field);

/**
 * Number of samples.
 *
 * # Safety
 * `field` live; `out` writable.
 */
LmStatus lm_field_len(const struct LmField *field, size_t *out);

/**
 * Copies the samples into caller buffers of `len` doubles each; `len` must equal the
 * sample count.
 *
 * # Safety
 * `re` and `im` hold `len` writable doubles.
 */
LmStatus lm_field_copy_data(const struct LmField *field, double *re, double *im, size_t len);

/**
 * `‖f‖_p` with the grid's cell volume; `p = INFINITY` gives the max modulus.
 *
 * # Safety
 * `field` live; `out` writable.
 */
LmStatus lm_field_lp_norm(const struct LmField *field, double p, double *out);

/**
 * Applies the multiplier; the result is a new field handle.
 *
 * # Safety
 * `symbol` and `field` live; `out` writable.
 */
LmStatus lm_apply(const struct LmSymbol *symbol, const struct LmField *field, struct LmField **out);

/**
 * # Safety
 * `json` NUL-terminated; `out` writable.
 */
LmStatus lm_jump_model_from_json(const char *json, struct LmJumpModel **out);

/**
 * # Safety
 * `model` must be null or a live handle.
 */
void lm_jump_model_free(struct LmJumpModel *model);

/**
 * Lévy exponent `ρ(ξ) = Σ λ_j (cos(ξ·z_j) − 1)`.
 *
 * # Safety
 * `xi` holds `n` doubles; `out` writable.
 */
LmStatus lm_jump_model_exponent(const struct LmJumpModel *model,
                                const double *xi,
                                size_t n,
                                double *out);

/**
 * Multiplier of the martingale transform with modulator `phi_json`: the infinite-horizon
 * limit when `t_final` is infinite, the finite-horizon symbol otherwise.
 *
 * # Safety
 * `phi_json` NUL-terminated; `xi` holds `n` doubles; `re`, `im` writable.
 */
LmStatus lm_jump_model_symbol(const struct LmJumpModel *model,
                              const char *phi_json,
                              const double *xi,
                              size_t n,
                              double t_final,
                              double *re,
                              double *im);

/**
 * Runs a named check matrix. `options_json` may be null for defaults. The report array is
 * written to `report_json` even when a check fails, in which case the status is
 * `CheckFailed`.
 *
 * # Safety
 * `name` NUL-terminated; `options_json` null or NUL-terminated; `report_json` writable.
 */
LmStatus lm_check_run(const char *name, const char *options_json, char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEVYMULT_H */
