/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef DIVBAR_H
#define DIVBAR_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum DivbarStatus {
  DIVBAR_STATUS_OK = 0,
  DIVBAR_STATUS_NULL_POINTER = 1,
  DIVBAR_STATUS_INVALID_UTF8 = 2,
  DIVBAR_STATUS_CONFIG = 3,
  DIVBAR_STATUS_DOMAIN = 4,
  DIVBAR_STATUS_EVALUATION = 5,
  DIVBAR_STATUS_EXTRAPOLATION = 6,
  DIVBAR_STATUS_INSUFFICIENT_DATA = 7,
  DIVBAR_STATUS_DEGENERATE_BARRIER = 8,
  DIVBAR_STATUS_GRID_TOO_SHORT = 9,
  DIVBAR_STATUS_OUT_OF_RANGE = 10,
  DIVBAR_STATUS_PANIC = 99,
} DivbarStatus;

/**
 * Certifying result of an optimality certificate.
 */
typedef enum DivbarRule {
  DIVBAR_RULE_THM41 = 0,
  DIVBAR_RULE_THM42 = 1,
  DIVBAR_RULE_COR41 = 2,
  DIVBAR_RULE_THM43 = 3,
  DIVBAR_RULE_LEMMA52_DIRECT = 4,
  DIVBAR_RULE_CONJECTURE1 = 5,
  DIVBAR_RULE_CONJECTURE2 = 6,
  DIVBAR_RULE_NONE = 7,
} DivbarRule;

/**
 * Parsed model configuration.
 */
typedef struct DivbarModel DivbarModel;

/**
 * Tabulated scale function.
 */
typedef struct DivbarScaleGrid DivbarScaleGrid;

/**
 * One row of a scale grid.
 */
typedef struct DivbarGridRow {
  double x;
  double w;
  double w1;
  double w2;
  double err;
} DivbarGridRow;

typedef struct DivbarCertificate {
  double b_star;
  double w1_min;
  enum DivbarRule rule;
  bool conjectural;
  bool grid_minimum_confirmed;
} DivbarCertificate;

typedef struct DivbarSimulation {
  double estimate;
  double std_error;
  double ruin_probability;
  size_t paths;
  double horizon;
} DivbarSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next call into the library from this thread.
 */
const char *divbar_last_error_message(void);

/**
 * Static label of a rule code, e.g. `"Thm4.1"`; null for an unknown code.
 */
const char *divbar_rule_label(int32_t rule);

/**
 * Parse a NUL-terminated TOML configuration.
 *
 * # Safety
 * `toml` must be a valid C string and `out` a valid pointer.
 */
enum DivbarStatus divbar_model_from_toml(const char *toml, struct DivbarModel **out);

/**
 * # Safety
 * `model` must come from [`divbar_model_from_toml`] and not be used
 * afterwards; null is ignored.
 */
void divbar_model_free(struct DivbarModel *model);

/**
 * The discount rate `control.q` of the configuration.
 *
 * # Safety
 * Pointers must be valid.
 */
enum DivbarStatus divbar_model_q(const struct DivbarModel *model, double *out);

/**
 * Laplace exponent `ψ(s)` for `s >= 0`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum DivbarStatus divbar_model_psi(const struct DivbarModel *model, double s, double *out);

/**
 * Right inverse `ρ(q)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum DivbarStatus divbar_model_rho(const struct DivbarModel *model, double q, double *out);

/**
 * Tabulate the scale function at rate `q`. `n = 0` and a non-positive or
 * NaN `x_max` select the configured (or automatic) values.
 *
 * # Safety
 * Pointers must be valid.
 */
enum DivbarStatus divbar_scale_grid_build(const struct DivbarModel *model,
                                          double q,
                                          size_t n,
                                          double x_max,
                                          struct DivbarScaleGrid **out);

/**
 * # Safety
 * `grid` must come from [`divbar_scale_grid_build`] and not be used
 * afterwards; null is ignored.
 */
void divbar_scale_grid_free(struct DivbarScaleGrid *grid);

/**
 * Number of rows (`N + 1`).
 *
 * # Safety
 * Pointers must be valid.
 */
enum DivbarStatus divbar_scale_grid_len(const struct DivbarScaleGrid *grid, size_t *out);

/**
 * Row `i` of the grid.
 *
 * # Safety
 * Pointers must be valid.
 */
enum DivbarStatus divbar_scale_grid_row(const struct DivbarScaleGrid *grid,
                                        size_t i,
                                        struct DivbarGridRow *out);

/**
 * `W` (order 0), `W'` or `W''` at `x` with an error estimate; `error` may
 * be null.
 *
 * # Safety
 * Pointers must be valid.
 */
enum DivbarStatus divbar_scale_eval(const struct DivbarScaleGrid *grid,
                                    double x,
                                    uint8_t order,
                                    double *value,
                                    double *error);

/**
 * Optimal barrier and `W'(b*)`; `w1_min` may be null.
 *
 * # Safety
 * Pointers must be valid.
 */
enum DivbarStatus divbar_find_b_star(const struct DivbarScaleGrid *grid,
                                     double *b_star,
                                     double *w1_min);

/**
 * Value `V_b(x)` of the barrier strategy at level `b`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum DivbarStatus divbar_barrier_value(const struct DivbarScaleGrid *grid,
                                       double b,
                                       double x,
                                       double *out);

/**
 * Locate and certify the optimal barrier.
 *
 * # Safety
 * Pointers must be valid; `grid` must be built from `model`.
 */
enum DivbarStatus divbar_certify(const struct DivbarModel *model,
                                 const struct DivbarScaleGrid *grid,
                                 struct DivbarCertificate *out);

/**
 * Monte Carlo estimate of `V_b(x)` discounted at the configured `q`;
 * `b = INFINITY` means no barrier.
 *
 * # Safety
 * Pointers must be valid.
 */
enum DivbarStatus divbar_simulate_dividends(const struct DivbarModel *model,
                                            double b,
                                            double x,
                                            size_t replications,
                                            double dt,
                                            uint64_t seed,
                                            struct DivbarSimulation *out);

/**
 * `P(N_t = n)` for the claim-counting process.
 *
 * # Safety
 * Pointers must be valid.
 */
enum DivbarStatus divbar_counting_pmf(const struct DivbarModel *model,
                                      double t,
                                      size_t n,
                                      double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIVBAR_H */
