#ifndef WAVEMODELS_H
#define WAVEMODELS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WmStatus {
  WM_STATUS_OK = 0,
  WM_STATUS_NULL_POINTER = 1,
  WM_STATUS_INVALID_ARGUMENT = 2,
  WM_STATUS_BUFFER_TOO_SMALL = 3,
  /**
   * Breaking or cavitation; the handle keeps the last valid state.
   */
  WM_STATUS_PHYSICAL_HALT = 4,
  WM_STATUS_DIVERGENCE = 5,
  WM_STATUS_ILL_POSED = 6,
  WM_STATUS_INTERNAL = 7,
  WM_STATUS_PANIC = 8,
} WmStatus;

typedef enum WmScalarModel {
  WM_SCALAR_MODEL_KDV = 0,
  WM_SCALAR_MODEL_WHITHAM = 1,
  WM_SCALAR_MODEL_WHITHAM2 = 2,
} WmScalarModel;

/**
 * Opaque KdV/Whitham integrator.
 */
typedef struct WmScalarSolver WmScalarSolver;

typedef struct WmVerdict {
  /**
   * 1 when well posed, 0 when ill posed.
   */
  int32_t well_posed;
  /**
   * Wavenumber where `omega^2 < 0` first occurs; NaN when well posed.
   */
  double witness_wavenumber;
  double omega_squared_min;
} WmVerdict;

typedef struct WmSolitary {
  double amplitude;
  double residual;
  uint64_t iterations;
} WmSolitary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread, NUL-terminated, into `buf`.
 * Returns the message length in bytes without the terminator; nothing is
 * written when `buf` is null or `len` is too small.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t wm_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wm_version(void);

/**
 * Phase velocity `omega(xi)/|xi|` of linear water waves.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum WmStatus wm_phase_velocity(double xi, double g, double depth, double *out);

/**
 * Group velocity `omega'(xi)` of linear water waves.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum WmStatus wm_group_velocity(double xi, double g, double depth, double *out);

/**
 * Airy propagator on `(zeta^, psi^)` at `|xi|` and time `t`, row-major into `out[4]`.
 *
 * # Safety
 * `out` must be null or valid for four writes.
 */
enum WmStatus wm_airy_propagator(double xi, double t, double g, double depth, double *out);

/**
 * Linear well-posedness of the abcd system; `a + b + c + d` must equal 1/3.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum WmStatus wm_classify_abcd(double a,
                               double b,
                               double c,
                               double d,
                               double g,
                               double depth,
                               struct WmVerdict *out);

/**
 * Breaking time `-2 / (3 inf u0')` of a simple wave sampled on the periodic grid
 * `x_j = -length/2 + j length/nodes`. Infinite when `u0` never steepens.
 *
 * # Safety
 * `u0` must point to `nodes` readable values; `out` must be valid for one write.
 */
enum WmStatus wm_breaking_time(double length, size_t nodes, const double *u0, double *out);

/**
 * Solitary wave of a scalar model at `speed_ratio * sqrt(g depth)` by Petviashvili
 * iteration; the profile, centred at `x = 0`, goes to `profile[nodes]`.
 *
 * # Safety
 * `profile` must be valid for `nodes` writes; `out` must be valid for one write.
 */
enum WmStatus wm_petviashvili(enum WmScalarModel model,
                              double speed_ratio,
                              double g,
                              double depth,
                              double length,
                              size_t nodes,
                              double tol,
                              uint64_t max_iter,
                              double *profile,
                              struct WmSolitary *out);

/**
 * Creates a KdV/Whitham integrator from `zeta0[nodes]` on the periodic grid of
 * the given length. Free with `wm_scalar_solver_free`.
 *
 * # Safety
 * `zeta0` must point to `nodes` readable values; `out` must be valid for one write.
 */
enum WmStatus wm_scalar_solver_new(enum WmScalarModel model,
                                   double g,
                                   double depth,
                                   double length,
                                   size_t nodes,
                                   const double *zeta0,
                                   struct WmScalarSolver **out);

/**
 * Caps the time step; `dt_max <= 0` removes the cap.
 *
 * # Safety
 * `handle` must come from `wm_scalar_solver_new` and not be freed.
 */
enum WmStatus wm_scalar_solver_set_dt_max(struct WmScalarSolver *handle, double dt_max);

/**
 * Integrates up to absolute time `t_end`.
 *
 * # Safety
 * `handle` must come from `wm_scalar_solver_new` and not be freed.
 */
enum WmStatus wm_scalar_solver_advance(struct WmScalarSolver *handle, double t_end);

/**
 * Current time of the integrator.
 *
 * # Safety
 * `handle` must come from `wm_scalar_solver_new`; `out` must be valid for one write.
 */
enum WmStatus wm_scalar_solver_time(const struct WmScalarSolver *handle, double *out);

/**
 * Copies the current elevation into `buf[len]`; `len` must be at least the node count.
 *
 * # Safety
 * `handle` must come from `wm_scalar_solver_new`; `buf` must be valid for `len` writes.
 */
enum WmStatus wm_scalar_solver_zeta(const struct WmScalarSolver *handle, double *buf, size_t len);

/**
 * Releases an integrator; null is ignored.
 *
 * # Safety
 * `handle` must be null or come from `wm_scalar_solver_new` and not be freed already.
 */
void wm_scalar_solver_free(struct WmScalarSolver *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAVEMODELS_H */
