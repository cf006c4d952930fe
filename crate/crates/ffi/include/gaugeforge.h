#ifndef GAUGEFORGE_H
#define GAUGEFORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum GfStatus {
  GF_STATUS_OK = 0,
  GF_STATUS_NULL_POINTER = 1,
  GF_STATUS_INVALID_UTF8 = 2,
  GF_STATUS_SYNTAX = 3,
  GF_STATUS_UNKNOWN_IDENTIFIER = 4,
  GF_STATUS_UNBOUND_SYMBOL = 5,
  GF_STATUS_DOMAIN = 6,
  GF_STATUS_HIGHER_ORDER = 7,
  GF_STATUS_INVALID_LAGRANGIAN = 8,
  GF_STATUS_NOT_SECOND_ORDER = 9,
  GF_STATUS_INVALID_ARGUMENT = 10,
  GF_STATUS_NON_FINITE_STATE = 11,
  GF_STATUS_NOT_TIME_ONLY = 12,
  GF_STATUS_INTERNAL = 13,
  GF_STATUS_PANIC = 14,
} GfStatus;

typedef enum GfVar {
  GF_VAR_T = 0,
  GF_VAR_X = 1,
  GF_VAR_V = 2,
  GF_VAR_A = 3,
} GfVar;

typedef enum GfNullVerdict {
  GF_NULL_VERDICT_CERTIFIED_SYMBOLIC = 0,
  GF_NULL_VERDICT_CERTIFIED_NUMERIC = 1,
  GF_NULL_VERDICT_NOT_NULL = 2,
} GfNullVerdict;

typedef enum GfColumn {
  GF_COLUMN_TIME = 0,
  GF_COLUMN_POSITION = 1,
  GF_COLUMN_VELOCITY = 2,
  GF_COLUMN_ENERGY = 3,
  GF_COLUMN_HAMILTONIAN = 4,
  GF_COLUMN_BALANCE_RESIDUAL = 5,
} GfColumn;

/**
 * Opaque map from constant or variable names to values.
 */
typedef struct GfBindings GfBindings;

/**
 * Opaque expression handle.
 */
typedef struct GfExpr GfExpr;

/**
 * Opaque sampled trajectory.
 */
typedef struct GfTrajectory GfTrajectory;

/**
 * Time grid and initial state of `ẍ + stiffness·x = force(t)`.
 */
typedef struct GfSimConfig {
  double stiffness;
  double x0;
  double v0;
  double t0;
  double t_end;
  double dt;
} GfSimConfig;

typedef struct GfEnergySummary {
  double max_energy_drift;
  double max_hamiltonian_drift;
  double max_balance_residual;
  size_t samples;
} GfEnergySummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next call into this library on the same
 * thread.
 */
const char *gf_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void gf_string_free(char *s);

/**
 * Parses an expression; unknown identifiers become named constants.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GfStatus gf_expr_parse(const char *text, struct GfExpr **out);

/**
 * # Safety
 * `e` must be null or a handle from this library not yet freed.
 */
void gf_expr_free(struct GfExpr *e);

/**
 * Canonical text of `e`; free with [`gf_string_free`]. Null on a null handle.
 *
 * # Safety
 * `e` must be null or a live handle.
 */
char *gf_expr_to_string(const struct GfExpr *e);

/**
 * # Safety
 * `e` must be a live handle and `out` a valid pointer.
 */
enum GfStatus gf_expr_simplify(const struct GfExpr *e, struct GfExpr **out);

/**
 * # Safety
 * `e` must be a live handle and `out` a valid pointer.
 */
enum GfStatus gf_expr_diff(const struct GfExpr *e, enum GfVar var, struct GfExpr **out);

/**
 * # Safety
 * `e` must be a live handle and `out` a valid pointer.
 */
enum GfStatus gf_expr_total_time_derivative(const struct GfExpr *e, struct GfExpr **out);

/**
 * Evaluates `e`; `b` may be null when `e` has no free symbols.
 *
 * # Safety
 * `e` must be a live handle, `b` null or a live handle, `out` valid.
 */
enum GfStatus gf_expr_eval(const struct GfExpr *e, const struct GfBindings *b, double *out);

struct GfBindings *gf_bindings_new(void);

/**
 * Binds a variable (`t`, `x`, `v`, `a`) or a named constant.
 *
 * # Safety
 * `b` must be a live handle and `name` a NUL-terminated string.
 */
enum GfStatus gf_bindings_set(struct GfBindings *b, const char *name, double value);

/**
 * # Safety
 * `b` must be null or a handle from this library not yet freed.
 */
void gf_bindings_free(struct GfBindings *b);

/**
 * Euler–Lagrange residual `d/dt(∂L/∂v) − ∂L/∂x`.
 *
 * # Safety
 * `l` must be a live handle and `out` a valid pointer.
 */
enum GfStatus gf_euler_lagrange(const struct GfExpr *l, struct GfExpr **out);

/**
 * Energy function `v ∂L/∂v − L`.
 *
 * # Safety
 * `l` must be a live handle and `out` a valid pointer.
 */
enum GfStatus gf_energy_function(const struct GfExpr *l, struct GfExpr **out);

/**
 * Null certificate of `l`. `max_residual` receives the largest sampled
 * residual (0 for a symbolic certificate, the offending value otherwise);
 * `witness`, when not null, receives the failing binding or null.
 *
 * # Safety
 * Handles must be live; `fixed` may be null; out-pointers valid except
 * `witness`, which may be null.
 */
enum GfStatus gf_is_null(const struct GfExpr *l,
                         const struct GfBindings *fixed,
                         size_t samples,
                         double tol,
                         uint64_t seed,
                         enum GfNullVerdict *verdict,
                         double *max_residual,
                         struct GfBindings **witness);

/**
 * Helmholtz check of `phi = 0`. `overall` receives the verdict and
 * `passed[3]`, when not null, the three condition verdicts in the order
 * nondegeneracy, first-derivative, symmetric counterpart. `json`, when not
 * null, receives the full report (free with [`gf_string_free`]).
 *
 * # Safety
 * `phi` must be a live handle, `overall` valid, `passed` null or pointing to
 * three writable bools, `json` null or valid.
 */
enum GfStatus gf_helmholtz_check(const struct GfExpr *phi,
                                 size_t samples,
                                 double tol,
                                 uint64_t seed,
                                 bool *overall,
                                 bool *passed,
                                 char **json);

/**
 * Force `ℱ(t)` and shift `G(t)` of the gauge set `(f1, f2, f4, f6)`; null
 * gauge functions count as zero.
 *
 * # Safety
 * Gauge handles must be null or live; `force` and `shift` valid pointers.
 */
enum GfStatus gf_extract_force(const struct GfExpr *f1,
                               const struct GfExpr *f2,
                               const struct GfExpr *f4,
                               const struct GfExpr *f6,
                               struct GfExpr **force,
                               struct GfExpr **shift);

/**
 * Null Lagrangian `dΦ/dt` of the gauge set; null gauge functions count as
 * zero.
 *
 * # Safety
 * Gauge handles must be null or live; `out` a valid pointer.
 */
enum GfStatus gf_null_lagrangian(const struct GfExpr *f1,
                                 const struct GfExpr *f2,
                                 const struct GfExpr *f4,
                                 const struct GfExpr *f6,
                                 struct GfExpr **out);

/**
 * RK4 integration of `ẍ + stiffness·x = force(t)`. `force` may be null for
 * the undriven system and `constants` null when the force has none.
 *
 * # Safety
 * `cfg` and `out` valid pointers; handles null or live.
 */
enum GfStatus gf_simulate(const struct GfSimConfig *cfg,
                          const struct GfExpr *force,
                          const struct GfBindings *constants,
                          struct GfTrajectory **out);

/**
 * Adds energy, standard energy and balance-residual columns for the
 * Lagrangian `½ c_o (v² − c x²) + force·x + shift`. Null `force`/`shift`
 * count as zero.
 *
 * # Safety
 * `traj` and `out` valid; expression and bindings handles null or live;
 * `summary` null or valid.
 */
enum GfStatus gf_track_energy(const struct GfTrajectory *traj,
                              double c_o,
                              double c,
                              const struct GfExpr *force,
                              const struct GfExpr *shift,
                              const struct GfBindings *constants,
                              struct GfTrajectory **out,
                              struct GfEnergySummary *summary);

/**
 * Number of samples; 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t gf_trajectory_len(const struct GfTrajectory *traj);

/**
 * Borrowed view of one column, valid while `traj` lives. Columns that were
 * not computed yield `GF_STATUS_INVALID_ARGUMENT`.
 *
 * # Safety
 * `traj` live; `data` and `len` valid pointers.
 */
enum GfStatus gf_trajectory_column(const struct GfTrajectory *traj,
                                   enum GfColumn column,
                                   const double **data,
                                   size_t *len);

/**
 * Trajectory as CSV text; free with [`gf_string_free`]. Null on a null
 * handle.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
char *gf_trajectory_to_csv(const struct GfTrajectory *traj);

/**
 * # Safety
 * `traj` must be null or a handle from this library not yet freed.
 */
void gf_trajectory_free(struct GfTrajectory *traj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAUGEFORGE_H */
