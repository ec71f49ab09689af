#ifndef MICROTORSION_H
#define MICROTORSION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of doubles in a field vector.
 */
#define MT_NFIELDS 39

typedef enum MtBaseline {
  MT_BASELINE_RAW = 0,
  MT_BASELINE_STRESS_FREE = 1,
} MtBaseline;

typedef enum MtStatus {
  MT_STATUS_OK = 0,
  MT_STATUS_NULL_POINTER = 1,
  MT_STATUS_INVALID_PARAMS = 2,
  MT_STATUS_CONFIG = 3,
  MT_STATUS_DOMAIN = 4,
  MT_STATUS_EIGEN_NO_CONVERGENCE = 5,
  MT_STATUS_SOLVER_ABORT = 6,
  MT_STATUS_IO = 7,
  MT_STATUS_PANIC = 8,
} MtStatus;

/**
 * Opaque handle to the linear system about the state at rest.
 */
typedef struct MtLinearSystem MtLinearSystem;

/**
 * Opaque model handle.
 */
typedef struct MtModel MtModel;

/**
 * Material constants. `alpha` or `beta` set to +infinity removes the
 * corresponding relaxation terms.
 */
typedef struct MtParams {
  double rho0;
  double c0_macro;
  double cs_macro;
  double c0_micro;
  double cs_micro;
  double gamma_macro;
  double gamma_micro;
  double epsilon;
  double mu;
  double alpha;
  double beta;
  double ell;
} MtParams;

/**
 * Closed-form frequencies (rad/s) and speeds (m/s). NaN marks a
 * quantity that does not exist for the parameters.
 */
typedef struct MtCutoffs {
  double omega_inf;
  double omega0;
  double omega_s;
  double omega_l;
  double v_l;
  double v_s;
  double c_l;
  double c_s;
  double c_inf;
  double beta_crit;
} MtCutoffs;

typedef struct MtHessianSummary {
  double min_eigenvalue;
  uint32_t trivial_zeros;
  bool positive_definite;
  bool closed_form_satisfied;
} MtHessianSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *mt_version(void);

/**
 * Copies the last error of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t mt_last_error_message(char *buf, size_t len);

/**
 * Writes the reference parameter set.
 *
 * # Safety
 * `out` must be null or a valid pointer.
 */
enum MtStatus mt_params_reference(struct MtParams *out);

/**
 * # Safety
 * `params` and `out` must be null or valid pointers.
 */
enum MtStatus mt_cutoffs(const struct MtParams *params, struct MtCutoffs *out);

/**
 * Creates a model; `mode` is an [`MtBaseline`] value. Release it with
 * [`mt_model_free`].
 *
 * # Safety
 * `params` and `out` must be null or valid pointers.
 */
enum MtStatus mt_model_new(const struct MtParams *params, uint32_t mode, struct MtModel **out);

/**
 * # Safety
 * `model` must be null or a handle from [`mt_model_new`] not yet freed.
 */
void mt_model_free(struct MtModel *model);

/**
 * Energy density of the conservative state `fields`.
 *
 * # Safety
 * `model` must be a live handle, `fields` must hold MT_NFIELDS doubles,
 * `out` must be valid.
 */
enum MtStatus mt_model_energy(const struct MtModel *model, const double *fields, double *out);

/**
 * Energy derivatives (v, Π, π, H, E) in field-vector order.
 *
 * # Safety
 * As for [`mt_model_energy`]; `out` must hold MT_NFIELDS doubles.
 */
enum MtStatus mt_model_forces(const struct MtModel *model, const double *fields, double *out);

/**
 * Relaxation source terms in field-vector order.
 *
 * # Safety
 * As for [`mt_model_forces`].
 */
enum MtStatus mt_model_sources(const struct MtModel *model, const double *fields, double *out);

/**
 * Linearizes about the state at rest; `mode` is an [`MtBaseline`]
 * value. Release with [`mt_linear_system_free`].
 *
 * # Safety
 * `params` and `out` must be null or valid pointers.
 */
enum MtStatus mt_linear_system_new(const struct MtParams *params,
                                   uint32_t mode,
                                   struct MtLinearSystem **out);

/**
 * # Safety
 * `sys` must be null or a handle from [`mt_linear_system_new`] not yet
 * freed.
 */
void mt_linear_system_free(struct MtLinearSystem *sys);

/**
 * The 39 phase velocities λ = ω/k at wave number `k` (1/m), sorted by
 * real part; real and imaginary parts go to separate arrays.
 *
 * # Safety
 * `sys` must be a live handle; `re` and `im` must hold MT_NFIELDS
 * doubles each.
 */
enum MtStatus mt_dispersion_at_k(const struct MtLinearSystem *sys,
                                 double k,
                                 double *re,
                                 double *im);

/**
 * Convexity of the energy at rest, numerically and in closed form;
 * `mode` is an [`MtBaseline`] value.
 *
 * # Safety
 * `params` and `out` must be null or valid pointers.
 */
enum MtStatus mt_hessian_check(const struct MtParams *params,
                               uint32_t mode,
                               struct MtHessianSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MICROTORSION_H */
