#ifndef FRACLAME_H
#define FRACLAME_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success.
 */
#define FRACLAME_OK 0

/**
 * An argument violates the mathematical domain of the call.
 */
#define FRACLAME_ERR_DOMAIN 1

/**
 * Evaluation at a genuine singularity.
 */
#define FRACLAME_ERR_SINGULARITY 2

/**
 * A requested accuracy could not be certified.
 */
#define FRACLAME_ERR_ACCURACY 3

/**
 * An iterative solver failed.
 */
#define FRACLAME_ERR_SOLVER 4

/**
 * Null pointer or malformed buffer.
 */
#define FRACLAME_ERR_ARGUMENT 5

/**
 * Unexpected internal failure (a bug; never expected).
 */
#define FRACLAME_ERR_INTERNAL 6

/**
 * Opaque handle: a real vector field on a periodic grid.
 */
typedef struct FraclameField FraclameField;

/**
 * Opaque handle: elastic moduli with the ellipticity conditions enforced.
 */
typedef struct FraclameModuli FraclameModuli;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create a moduli handle; fails unless mu > 0 and 2 mu + lambda > 0.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
int fraclame_moduli_new(double mu, double lambda, struct FraclameModuli **out);

/**
 * Release a moduli handle (accepts null).
 *
 * # Safety
 * `m` must come from `fraclame_moduli_new` and not be freed twice.
 */
void fraclame_moduli_free(struct FraclameModuli *m);

/**
 * Create a field handle from a component-major buffer of length
 * d * n^d (component c occupies the c-th plane, row-major grid order).
 *
 * # Safety
 * `data` must point to `d * n^d` readable doubles; `out` to one pointer.
 */
int fraclame_field_new(size_t d,
                       size_t n,
                       double box_length,
                       const double *data,
                       struct FraclameField **out);

/**
 * Copy a field's payload into a caller buffer of length d * n^d.
 *
 * # Safety
 * `f` must be a live field handle; `data` must have room for d * n^d doubles.
 */
int fraclame_field_copy_out(const struct FraclameField *f, double *data);

/**
 * Release a field handle (accepts null).
 *
 * # Safety
 * `f` must come from this library and not be freed twice.
 */
void fraclame_field_free(struct FraclameField *f);

/**
 * Spectral application of the fractional operator: out = L^s(in).
 * `s` lies in (0, 1].
 *
 * # Safety
 * All handles must be live; `out` receives a new field handle.
 */
int fraclame_apply_spectral(const struct FraclameField *input,
                            double s,
                            const struct FraclameModuli *moduli,
                            struct FraclameField **out);

/**
 * Solve (L^s + q) u = f spectrally.
 *
 * # Safety
 * As `fraclame_apply_spectral`.
 */
int fraclame_solve_resolvent(const struct FraclameField *forcing,
                             double s,
                             double q,
                             const struct FraclameModuli *moduli,
                             struct FraclameField **out);

/**
 * Principal-value evaluation of the operator at one point of a grid-backed
 * field (cubic interpolation off nodes). `x` has d entries; `out` receives
 * d components.
 *
 * # Safety
 * `x` must point to d doubles, `out` to d writable doubles.
 */
int fraclame_apply_pointwise(const struct FraclameField *input,
                             const double *x,
                             double s,
                             const struct FraclameModuli *moduli,
                             double r_outer,
                             double *out);

/**
 * Fundamental solution matrix at a point, row-major d x d into `out`.
 *
 * # Safety
 * `x` must point to d doubles, `out` to d*d writable doubles.
 */
int fraclame_fundamental_solution(size_t d,
                                  const double *x,
                                  double s,
                                  const struct FraclameModuli *moduli,
                                  double *out);

/**
 * Poisson kernel matrix at (x, t), row-major d x d into `out`.
 *
 * # Safety
 * As `fraclame_fundamental_solution`.
 */
int fraclame_poisson_kernel(size_t d,
                            const double *x,
                            double t,
                            double s,
                            const struct FraclameModuli *moduli,
                            double *out);

/**
 * Weighted Neumann trace of the half-space extension: out gets the
 * extrapolated limit field, which equals 2 Gamma(1-s)/(2^{2s} Gamma(s))
 * times the operator applied to the boundary data.
 *
 * # Safety
 * As `fraclame_apply_spectral`.
 */
int fraclame_dtn_neumann(const struct FraclameField *boundary,
                         double s,
                         const struct FraclameModuli *moduli,
                         struct FraclameField **out);

/**
 * The Neumann trace constant 2 Gamma(1-s)/(2^{2s} Gamma(s)).
 */
int fraclame_neumann_constant(double s, double *out);

/**
 * Solve the homogeneous-exterior Dirichlet problem on a centered ball with
 * constant forcing (fx, fy[, fz]); `out` receives the solution field
 * extended by zero.
 *
 * # Safety
 * As `fraclame_apply_spectral`.
 */
int fraclame_solve_dirichlet_ball(size_t d,
                                  size_t n,
                                  double box_length,
                                  double radius,
                                  double s,
                                  const struct FraclameModuli *moduli,
                                  double fx,
                                  double fy,
                                  double fz,
                                  struct FraclameField **out);

/**
 * Entries of the symbol matrix M^s(xi), row-major d x d into `out`.
 *
 * # Safety
 * `xi` must point to d doubles, `out` to d*d writable doubles.
 */
int fraclame_symbol_power(size_t d,
                          const double *xi,
                          double s,
                          const struct FraclameModuli *moduli,
                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACLAME_H */
