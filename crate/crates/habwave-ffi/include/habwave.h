#ifndef HABWAVE_H
#define HABWAVE_H

/* Generated from the habwave-ffi crate; edit the Rust source, not this file. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call in this interface.
typedef enum {
  // Success; all out-parameters are valid.
  HW_STATUS_OK = 0,
  // A required pointer argument was null.
  HW_STATUS_NULL_POINTER = 1,
  // A parameter was out of range, non-finite, or inconsistent.
  HW_STATUS_INVALID_ARGUMENT = 2,
  // A standing modelling assumption of the requested routine fails.
  HW_STATUS_HYPOTHESIS = 3,
  // An iteration exhausted its budget before reaching its tolerance.
  HW_STATUS_NO_CONVERGENCE = 4,
  // The requested exponential moment does not exist.
  HW_STATUS_DIVERGES = 5,
  // A caller-provided buffer is shorter than the data it must receive.
  HW_STATUS_BUFFER_TOO_SMALL = 6,
  // Unexpected internal failure (I/O, panic); details via `hw_last_error`.
  HW_STATUS_INTERNAL = 7,
} hw_status;

// Direction toward one of the two spatial infinities.
typedef enum {
  // Toward `x -> -inf`.
  HW_SIDE_MINUS = 0,
  // Toward `x -> +inf`.
  HW_SIDE_PLUS = 1,
} hw_side;

// Shape of a computed stationary state.
typedef enum {
  // Sup norm at round-off scale: the trivial state.
  HW_CLASSIFICATION_ZERO = 0,
  // Nontrivial, but vanishing toward both infinities.
  HW_CLASSIFICATION_PULSE = 1,
  // Connects zero on the left to the right-limit level on the right.
  HW_CLASSIFICATION_FRONT = 2,
  // Sits at the right-limit level on both sides.
  HW_CLASSIFICATION_UNIFORM = 3,
} hw_classification;

// Opaque handle to a uniform spatial grid.
typedef struct hw_grid hw_grid;

// Opaque handle to a heterogeneous growth habitat.
typedef struct hw_habitat hw_habitat;

// Opaque handle to a dispersal kernel.
typedef struct hw_kernel hw_kernel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns a static, NUL-terminated label for a status code.
const char *hw_status_name(hw_status status);

// Copies this thread's most recent error message into `buf` as a
// NUL-terminated string.
//
// Returns `HW_STATUS_BUFFER_TOO_SMALL` when the message had to be truncated
// to fit (the buffer still receives a NUL-terminated prefix), and
// `HW_STATUS_NULL_POINTER` when `buf` is null or `cap` is zero.
//
// # Safety
// `buf` must point to at least `cap` writable bytes.
hw_status hw_last_error(char *buf, size_t cap);

// Creates a uniform grid of `points` nodes spanning `[x_min, x_max]`.
//
// # Safety
// `out` must be a valid pointer; on success it receives a handle that must
// be released with [`hw_grid_free`].
hw_status hw_grid_new(double x_min, double x_max, size_t points, hw_grid **out);

// Releases a grid handle. Null is ignored.
//
// # Safety
// `grid` must be a handle returned by [`hw_grid_new`] that has not been
// freed yet, or null.
void hw_grid_free(hw_grid *grid);

// Number of nodes of a grid; zero for a null handle.
//
// # Safety
// `grid` must be a live grid handle or null.
size_t hw_grid_len(const hw_grid *grid);

// Writes the grid's node coordinates into `out[0 .. len)`.
//
// `len` must be at least [`hw_grid_len`].
//
// # Safety
// `grid` must be a live grid handle and `out` must point to at least `len`
// writable doubles.
hw_status hw_grid_points(const hw_grid *grid, double *out, size_t len);

// Creates a Gaussian dispersal kernel with the given mean and variance.
//
// # Safety
// `out` must be a valid pointer; on success it receives a handle that must
// be released with [`hw_kernel_free`].
hw_status hw_kernel_gaussian(double mean, double variance, hw_kernel **out);

// Creates a two-sided exponential (Laplace) kernel with the given decay
// rate, shifted by `shift`.
//
// # Safety
// `out` must be a valid pointer; on success it receives a handle that must
// be released with [`hw_kernel_free`].
hw_status hw_kernel_laplace(double rate, double shift, hw_kernel **out);

// Releases a kernel handle. Null is ignored.
//
// # Safety
// `kernel` must be a handle returned by a kernel constructor that has not
// been freed yet, or null.
void hw_kernel_free(hw_kernel *kernel);

// Evaluates the kernel's moment generating function at `mu`.
//
// Fails with `HW_STATUS_DIVERGES` when the exponential moment does not
// exist at `mu`.
//
// # Safety
// `kernel` must be a live kernel handle; `out` must be a valid pointer.
hw_status hw_kernel_mgf(const hw_kernel *kernel, double mu, double *out);

// Creates a habitat whose growth is Beverton-Holt with a sigmoid coefficient
// profile rising from `rate_minus` (left) to `rate_plus` (right).
//
// Requires `0 < rate_minus < 1 < rate_plus`, `carrying > 0`, and
// `steepness > 0`.
//
// # Safety
// `out` must be a valid pointer; on success it receives a handle that must
// be released with [`hw_habitat_free`].
hw_status hw_habitat_beverton_holt(double rate_minus,
                                   double rate_plus,
                                   double carrying,
                                   double steepness,
                                   hw_habitat **out);

// Creates the localized-patch habitat: coefficient `beta * exp(-x^2)`,
// vanishing toward both infinities, with a saturating nonlinearity.
//
// # Safety
// `out` must be a valid pointer; on success it receives a handle that must
// be released with [`hw_habitat_free`].
hw_status hw_habitat_gaussian_patch(double beta, hw_habitat **out);

// Creates the patch-plus-ramp habitat: the pointwise maximum of the
// localized patch `beta * exp(-x^2)` and a ramp rising to the supercritical
// right-limit level, with the same saturating nonlinearity.
//
// # Safety
// `out` must be a valid pointer; on success it receives a handle that must
// be released with [`hw_habitat_free`].
hw_status hw_habitat_patch_with_ramp(double beta, hw_habitat **out);

// Releases a habitat handle. Null is ignored.
//
// # Safety
// `habitat` must be a handle returned by a habitat constructor that has not
// been freed yet, or null.
void hw_habitat_free(hw_habitat *habitat);

// Linear growth coefficient of the habitat in the limit toward one side.
//
// # Safety
// `habitat` must be a live habitat handle; `out` must be a valid pointer.
hw_status hw_habitat_coefficient_limit(const hw_habitat *habitat, hw_side side, double *out);

// Spreading speed of the linear operator with constant coefficient `coef`
// and the given kernel, toward the given side.
//
// On success writes the speed to `c_star` and the minimizing decay exponent
// to `mu_star` (either pointer may be null to skip that value).
//
// # Safety
// `kernel` must be a live kernel handle; `c_star` and `mu_star` must each be
// null or valid.
hw_status hw_spreading_speed(double coef,
                             const hw_kernel *kernel,
                             hw_side side,
                             double *c_star,
                             double *mu_star);

// Advances a density field by `steps` applications of the growth-dispersal
// operator, in place.
//
// `state` holds the field's values on the grid's nodes; `len` must be at
// least the grid length, and only the first grid-length entries are read
// and written.
//
// # Safety
// `habitat`, `kernel`, and `grid` must be live handles; `state` must point
// to at least `len` readable and writable doubles.
hw_status hw_evolve(const hw_habitat *habitat,
                    const hw_kernel *kernel,
                    const hw_grid *grid,
                    double *state,
                    size_t len,
                    size_t steps);

// Computes the largest stationary state below the constant cap by monotone
// descent, writing it into `state`.
//
// `len` must be at least the grid length. On success the optional
// out-parameters receive the re-measured residual and the state's shape
// classification. Fails with `HW_STATUS_NO_CONVERGENCE` when `max_iters`
// steps do not reach `tol`.
//
// # Safety
// `habitat`, `kernel`, and `grid` must be live handles; `state` must point
// to at least `len` writable doubles; `residual` and `classification` must
// each be null or valid.
hw_status hw_fixed_point(const hw_habitat *habitat,
                         const hw_kernel *kernel,
                         const hw_grid *grid,
                         double cap,
                         double tol,
                         size_t max_iters,
                         double *state,
                         size_t len,
                         double *residual,
                         hw_classification *classification);

// Spectral radius of the patch-driven linearization with strength `beta`,
// estimated by power iteration on the given grid.
//
// # Safety
// `kernel` and `grid` must be live handles; `rho` must be a valid pointer.
hw_status hw_power_radius(double beta,
                          const hw_kernel *kernel,
                          const hw_grid *grid,
                          double tol,
                          double *rho);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HABWAVE_H */
