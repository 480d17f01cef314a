#ifndef SINGULAR_SL_H
#define SINGULAR_SL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SslBranch {
  SSL_BRANCH_PLUS = 0,
  SSL_BRANCH_MINUS = 1,
} SslBranch;

typedef enum SslHalfPlane {
  SSL_HALF_PLANE_UPPER = 0,
  SSL_HALF_PLANE_LOWER = 1,
} SslHalfPlane;

typedef enum SslStatus {
  SSL_STATUS_OK = 0,
  /**
   * Null pointer, bad UTF-8, short buffer or invalid configuration.
   */
  SSL_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Malformed or inadmissible problem description.
   */
  SSL_STATUS_SPEC = 2,
  SSL_STATUS_NO_CONVERGENCE = 3,
  /**
   * Spectral point outside the chosen half-plane or below the `mu` guard.
   */
  SSL_STATUS_HALF_PLANE = 4,
  /**
   * Any other solver failure.
   */
  SSL_STATUS_SOLVER = 5,
  SSL_STATUS_PANIC = 6,
} SslStatus;

/**
 * Validated coefficient set.
 */
typedef struct SslProblem SslProblem;

/**
 * Fundamental system at one spectral point.
 */
typedef struct SslSystem SslSystem;

/**
 * Iteration settings; obtain defaults from [`ssl_config_default`].
 */
typedef struct SslConfig {
  double tol;
  size_t n_max;
  double kappa;
  size_t n_min;
} SslConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null after a
 * success. Valid until the next call into the library on the same thread.
 */
const char *ssl_last_error(void);

struct SslConfig ssl_config_default(void);

/**
 * Parse and validate a JSON problem description.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SslStatus ssl_problem_from_json(const char *json, struct SslProblem **out);

/**
 * # Safety
 * `problem` must come from [`ssl_problem_from_json`] and not be freed twice.
 */
void ssl_problem_free(struct SslProblem *problem);

/**
 * Solve at `lambda = lambda_re + i lambda_im`. `config` may be null for defaults.
 *
 * # Safety
 * `problem` must be a live handle and `out` a valid pointer.
 */
enum SslStatus ssl_solve(const struct SslProblem *problem,
                         double lambda_re,
                         double lambda_im,
                         double r,
                         enum SslHalfPlane halfplane,
                         const struct SslConfig *config,
                         struct SslSystem **out);

/**
 * # Safety
 * `system` must come from [`ssl_solve`] and not be freed twice.
 */
void ssl_system_free(struct SslSystem *system);

/**
 * Number of grid nodes, or 0 for a null handle.
 *
 * # Safety
 * `system` must be null or a live handle.
 */
size_t ssl_system_len(const struct SslSystem *system);

/**
 * Relative Wronskian defect `max |W e^{-F} - W(0)| / |W(0)|`.
 *
 * # Safety
 * `system` must be a live handle and `out` a valid pointer.
 */
enum SslStatus ssl_system_wronskian_defect(const struct SslSystem *system, double *out);

/**
 * Copy the `x` and `t` grids. Either destination may be null.
 *
 * # Safety
 * Non-null destinations must hold `len` doubles.
 */
enum SslStatus ssl_system_copy_grid(const struct SslSystem *system,
                                    double *x,
                                    double *t,
                                    size_t len);

/**
 * Copy `y` and its x-variable quasi-derivative for one branch. Either
 * destination may be null.
 *
 * # Safety
 * Non-null destinations must hold `2 * len` doubles.
 */
enum SslStatus ssl_system_copy_branch(const struct SslSystem *system,
                                      enum SslBranch branch,
                                      double *y,
                                      double *y_quasi,
                                      size_t len);

/**
 * Copy the remainders `phi` and `psi` for one branch. Either destination
 * may be null.
 *
 * # Safety
 * Non-null destinations must hold `2 * len` doubles.
 */
enum SslStatus ssl_system_copy_remainders(const struct SslSystem *system,
                                          enum SslBranch branch,
                                          double *phi,
                                          double *psi,
                                          size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SINGULAR_SL_H */
