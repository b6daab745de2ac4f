#ifndef ADAPOLY_H
#define ADAPOLY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Result codes.
 */
typedef enum AdapolyStatus {
  ADAPOLY_STATUS_OK = 0,
  ADAPOLY_STATUS_NULL_POINTER = 1,
  ADAPOLY_STATUS_INVALID_ARGUMENT = 2,
  ADAPOLY_STATUS_IO = 3,
  ADAPOLY_STATUS_PARSE = 4,
  ADAPOLY_STATUS_NOT_SYMMETRIC = 5,
  ADAPOLY_STATUS_NUMERICAL = 6,
  ADAPOLY_STATUS_OUT_OF_RANGE = 7,
  ADAPOLY_STATUS_INTERNAL = 8,
} AdapolyStatus;

/*
 Opaque sparse matrix handle.
 */
typedef struct AdapolyMatrix AdapolyMatrix;

/*
 Opaque solve result handle.
 */
typedef struct AdapolyResult AdapolyResult;

/*
 Solver parameters. Obtain defaults from [`adapoly_config_default`].
 Zero in `p_override`, `tile_ti` or `tile_tk` selects the automatic value.
 */
typedef struct AdapolyConfig {
  double interval_a;
  double interval_b;
  double tau_c;
  double tau_a;
  double m;
  double c;
  double k_multiplier;
  double mu;
  size_t max_iter;
  size_t lanczos_steps;
  size_t trace_probes;
  uint64_t rng_seed;
  size_t p_override;
  size_t tile_ti;
  size_t tile_tk;
} AdapolyConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failure on the calling thread, or null if none.
 The pointer stays valid until the next failing call on this thread.
 */
const char *adapoly_last_error(void);

/*
 Static name of a status code.
 */
const char *adapoly_status_name(enum AdapolyStatus status);

/*
 Default solver parameters for the interval `[a, b]`.
 */
struct AdapolyConfig adapoly_config_default(double a, double b);

/*
 Copies a CSR matrix (`row_ptr` has `n_rows + 1` entries, `col_idx` and
 `values` have `row_ptr[n_rows]` entries, zero-based).

 # Safety
 The arrays must be valid for the lengths described above and `out` must
 be a valid pointer.
 */
enum AdapolyStatus adapoly_matrix_from_csr(size_t n_rows,
                                           size_t n_cols,
                                           const size_t *row_ptr,
                                           const size_t *col_idx,
                                           const double *values,
                                           struct AdapolyMatrix **out);

/*
 Reads a Matrix Market file.

 # Safety
 `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AdapolyStatus adapoly_matrix_read_mm(const char *path, struct AdapolyMatrix **out);

/*
 Number of rows, or 0 for a null handle.

 # Safety
 `m` must be null or a live handle.
 */
size_t adapoly_matrix_rows(const struct AdapolyMatrix *m);

/*
 Number of stored entries, or 0 for a null handle.

 # Safety
 `m` must be null or a live handle.
 */
size_t adapoly_matrix_nnz(const struct AdapolyMatrix *m);

/*
 Releases a matrix. Null is ignored.

 # Safety
 `m` must be null or a handle not yet freed.
 */
void adapoly_matrix_free(struct AdapolyMatrix *m);

/*
 Computes the eigenpairs of `m` inside the configured interval. Reaching
 the iteration limit still returns `ADAPOLY_STATUS_OK`; check
 [`adapoly_result_converged`].

 # Safety
 `m` and `config` must be live, `out` a valid pointer.
 */
enum AdapolyStatus adapoly_solve(const struct AdapolyMatrix *m,
                                 const struct AdapolyConfig *config,
                                 struct AdapolyResult **out);

/*
 Number of eigenpairs found, or 0 for a null handle.

 # Safety
 `r` must be null or a live handle.
 */
size_t adapoly_result_count(const struct AdapolyResult *r);

/*
 Length of each eigenvector, or 0 for a null handle.

 # Safety
 `r` must be null or a live handle.
 */
size_t adapoly_result_dimension(const struct AdapolyResult *r);

/*
 1 if the solve converged, 0 otherwise (or for a null handle).

 # Safety
 `r` must be null or a live handle.
 */
int adapoly_result_converged(const struct AdapolyResult *r);

/*
 Iterations performed.

 # Safety
 `r` must be null or a live handle.
 */
size_t adapoly_result_iterations(const struct AdapolyResult *r);

/*
 Total sparse matrix-vector products.

 # Safety
 `r` must be null or a live handle.
 */
uint64_t adapoly_result_spmv_total(const struct AdapolyResult *r);

/*
 Mean filter degree.

 # Safety
 `r` must be null or a live handle.
 */
double adapoly_result_avg_degree(const struct AdapolyResult *r);

/*
 Largest residual norm among the returned pairs.

 # Safety
 `r` must be null or a live handle.
 */
double adapoly_result_max_residual(const struct AdapolyResult *r);

/*
 Copies the eigenvalues (ascending) into `out`, which holds `len` values.

 # Safety
 `r` must be live and `out` valid for `len` writes.
 */
enum AdapolyStatus adapoly_result_eigenvalues(const struct AdapolyResult *r,
                                              double *out,
                                              size_t len);

/*
 Copies the residual norms, paired with the eigenvalues.

 # Safety
 `r` must be live and `out` valid for `len` writes.
 */
enum AdapolyStatus adapoly_result_residuals(const struct AdapolyResult *r, double *out, size_t len);

/*
 Copies eigenvector `index` into `out`, which holds `len` values.

 # Safety
 `r` must be live and `out` valid for `len` writes.
 */
enum AdapolyStatus adapoly_result_eigenvector(const struct AdapolyResult *r,
                                              size_t index,
                                              double *out,
                                              size_t len);

/*
 Releases a result. Null is ignored.

 # Safety
 `r` must be null or a handle not yet freed.
 */
void adapoly_result_free(struct AdapolyResult *r);

/*
 Pointwise error bound of the damped filter truncated at `k_i` (damping
 computed for degree `k`) at angle `theta`, for endpoint angles `alpha > beta`.

 # Safety
 `out` must be a valid pointer.
 */
enum AdapolyStatus adapoly_damped_bound(double theta,
                                        size_t k_i,
                                        size_t k,
                                        double m,
                                        double alpha,
                                        double beta,
                                        double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADAPOLY_H */
