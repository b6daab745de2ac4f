//! C ABI for the adapoly interior eigensolver.
//!
//! Matrices and results are opaque handles created and released by this
//! library. Every fallible function returns an [`AdapolyStatus`]; on failure
//! a description is available from [`adapoly_last_error`] on the same thread.
//! Panics never cross the boundary and are reported as
//! `ADAPOLY_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use adapoly::filter::damped_bound;
use adapoly::sparse::read_matrix_market;
use adapoly::{solve, CsrMatrix, Error, SolveResult, SolverConfig};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdapolyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    NotSymmetric = 5,
    Numerical = 6,
    OutOfRange = 7,
    Internal = 8,
}

/// Opaque sparse matrix handle.
pub struct AdapolyMatrix {
    inner: CsrMatrix,
}

/// Opaque solve result handle.
pub struct AdapolyResult {
    inner: SolveResult,
}

/// Solver parameters. Obtain defaults from [`adapoly_config_default`].
/// Zero in `p_override`, `tile_ti` or `tile_tk` selects the automatic value.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AdapolyConfig {
    pub interval_a: f64,
    pub interval_b: f64,
    pub tau_c: f64,
    pub tau_a: f64,
    pub m: f64,
    pub c: f64,
    pub k_multiplier: f64,
    pub mu: f64,
    pub max_iter: usize,
    pub lanczos_steps: usize,
    pub trace_probes: usize,
    pub rng_seed: u64,
    pub p_override: usize,
    pub tile_ti: usize,
    pub tile_tk: usize,
}

impl From<&AdapolyConfig> for SolverConfig {
    fn from(c: &AdapolyConfig) -> Self {
        let nonzero = |v: usize| (v != 0).then_some(v);
        SolverConfig {
            interval_a: c.interval_a,
            interval_b: c.interval_b,
            tau_c: c.tau_c,
            tau_a: c.tau_a,
            m: c.m,
            c: c.c,
            k_multiplier: c.k_multiplier,
            mu: c.mu,
            max_iter: c.max_iter,
            lanczos_steps: c.lanczos_steps,
            trace_probes: c.trace_probes,
            rng_seed: c.rng_seed,
            p_override: nonzero(c.p_override),
            tile_ti: nonzero(c.tile_ti),
            tile_tk: nonzero(c.tile_tk),
            disable_spurious_check: false,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> AdapolyStatus {
    match err {
        Error::Io { .. } => AdapolyStatus::Io,
        Error::Parse { .. } => AdapolyStatus::Parse,
        Error::NotSymmetric { .. } => AdapolyStatus::NotSymmetric,
        Error::NotPositiveDefinite { .. } | Error::NonFinite(_) => AdapolyStatus::Numerical,
        Error::DimensionMismatch { .. } | Error::InvalidStructure(_) | Error::Config(_) => AdapolyStatus::InvalidArgument,
        Error::Contract(_) => AdapolyStatus::Internal,
    }
}

fn fail(status: AdapolyStatus, msg: impl Into<String>) -> AdapolyStatus {
    set_last_error(msg);
    status
}

/// Runs `f`, converting library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), AdapolyStatus>) -> AdapolyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AdapolyStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(AdapolyStatus::Internal, "internal panic"),
    }
}

fn lib_err(err: Error) -> AdapolyStatus {
    fail(status_of(&err), err.to_string())
}

fn null(what: &str) -> AdapolyStatus {
    fail(AdapolyStatus::NullPointer, format!("{what} is null"))
}

/// Message for the last failure on the calling thread, or null if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn adapoly_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn adapoly_status_name(status: AdapolyStatus) -> *const c_char {
    let name: &'static CStr = match status {
        AdapolyStatus::Ok => c"ok",
        AdapolyStatus::NullPointer => c"null pointer",
        AdapolyStatus::InvalidArgument => c"invalid argument",
        AdapolyStatus::Io => c"i/o error",
        AdapolyStatus::Parse => c"parse error",
        AdapolyStatus::NotSymmetric => c"matrix not symmetric",
        AdapolyStatus::Numerical => c"numerical failure",
        AdapolyStatus::OutOfRange => c"index out of range",
        AdapolyStatus::Internal => c"internal error",
    };
    name.as_ptr()
}

/// Default solver parameters for the interval `[a, b]`.
#[no_mangle]
pub extern "C" fn adapoly_config_default(a: f64, b: f64) -> AdapolyConfig {
    let d = SolverConfig::with_interval(a, b);
    AdapolyConfig {
        interval_a: d.interval_a,
        interval_b: d.interval_b,
        tau_c: d.tau_c,
        tau_a: d.tau_a,
        m: d.m,
        c: d.c,
        k_multiplier: d.k_multiplier,
        mu: d.mu,
        max_iter: d.max_iter,
        lanczos_steps: d.lanczos_steps,
        trace_probes: d.trace_probes,
        rng_seed: d.rng_seed,
        p_override: 0,
        tile_ti: 0,
        tile_tk: 0,
    }
}

/// Copies a CSR matrix (`row_ptr` has `n_rows + 1` entries, `col_idx` and
/// `values` have `row_ptr[n_rows]` entries, zero-based).
///
/// # Safety
/// The arrays must be valid for the lengths described above and `out` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adapoly_matrix_from_csr(
    n_rows: usize,
    n_cols: usize,
    row_ptr: *const usize,
    col_idx: *const usize,
    values: *const f64,
    out: *mut *mut AdapolyMatrix,
) -> AdapolyStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if row_ptr.is_null() {
            return Err(null("row_ptr"));
        }
        let rp = std::slice::from_raw_parts(row_ptr, n_rows + 1).to_vec();
        let nnz = rp[n_rows];
        let (ci, vals) = if nnz == 0 {
            (Vec::new(), Vec::new())
        } else {
            if col_idx.is_null() || values.is_null() {
                return Err(null("col_idx/values"));
            }
            (
                std::slice::from_raw_parts(col_idx, nnz).to_vec(),
                std::slice::from_raw_parts(values, nnz).to_vec(),
            )
        };
        let inner = CsrMatrix::new(n_rows, n_cols, rp, ci, vals).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(AdapolyMatrix { inner }));
        Ok(())
    })
}

/// Reads a Matrix Market file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adapoly_matrix_read_mm(
    path: *const c_char,
    out: *mut *mut AdapolyMatrix,
) -> AdapolyStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| fail(AdapolyStatus::InvalidArgument, "path is not valid UTF-8"))?;
        let inner = read_matrix_market(path).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(AdapolyMatrix { inner }));
        Ok(())
    })
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adapoly_matrix_rows(m: *const AdapolyMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.n_rows())
}

/// Number of stored entries, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adapoly_matrix_nnz(m: *const AdapolyMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.nnz())
}

/// Releases a matrix. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn adapoly_matrix_free(m: *mut AdapolyMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Computes the eigenpairs of `m` inside the configured interval. Reaching
/// the iteration limit still returns `ADAPOLY_STATUS_OK`; check
/// [`adapoly_result_converged`].
///
/// # Safety
/// `m` and `config` must be live, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adapoly_solve(
    m: *const AdapolyMatrix,
    config: *const AdapolyConfig,
    out: *mut *mut AdapolyResult,
) -> AdapolyStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        let config = config.as_ref().ok_or_else(|| null("config"))?;
        let inner = solve(&m.inner, &SolverConfig::from(config)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(AdapolyResult { inner }));
        Ok(())
    })
}

/// Number of eigenpairs found, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adapoly_result_count(r: *const AdapolyResult) -> usize {
    r.as_ref().map_or(0, |r| r.inner.eigenvalues.len())
}

/// Length of each eigenvector, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adapoly_result_dimension(r: *const AdapolyResult) -> usize {
    r.as_ref().map_or(0, |r| r.inner.eigenvectors.n_rows())
}

/// 1 if the solve converged, 0 otherwise (or for a null handle).
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adapoly_result_converged(r: *const AdapolyResult) -> c_int {
    r.as_ref().map_or(0, |r| r.inner.converged as c_int)
}

/// Iterations performed.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adapoly_result_iterations(r: *const AdapolyResult) -> usize {
    r.as_ref().map_or(0, |r| r.inner.iterations)
}

/// Total sparse matrix-vector products.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adapoly_result_spmv_total(r: *const AdapolyResult) -> u64 {
    r.as_ref().map_or(0, |r| r.inner.spmv_total)
}

/// Mean filter degree.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adapoly_result_avg_degree(r: *const AdapolyResult) -> f64 {
    r.as_ref().map_or(0.0, |r| r.inner.avg_degree)
}

/// Largest residual norm among the returned pairs.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adapoly_result_max_residual(r: *const AdapolyResult) -> f64 {
    r.as_ref().map_or(0.0, |r| r.inner.max_residual)
}

unsafe fn copy_out(src: &[f64], out: *mut f64, len: usize) -> Result<(), AdapolyStatus> {
    if len < src.len() {
        return Err(fail(
            AdapolyStatus::InvalidArgument,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    if !src.is_empty() {
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    }
    Ok(())
}

/// Copies the eigenvalues (ascending) into `out`, which holds `len` values.
///
/// # Safety
/// `r` must be live and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn adapoly_result_eigenvalues(
    r: *const AdapolyResult,
    out: *mut f64,
    len: usize,
) -> AdapolyStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("result"))?;
        copy_out(&r.inner.eigenvalues, out, len)
    })
}

/// Copies the residual norms, paired with the eigenvalues.
///
/// # Safety
/// `r` must be live and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn adapoly_result_residuals(
    r: *const AdapolyResult,
    out: *mut f64,
    len: usize,
) -> AdapolyStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("result"))?;
        copy_out(&r.inner.residuals, out, len)
    })
}

/// Copies eigenvector `index` into `out`, which holds `len` values.
///
/// # Safety
/// `r` must be live and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn adapoly_result_eigenvector(
    r: *const AdapolyResult,
    index: usize,
    out: *mut f64,
    len: usize,
) -> AdapolyStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("result"))?;
        if index >= r.inner.eigenvalues.len() {
            return Err(fail(
                AdapolyStatus::OutOfRange,
                format!("eigenvector {index} of {}", r.inner.eigenvalues.len()),
            ));
        }
        copy_out(&r.inner.eigenvectors.column(index), out, len)
    })
}

/// Releases a result. Null is ignored.
///
/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn adapoly_result_free(r: *mut AdapolyResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Pointwise error bound of the damped filter truncated at `k_i` (damping
/// computed for degree `k`) at angle `theta`, for endpoint angles `alpha > beta`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adapoly_damped_bound(
    theta: f64,
    k_i: usize,
    k: usize,
    m: f64,
    alpha: f64,
    beta: f64,
    out: *mut f64,
) -> AdapolyStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = damped_bound(theta, k_i, k, m, alpha, beta).map_err(lib_err)?;
        Ok(())
    })
}
