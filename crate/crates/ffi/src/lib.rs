//! C interface to the `singular-sl` solver.
//!
//! Problems and solved systems are opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! an [`SslStatus`]; on failure [`ssl_last_error`] describes the cause.
//! Complex arrays are interleaved `re, im` pairs.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use singular_sl::coefficients::{CoefficientSet, IngestOptions};
use singular_sl::problem::{ingest_coefficients, ProblemSpec};
use singular_sl::solutions::{solve, FundamentalSystem, SolutionBranch};
use singular_sl::volterra::{Branch, HalfPlane, IterationConfig};
use singular_sl::{Complex64, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SslStatus {
    Ok = 0,
    /// Null pointer, bad UTF-8, short buffer or invalid configuration.
    InvalidArgument = 1,
    /// Malformed or inadmissible problem description.
    Spec = 2,
    NoConvergence = 3,
    /// Spectral point outside the chosen half-plane or below the `mu` guard.
    HalfPlane = 4,
    /// Any other solver failure.
    Solver = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SslHalfPlane {
    Upper = 0,
    Lower = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SslBranch {
    Plus = 0,
    Minus = 1,
}

/// Iteration settings; obtain defaults from [`ssl_config_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SslConfig {
    pub tol: f64,
    pub n_max: usize,
    pub kappa: f64,
    pub n_min: usize,
}

/// Validated coefficient set.
pub struct SslProblem {
    cs: CoefficientSet,
}

/// Fundamental system at one spectral point.
pub struct SslSystem {
    fs: FundamentalSystem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> SslStatus {
    match err {
        Error::Spec(_) | Error::Domain(_) | Error::Positivity { .. } | Error::Integrability { .. } | Error::Json(_) => SslStatus::Spec,
        Error::NoConvergence { .. } => SslStatus::NoConvergence,
        Error::HalfPlane(_) | Error::MuGuard { .. } => SslStatus::HalfPlane,
        Error::Config(_) => SslStatus::InvalidArgument,
        _ => SslStatus::Solver,
    }
}

struct Failure(SslStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), format!("{}: {e}", e.kind()))
    }
}

fn invalid(msg: &str) -> Failure {
    Failure(SslStatus::InvalidArgument, msg.to_string())
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> SslStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SslStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SslStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| invalid(&format!("{what} is null")))
}

/// Message for the most recent failure on this thread, or null after a
/// success. Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ssl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn ssl_config_default() -> SslConfig {
    let d = IterationConfig::default();
    SslConfig { tol: d.tol, n_max: d.n_max, kappa: d.kappa, n_min: d.n_min }
}

/// Parse and validate a JSON problem description.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssl_problem_from_json(json: *const c_char, out: *mut *mut SslProblem) -> SslStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(invalid("json and out must be non-null"));
        }
        *out = ptr::null_mut();
        let text = CStr::from_ptr(json).to_str().map_err(|_| invalid("json is not UTF-8"))?;
        let spec = ProblemSpec::from_json(text)?;
        let cs = ingest_coefficients(&spec, &IngestOptions::default())?;
        *out = Box::into_raw(Box::new(SslProblem { cs }));
        Ok(())
    })
}

/// # Safety
/// `problem` must come from [`ssl_problem_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ssl_problem_free(problem: *mut SslProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Solve at `lambda = lambda_re + i lambda_im`. `config` may be null for defaults.
///
/// # Safety
/// `problem` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssl_solve(
    problem: *const SslProblem,
    lambda_re: f64,
    lambda_im: f64,
    r: f64,
    halfplane: SslHalfPlane,
    config: *const SslConfig,
    out: *mut *mut SslSystem,
) -> SslStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        *out = ptr::null_mut();
        let p = deref(problem, "problem")?;
        let cfg = match config.as_ref() {
            Some(c) => IterationConfig { tol: c.tol, n_max: c.n_max, kappa: c.kappa, n_min: c.n_min },
            None => IterationConfig::default(),
        };
        let hp = match halfplane {
            SslHalfPlane::Upper => HalfPlane::Upper,
            SslHalfPlane::Lower => HalfPlane::Lower,
        };
        let fs = solve(&p.cs, Complex64::new(lambda_re, lambda_im), r, hp, &cfg)?;
        *out = Box::into_raw(Box::new(SslSystem { fs }));
        Ok(())
    })
}

/// # Safety
/// `system` must come from [`ssl_solve`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ssl_system_free(system: *mut SslSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Number of grid nodes, or 0 for a null handle.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ssl_system_len(system: *const SslSystem) -> usize {
    system.as_ref().map_or(0, |s| s.fs.plus.x.len())
}

/// Relative Wronskian defect `max |W e^{-F} - W(0)| / |W(0)|`.
///
/// # Safety
/// `system` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssl_system_wronskian_defect(system: *const SslSystem, out: *mut f64) -> SslStatus {
    guard(|| {
        let s = deref(system, "system")?;
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        *out = s.fs.wronskian_defect();
        Ok(())
    })
}

unsafe fn fill_real(dst: *mut f64, src: &[f64]) {
    if !dst.is_null() {
        ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    }
}

unsafe fn fill_complex(dst: *mut f64, src: &[Complex64]) {
    if !dst.is_null() {
        for (k, z) in src.iter().enumerate() {
            *dst.add(2 * k) = z.re;
            *dst.add(2 * k + 1) = z.im;
        }
    }
}

fn checked_len(s: &SslSystem, len: usize) -> Result<(), Failure> {
    let n = s.fs.plus.x.len();
    if len < n {
        return Err(invalid(&format!("buffer holds {len} nodes but the system has {n}")));
    }
    Ok(())
}

/// Copy the `x` and `t` grids. Either destination may be null.
///
/// # Safety
/// Non-null destinations must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ssl_system_copy_grid(system: *const SslSystem, x: *mut f64, t: *mut f64, len: usize) -> SslStatus {
    guard(|| {
        let s = deref(system, "system")?;
        checked_len(s, len)?;
        fill_real(x, &s.fs.plus.x);
        fill_real(t, &s.fs.plus.t);
        Ok(())
    })
}

fn pick(s: &SslSystem, branch: SslBranch) -> &SolutionBranch {
    s.fs.branch(match branch {
        SslBranch::Plus => Branch::Plus,
        SslBranch::Minus => Branch::Minus,
    })
}

/// Copy `y` and its x-variable quasi-derivative for one branch. Either
/// destination may be null.
///
/// # Safety
/// Non-null destinations must hold `2 * len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ssl_system_copy_branch(
    system: *const SslSystem,
    branch: SslBranch,
    y: *mut f64,
    y_quasi: *mut f64,
    len: usize,
) -> SslStatus {
    guard(|| {
        let s = deref(system, "system")?;
        checked_len(s, len)?;
        let b = pick(s, branch);
        fill_complex(y, &b.y);
        fill_complex(y_quasi, &b.y_quasi);
        Ok(())
    })
}

/// Copy the remainders `phi` and `psi` for one branch. Either destination
/// may be null.
///
/// # Safety
/// Non-null destinations must hold `2 * len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ssl_system_copy_remainders(
    system: *const SslSystem,
    branch: SslBranch,
    phi: *mut f64,
    psi: *mut f64,
    len: usize,
) -> SslStatus {
    guard(|| {
        let s = deref(system, "system")?;
        checked_len(s, len)?;
        let b = pick(s, branch);
        fill_complex(phi, &b.phi);
        fill_complex(psi, &b.psi);
        Ok(())
    })
}
