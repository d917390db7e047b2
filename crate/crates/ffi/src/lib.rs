//! C interface to `maxrand`.
//!
//! States and bases live behind opaque handles created by `*_new` functions and released
//! with the matching `*_free`. Every fallible function returns a [`MaxrandStatus`]; on
//! failure a description is available from [`maxrand_last_error`] on the same thread.
//! Matrices are passed as separate row-major arrays of real and imaginary parts.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use maxrand::entropies::{conditional_h_basis, conditional_hmax, optimal_values};
use maxrand::guessing::{dual_certificate, pguess_fixed, ValueStatus};
use maxrand::linalg::{ComplexMatrix, C64};
use maxrand::measurements::{unbiased_basis, MeasurementBasis};
use maxrand::states::DensityMatrix;
use maxrand::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxrandStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    NoConvergence = 4,
    Panic = 5,
}

/// A validated density matrix.
pub struct MaxrandState(DensityMatrix);

/// A rank-one projective measurement.
pub struct MaxrandBasis(MeasurementBasis);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MaxrandOptimal {
    pub h_min_star: f64,
    pub h_star: f64,
    pub h_max_star: f64,
    pub p_guess_star: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MaxrandGuessing {
    /// Best achieved guessing probability.
    pub value: f64,
    /// Certified upper bound.
    pub upper: f64,
    /// 1 when `upper - value` is within the bracket tolerance.
    pub exact: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MaxrandVerdict {
    /// 1 when the certified min-entropy covers the claim.
    pub accepted: i32,
    pub certified_hmin: f64,
    pub upper: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MaxrandStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::NotFourDim { .. } => MaxrandStatus::DimensionMismatch,
        Error::NoConvergence { .. } | Error::NoSuccess { .. } => MaxrandStatus::NoConvergence,
        _ => MaxrandStatus::InvalidInput,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), MaxrandStatus>) -> MaxrandStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MaxrandStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("internal panic".to_string());
            MaxrandStatus::Panic
        }
    }
}

fn lib<T>(r: maxrand::Result<T>) -> Result<T, MaxrandStatus> {
    r.map_err(|e| {
        set_last_error(e.to_string());
        status_of(&e)
    })
}

fn null(what: &str) -> MaxrandStatus {
    set_last_error(format!("{what} is null"));
    MaxrandStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, MaxrandStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, MaxrandStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn read_complex(re: *const f64, im: *const f64, len: usize) -> Result<Vec<C64>, MaxrandStatus> {
    let re = deref(re, "re")?;
    let re = std::slice::from_raw_parts(re, len);
    let im = if im.is_null() {
        vec![0.0; len]
    } else {
        std::slice::from_raw_parts(im, len).to_vec()
    };
    Ok(re.iter().zip(im).map(|(&a, b)| C64::new(a, b)).collect())
}

/// Description of the last failure on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn maxrand_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Validates a `dim x dim` density matrix. `im` may be null for a real matrix.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `dim * dim` doubles; `state_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxrand_state_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    psd_tol: f64,
    state_out: *mut *mut MaxrandState,
) -> MaxrandStatus {
    guard(|| {
        let slot = out(state_out, "state_out")?;
        let entries = read_complex(re, im, dim * dim)?;
        let m = lib(ComplexMatrix::new(dim, dim, entries))?;
        let rho = lib(DensityMatrix::from_matrix(m, psd_tol))?;
        *slot = Box::into_raw(Box::new(MaxrandState(rho)));
        Ok(())
    })
}

/// # Safety
/// `state` must come from [`maxrand_state_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn maxrand_state_free(state: *mut MaxrandState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Dimension of the state, 0 for null.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn maxrand_state_dim(state: *const MaxrandState) -> usize {
    state.as_ref().map_or(0, |s| s.0.dim())
}

/// Builds a basis from `dim` vectors stored one after another (`re[i * dim + j]` is component
/// `j` of vector `i`). `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `dim * dim` doubles; `basis_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxrand_basis_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    basis_tol: f64,
    basis_out: *mut *mut MaxrandBasis,
) -> MaxrandStatus {
    guard(|| {
        let slot = out(basis_out, "basis_out")?;
        let entries = read_complex(re, im, dim * dim)?;
        let vectors = entries.chunks(dim.max(1)).map(<[C64]>::to_vec).collect();
        let m = lib(MeasurementBasis::from_vectors(vectors, basis_tol))?;
        *slot = Box::into_raw(Box::new(MaxrandBasis(m)));
        Ok(())
    })
}

/// Basis unbiased to the eigenbasis of `state`.
///
/// # Safety
/// `state` must be a live handle; `basis_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxrand_basis_unbiased(
    state: *const MaxrandState,
    basis_out: *mut *mut MaxrandBasis,
) -> MaxrandStatus {
    guard(|| {
        let rho = &deref(state, "state")?.0;
        let slot = out(basis_out, "basis_out")?;
        *slot = Box::into_raw(Box::new(MaxrandBasis(unbiased_basis(rho))));
        Ok(())
    })
}

/// Copies the basis vectors into `re` and `im`, laid out as in [`maxrand_basis_new`].
///
/// # Safety
/// `basis` must be a live handle; `re` and `im` must each have room for `dim * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn maxrand_basis_vectors(
    basis: *const MaxrandBasis,
    re: *mut f64,
    im: *mut f64,
) -> MaxrandStatus {
    guard(|| {
        let m = &deref(basis, "basis")?.0;
        let d = m.dim();
        if re.is_null() || im.is_null() {
            return Err(null("output array"));
        }
        let re = std::slice::from_raw_parts_mut(re, d * d);
        let im = std::slice::from_raw_parts_mut(im, d * d);
        for (k, z) in m.vectors().iter().flatten().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// # Safety
/// `basis` must come from a `maxrand_basis_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn maxrand_basis_free(basis: *mut MaxrandBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Optimal min-, von Neumann and max-entropy over all rank-one measurements.
///
/// # Safety
/// `state` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxrand_optimal(state: *const MaxrandState, result: *mut MaxrandOptimal) -> MaxrandStatus {
    guard(|| {
        let rho = &deref(state, "state")?.0;
        let slot = out(result, "result")?;
        let v = optimal_values(rho);
        *slot = MaxrandOptimal {
            h_min_star: v.h_min_star,
            h_star: v.h_star,
            h_max_star: v.h_max_star,
            p_guess_star: v.p_guess_star,
        };
        Ok(())
    })
}

/// Guessing probability of `basis` on `state` with its certified upper bound.
///
/// # Safety
/// `state` and `basis` must be live handles; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxrand_pguess(
    state: *const MaxrandState,
    basis: *const MaxrandBasis,
    seed: u64,
    restarts: usize,
    result: *mut MaxrandGuessing,
) -> MaxrandStatus {
    guard(|| {
        let rho = &deref(state, "state")?.0;
        let m = &deref(basis, "basis")?.0;
        let slot = out(result, "result")?;
        let r = lib(pguess_fixed(rho, m, seed, restarts))?;
        *slot = MaxrandGuessing {
            value: r.value,
            upper: r.bracket.upper,
            exact: (r.status == ValueStatus::Exact) as i32,
        };
        Ok(())
    })
}

/// Conditional von Neumann entropy of the outcomes of `basis`.
///
/// # Safety
/// `state` and `basis` must be live handles; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxrand_conditional_h(
    state: *const MaxrandState,
    basis: *const MaxrandBasis,
    result: *mut f64,
) -> MaxrandStatus {
    guard(|| {
        let rho = &deref(state, "state")?.0;
        let m = &deref(basis, "basis")?.0;
        let slot = out(result, "result")?;
        *slot = lib(conditional_h_basis(rho, m))?;
        Ok(())
    })
}

/// Conditional max-entropy of the outcomes of `basis`.
///
/// # Safety
/// `state` and `basis` must be live handles; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxrand_conditional_hmax(
    state: *const MaxrandState,
    basis: *const MaxrandBasis,
    result: *mut f64,
) -> MaxrandStatus {
    guard(|| {
        let rho = &deref(state, "state")?.0;
        let m = &deref(basis, "basis")?.0;
        let slot = out(result, "result")?;
        *slot = lib(conditional_hmax(rho, m))?.h_max;
        Ok(())
    })
}

/// Checks a claimed conditional min-entropy against a dual certificate.
///
/// # Safety
/// `state` and `basis` must be live handles; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxrand_certify(
    state: *const MaxrandState,
    basis: *const MaxrandBasis,
    claimed_hmin: f64,
    tol: f64,
    result: *mut MaxrandVerdict,
) -> MaxrandStatus {
    guard(|| {
        let rho = &deref(state, "state")?.0;
        let m = &deref(basis, "basis")?.0;
        let slot = out(result, "result")?;
        let bracket = lib(dual_certificate(rho, m))?;
        let certified = (-bracket.upper.log2()).max(0.0);
        *slot = MaxrandVerdict {
            accepted: (certified >= claimed_hmin - tol) as i32,
            certified_hmin: certified,
            upper: bracket.upper,
        };
        Ok(())
    })
}
