use std::ffi::CStr;
use std::ptr;

use maxrand_ffi::*;

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

unsafe fn qubit_state(m: f64) -> *mut MaxrandState {
    let re = [(1.0 + m) / 2.0, 0.0, 0.0, (1.0 - m) / 2.0];
    let mut state = ptr::null_mut();
    assert_eq!(maxrand_state_new(2, re.as_ptr(), ptr::null(), 1e-10, &mut state), MaxrandStatus::Ok);
    state
}

unsafe fn sigma_x() -> *mut MaxrandBasis {
    let re = [S, S, S, -S];
    let mut basis = ptr::null_mut();
    assert_eq!(maxrand_basis_new(2, re.as_ptr(), ptr::null(), 1e-10, &mut basis), MaxrandStatus::Ok);
    basis
}

unsafe fn last_error() -> String {
    let p = maxrand_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn optimal_values_of_qubit() {
    unsafe {
        let state = qubit_state(0.6);
        assert_eq!(maxrand_state_dim(state), 2);
        let mut v = MaxrandOptimal::default();
        assert_eq!(maxrand_optimal(state, &mut v), MaxrandStatus::Ok);
        assert!((v.p_guess_star - 0.9).abs() < 1e-12);
        assert!((v.h_min_star + 0.9f64.log2()).abs() < 1e-12);
        maxrand_state_free(state);
    }
}

#[test]
fn fixed_measurement_quantities() {
    unsafe {
        let state = qubit_state(0.6);
        let basis = sigma_x();
        let mut g = MaxrandGuessing::default();
        assert_eq!(maxrand_pguess(state, basis, 0, 4, &mut g), MaxrandStatus::Ok);
        assert!((g.value - 0.9).abs() < 1e-9);
        assert!(g.upper >= g.value);
        assert_eq!(g.exact, 1);
        let mut h = 0.0;
        assert_eq!(maxrand_conditional_h(state, basis, &mut h), MaxrandStatus::Ok);
        assert!((h - (1.0 - (-(0.8f64 * 0.8f64.log2() + 0.2 * 0.2f64.log2())))).abs() < 1e-10);
        let mut hmax = 0.0;
        assert_eq!(maxrand_conditional_hmax(state, basis, &mut hmax), MaxrandStatus::Ok);
        assert!((hmax - 1.6f64.log2()).abs() < 1e-9);
        maxrand_basis_free(basis);
        maxrand_state_free(state);
    }
}

#[test]
fn certify_verdicts() {
    unsafe {
        let state = qubit_state(0.6);
        let basis = sigma_x();
        let mut v = MaxrandVerdict::default();
        assert_eq!(maxrand_certify(state, basis, 0.15, 1e-6, &mut v), MaxrandStatus::Ok);
        assert_eq!(v.accepted, 1);
        assert_eq!(maxrand_certify(state, basis, 0.2, 1e-6, &mut v), MaxrandStatus::Ok);
        assert_eq!(v.accepted, 0);
        assert!((v.certified_hmin + 0.9f64.log2()).abs() < 1e-6);
        maxrand_basis_free(basis);
        maxrand_state_free(state);
    }
}

#[test]
fn unbiased_basis_round_trip() {
    unsafe {
        let state = qubit_state(0.3);
        let mut basis = ptr::null_mut();
        assert_eq!(maxrand_basis_unbiased(state, &mut basis), MaxrandStatus::Ok);
        let mut re = [0.0; 4];
        let mut im = [0.0; 4];
        assert_eq!(maxrand_basis_vectors(basis, re.as_mut_ptr(), im.as_mut_ptr()), MaxrandStatus::Ok);
        for z in re.iter().zip(&im) {
            assert!((z.0 * z.0 + z.1 * z.1 - 0.5).abs() < 1e-12);
        }
        let mut copy = ptr::null_mut();
        assert_eq!(maxrand_basis_new(2, re.as_ptr(), im.as_ptr(), 1e-10, &mut copy), MaxrandStatus::Ok);
        maxrand_basis_free(copy);
        maxrand_basis_free(basis);
        maxrand_state_free(state);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let re = [0.5, 0.0, 0.0, 0.6];
        let mut state = ptr::null_mut();
        assert_eq!(maxrand_state_new(2, re.as_ptr(), ptr::null(), 1e-10, &mut state), MaxrandStatus::InvalidInput);
        assert!(state.is_null());
        assert!(last_error().contains("trace"));

        assert_eq!(maxrand_state_new(2, ptr::null(), ptr::null(), 1e-10, &mut state), MaxrandStatus::NullPointer);

        let skew = [1.0, 0.0, 1.0, 0.0];
        let mut basis = ptr::null_mut();
        assert_eq!(maxrand_basis_new(2, skew.as_ptr(), ptr::null(), 1e-10, &mut basis), MaxrandStatus::InvalidInput);

        let qutrit = [1.0 / 3.0, 0.0, 0.0, 0.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 1.0 / 3.0];
        assert_eq!(maxrand_state_new(3, qutrit.as_ptr(), ptr::null(), 1e-10, &mut state), MaxrandStatus::Ok);
        let basis = sigma_x();
        let mut h = 0.0;
        assert_eq!(maxrand_conditional_h(state, basis, &mut h), MaxrandStatus::DimensionMismatch);
        assert!(last_error().contains("dimension"));
        assert_eq!(maxrand_conditional_h(state, ptr::null(), &mut h), MaxrandStatus::NullPointer);
        maxrand_basis_free(basis);
        maxrand_state_free(state);
        maxrand_state_free(ptr::null_mut());
    }
}
