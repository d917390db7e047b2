//! Spectral matrix functions, polar factor and fidelities.

use super::eigen::{hermitian_eigen, HermitianEigen};
use super::matrix::{norm, orthogonalize, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Eigenvalues in `[-PSD_TOL, 0)` are treated as round-off and clipped to zero.
pub const PSD_TOL: f64 = 1e-10;

/// Eigenvalues at or below this count as outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Eigenvalues within this many ulps of zero, relative to the spectral radius, are round-off.
const ROUND_OFF_ULPS: f64 = 32.0;

/// Eigendecomposition of a PSD matrix with slightly negative eigenvalues clipped to 0.
pub fn psd_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let mut e = hermitian_eigen(a)?;
    clip_psd(&mut e)?;
    Ok(e)
}

pub(crate) fn clip_psd(e: &mut HermitianEigen) -> Result<()> {
    clip_psd_with_tol(e, PSD_TOL)
}

pub(crate) fn clip_psd_with_tol(e: &mut HermitianEigen, tol: f64) -> Result<()> {
    let min = e.min_value();
    if min < -tol {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let floor = ROUND_OFF_ULPS * f64::EPSILON * e.max_value().abs().max(min.abs());
    for l in e.values.iter_mut() {
        if *l < 0.0 || *l <= floor {
            *l = 0.0;
        }
    }
    Ok(())
}

pub fn matrix_sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(psd_eigen(a)?.apply(f64::sqrt))
}

/// Base-2 logarithm on the support; zero on its orthogonal complement.
pub fn matrix_log2_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(psd_eigen(a)?.apply(|l| if l > SUPPORT_TOL { l.log2() } else { 0.0 }))
}

/// Moore-Penrose inverse of the square root, i.e. A^{-1/2} restricted to the support.
pub fn pinv_sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(psd_eigen(a)?.apply(|l| if l > SUPPORT_TOL { 1.0 / l.sqrt() } else { 0.0 }))
}

pub fn support_projector(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(psd_eigen(a)?.apply(|l| if l > SUPPORT_TOL { 1.0 } else { 0.0 }))
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(&a.hermitian_part())?.min_value())
}

/// Unitary polar factor of a square matrix: the unitary `U` maximising `Re tr(U^dagger A)`.
///
/// Right singular vectors come from the eigenvectors of `A^dagger A`; left singular
/// vectors are `A v / s` re-orthogonalised in order of decreasing singular value. Null
/// directions are completed deterministically from the standard basis.
pub fn polar_unitary(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.ensure_square()?;
    if a.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let gram = (&a.adjoint() * a).hermitian_part();
    let mut e = hermitian_eigen(&gram)?;
    clip_psd(&mut e)?;

    let mut left: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut right: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut null_right: Vec<Vec<C64>> = Vec::new();
    for k in (0..n).rev() {
        let v = e.vector(k);
        let s = e.values[k].sqrt();
        if s > 0.0 {
            let mut u = a.mul_vec(&v);
            orthogonalize(&mut u, &left);
            let nu = norm(&u);
            if nu > 1e-8 * s {
                u.iter_mut().for_each(|z| *z /= nu);
                left.push(u);
                right.push(v);
                continue;
            }
        }
        null_right.push(v);
    }
    let mut j = 0;
    for v in null_right {
        loop {
            let mut u = super::matrix::basis_vector(n, j);
            j += 1;
            orthogonalize(&mut u, &left);
            let nu = norm(&u);
            if nu > 0.5 {
                u.iter_mut().for_each(|z| *z /= nu);
                left.push(u);
                right.push(v);
                break;
            }
        }
    }
    let u = &ComplexMatrix::from_columns(&left) * &ComplexMatrix::from_columns(&right).adjoint();
    Ok(newton_schulz_polish(u))
}

/// One Newton-Schulz step `U (3 - U^dagger U) / 2`, which removes first-order loss of unitarity.
fn newton_schulz_polish(u: ComplexMatrix) -> ComplexMatrix {
    let n = u.rows();
    let gram = &u.adjoint() * &u;
    let corr = (&ComplexMatrix::identity(n).scale(3.0) - &gram).scale(0.5);
    &u * &corr
}

/// tr sqrt(sqrt(sigma) rho sqrt(sigma)) for PSD arguments (unsquared convention).
pub fn sqrt_fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let d = rho.ensure_square()?;
    if sigma.rows() != d || sigma.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: sigma.rows(),
        });
    }
    let s = matrix_sqrt_psd(sigma)?;
    let inner = (&(&s * rho) * &s).hermitian_part();
    let mut e = hermitian_eigen(&inner)?;
    // sqrt(sigma) rho sqrt(sigma) is PSD whenever both arguments are.
    clip_psd(&mut e)?;
    Ok(e.values.iter().map(|l| l.sqrt()).sum())
}

/// Squared fidelity, `sqrt_fidelity(rho, sigma)^2`.
pub fn fidelity_sq(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let f = sqrt_fidelity(rho, sigma)?;
    Ok(f * f)
}
