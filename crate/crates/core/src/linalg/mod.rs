//! Dense complex linear algebra kernel sized for small quantum systems (d up to a few dozen).

mod eigen;
mod functions;
mod matrix;
pub mod random;

pub use eigen::{hermitian_eigen, hermitian_eigen_with_tol, HermitianEigen, HERMITICITY_TOL};
pub use functions::{
    fidelity_sq, matrix_log2_psd, matrix_sqrt_psd, min_eigenvalue, pinv_sqrt_psd, polar_unitary,
    psd_eigen, sqrt_fidelity, support_projector, PSD_TOL, SUPPORT_TOL,
};
pub use matrix::{basis_vector, inner, norm, normalized, ComplexMatrix, C64, ONE, ZERO};

pub(crate) use functions::clip_psd_with_tol;
pub(crate) use matrix::fix_phase;
