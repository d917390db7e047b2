//! Validated density matrices and the concrete states used throughout the crate.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::random::{ginibre, seeded_rng};
use crate::linalg::{
    clip_psd_with_tol, hermitian_eigen_with_tol, ComplexMatrix, HermitianEigen, C64, ONE, ZERO,
};

/// Default validation tolerance for hermiticity, positivity and unit trace.
pub const STATE_TOL: f64 = 1e-10;

/// A Hermitian, positive semidefinite, unit-trace matrix together with its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    eigen: HermitianEigen,
    sqrt: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `raw` as a quantum state. `tol` bounds the hermiticity defect, the most
    /// negative eigenvalue and the trace error.
    pub fn from_matrix(raw: ComplexMatrix, tol: f64) -> Result<Self> {
        raw.ensure_square()?;
        let mut eigen = hermitian_eigen_with_tol(&raw, tol)?;
        let matrix = raw.hermitian_part();
        let trace = matrix.trace().re;
        if trace.is_nan() || (trace - 1.0).abs() > tol {
            return Err(Error::TraceNotOne { trace });
        }
        clip_psd_with_tol(&mut eigen, tol)?;
        let sqrt = eigen.apply(f64::sqrt);
        Ok(Self {
            matrix,
            eigen,
            sqrt,
        })
    }

    /// Normalises a PSD matrix by its trace before validation.
    pub fn from_unnormalized(raw: ComplexMatrix) -> Result<Self> {
        let t = raw.trace().re;
        if t.is_nan() || t <= 0.0 {
            return Err(Error::TraceNotOne { trace: t });
        }
        Self::from_matrix(raw.scale(1.0 / t), STATE_TOL)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_matrix(ComplexMatrix::identity(dim).scale(1.0 / dim as f64), STATE_TOL)
            .expect("I/d is a state")
    }

    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        Self::from_matrix(ComplexMatrix::from_diag(p), STATE_TOL)
    }

    pub fn pure(psi: &[C64]) -> Result<Self> {
        Self::from_unnormalized(ComplexMatrix::projector(psi))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Spectrum (ascending, round-off clipped) and eigenvectors.
    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    pub fn sqrt(&self) -> &ComplexMatrix {
        &self.sqrt
    }

    pub fn trace_sqrt(&self) -> f64 {
        self.eigen.values.iter().map(|l| l.sqrt()).sum()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigen.max_value()
    }

    pub fn purity(&self) -> f64 {
        self.eigen.values.iter().map(|l| l * l).sum()
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.eigen.values.iter().filter(|&&l| l > tol).count()
    }

    /// Eigenvectors ordered by decreasing eigenvalue, returned with their eigenvalues.
    pub fn eigenbasis_descending(&self) -> (Vec<f64>, Vec<Vec<C64>>) {
        let n = self.dim();
        let values = (0..n).rev().map(|k| self.eigen.values[k]).collect();
        let vectors = (0..n).rev().map(|k| self.eigen.vector(k)).collect();
        (values, vectors)
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// diag((1 + m)/2, (1 - m)/2)
pub fn qubit_m_state(m: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::OutOfRange {
            what: "m",
            value: m,
            min: 0.0,
            max: 1.0,
        });
    }
    DensityMatrix::from_probabilities(&[(1.0 + m) / 2.0, (1.0 - m) / 2.0])
}

/// The entangled two-qubit basis with no unbiased product basis:
/// |00>, and (|01> + w^k |10> + w^{2k} |11>)/sqrt(3) for k = 0, 1, 2 with w = exp(2 pi i / 3).
pub fn two_qubit_basis() -> [Vec<C64>; 4] {
    let omega = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let s = 1.0 / 3f64.sqrt();
    let entangled = |k: u32| {
        vec![
            ZERO,
            ONE * s,
            omega.powu(k) * s,
            omega.powu(2 * k) * s,
        ]
    };
    [
        vec![ONE, ZERO, ZERO, ZERO],
        entangled(0),
        entangled(1),
        entangled(2),
    ]
}

/// sum_k weights[k] |psi_k><psi_k| over [`two_qubit_basis`].
pub fn two_qubit_diag_state(weights: [f64; 4]) -> Result<DensityMatrix> {
    if weights.iter().any(|&w| w.is_nan() || w < 0.0) {
        return Err(Error::InvalidWeights(format!("negative weight in {weights:?}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    let basis = two_qubit_basis();
    let mut rho = ComplexMatrix::zeros(4, 4);
    for (w, psi) in weights.iter().zip(&basis) {
        rho = &rho + &ComplexMatrix::projector(psi).scale(*w);
    }
    DensityMatrix::from_matrix(rho, STATE_TOL)
}

/// Induced-measure random state G G^dagger / tr(G G^dagger) with G a dim x rank Ginibre matrix.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::BadRank { rank, dim });
    }
    let g = ginibre(dim, rank, &mut seeded_rng(seed));
    DensityMatrix::from_unnormalized(&g * &g.adjoint())
}

/// Pure state on A (x) E, amplitudes indexed `a * dim_e + e`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureBipartiteVector {
    pub dim_a: usize,
    pub dim_e: usize,
    pub amplitudes: Vec<C64>,
}

impl PureBipartiteVector {
    /// tr_E |Psi><Psi|
    pub fn reduced_a(&self) -> ComplexMatrix {
        let (da, de) = (self.dim_a, self.dim_e);
        ComplexMatrix::from_fn(da, da, |r, c| {
            (0..de)
                .map(|e| self.amplitudes[r * de + e] * self.amplitudes[c * de + e].conj())
                .sum()
        })
    }

    /// tr_A |Psi><Psi|
    pub fn reduced_e(&self) -> ComplexMatrix {
        let (da, de) = (self.dim_a, self.dim_e);
        ComplexMatrix::from_fn(de, de, |r, c| {
            (0..da)
                .map(|a| self.amplitudes[a * de + r] * self.amplitudes[a * de + c].conj())
                .sum()
        })
    }

    /// Singular values of the amplitude matrix, descending.
    pub fn schmidt_coefficients(&self) -> Result<Vec<f64>> {
        let rho_a = DensityMatrix::from_matrix(self.reduced_a(), 1e-9)?;
        let mut s: Vec<f64> = rho_a.eigen().values.iter().map(|l| l.sqrt()).collect();
        s.reverse();
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm(&self.amplitudes)
    }
}

/// sum_k sqrt(lambda_k) |u_k>|k>, with E's basis fixed to the computational one.
pub fn purify(rho: &DensityMatrix) -> PureBipartiteVector {
    let d = rho.dim();
    let e = rho.eigen();
    let mut amplitudes = vec![ZERO; d * d];
    for k in 0..d {
        let w = e.values[k].sqrt();
        for a in 0..d {
            amplitudes[a * d + k] = e.vectors[(a, k)] * w;
        }
    }
    PureBipartiteVector {
        dim_a: d,
        dim_e: d,
        amplitudes,
    }
}

/// rho (x) |0><0| on a `d_aux`-dimensional auxiliary system.
pub fn tensor_with_pure_aux(rho: &DensityMatrix, d_aux: usize) -> Result<DensityMatrix> {
    if d_aux == 0 {
        return Err(Error::BadRank { rank: 0, dim: 0 });
    }
    let mut aux = ComplexMatrix::zeros(d_aux, d_aux);
    aux[(0, 0)] = ONE;
    DensityMatrix::from_matrix(rho.matrix().kron(&aux), STATE_TOL)
}
