use serde::{Deserialize, Serialize};

use super::matrix::{fix_phase, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Default tolerance on `max |A - A^dagger|` accepted as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;

const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;
const PHASE_TOL: f64 = 1e-10;

/// Eigenpairs of a Hermitian matrix: eigenvalues ascending, eigenvectors as columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().expect("empty eigendecomposition")
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    /// V f(diag) V^dagger
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            if fv[k] == 0.0 {
                continue;
            }
            for r in 0..n {
                let a = v[(r, k)] * fv[k];
                for c in 0..n {
                    out[(r, c)] += a * v[(c, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|l| l)
    }
}

/// Eigendecomposition of a Hermitian matrix with the default hermiticity tolerance.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    hermitian_eigen_with_tol(a, HERMITICITY_TOL)
}

/// Cyclic complex Jacobi. Each rotation zeroes one off-diagonal pair after moving its
/// phase onto the rotation, so the 2x2 subproblem is real symmetric.
pub fn hermitian_eigen_with_tol(a: &ComplexMatrix, herm_tol: f64) -> Result<HermitianEigen> {
    let n = a.ensure_square()?;
    let deviation = a.hermiticity_deviation();
    if deviation.is_nan() || deviation > herm_tol {
        return Err(Error::NotHermitian { deviation });
    }
    let mut h = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = h.frobenius_norm();

    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&h) <= OFF_DIAGONAL_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut h, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&h) <= OFF_DIAGONAL_TOL * scale {
        converged = true;
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "hermitian_eigen",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let values = order.iter().map(|&i| diag[i]).collect();
    let columns: Vec<Vec<C64>> = order
        .iter()
        .map(|&i| {
            let mut col = v.column(i);
            fix_phase(&mut col, PHASE_TOL);
            col
        })
        .collect();
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix::from_columns(&columns),
    })
}

fn off_diagonal_norm(h: &ComplexMatrix) -> f64 {
    let n = h.rows();
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc += h[(r, c)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate(h: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = h.rows();
    let hpq = h[(p, q)];
    let modulus = hpq.norm();
    if modulus == 0.0 {
        return;
    }
    let app = h[(p, p)].re;
    let aqq = h[(q, q)].re;
    let phase = hpq / modulus;

    let theta = (aqq - app) / (2.0 * modulus);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    if t == 0.0 {
        return;
    }
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on the (p, q) plane.
    let s_phase = phase * s;
    let s_conj = phase.conj() * s;

    for k in 0..n {
        let akp = h[(k, p)];
        let akq = h[(k, q)];
        h[(k, p)] = akp * c - akq * s_conj;
        h[(k, q)] = akp * s_phase + akq * c;
    }
    for k in 0..n {
        let apk = h[(p, k)];
        let aqk = h[(q, k)];
        h[(p, k)] = apk * c - aqk * s_phase;
        h[(q, k)] = apk * s_conj + aqk * c;
    }
    h[(p, q)] = C64::new(0.0, 0.0);
    h[(q, p)] = C64::new(0.0, 0.0);
    h[(p, p)] = C64::new(h[(p, p)].re, 0.0);
    h[(q, q)] = C64::new(h[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * s_conj;
        v[(k, q)] = vkp * s_phase + vkq * c;
    }
}
