//! Optimal entropies of a state and conditional entropies of fixed measurements.
//!
//! All logarithms are base 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{psd_eigen, ComplexMatrix, C64, SUPPORT_TOL};
use crate::measurements::MeasurementBasis;
use crate::states::DensityMatrix;

/// Iteration cap of the max-entropy solver.
pub const PSECR_MAX_ITERATIONS: usize = 10_000;

/// The solver stops once its certified gap `upper - lower` falls below this.
pub const PSECR_GAP_TOL: f64 = 1e-12;

/// Largest gap accepted when the iteration cap is reached.
pub const PSECR_ACCEPT_GAP: f64 = 1e-7;

/// `-sum l log2 l` over the eigenvalues of a PSD matrix with unit trace, `0 log 0 = 0`.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    -values
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.log2())
        .sum::<f64>()
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigen().values).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalValues {
    pub h_min_star: f64,
    pub h_star: f64,
    pub h_max_star: f64,
    pub p_guess_star: f64,
}

pub fn optimal_values(rho: &DensityMatrix) -> OptimalValues {
    let d = rho.dim() as f64;
    let t = rho.trace_sqrt();
    let p_guess_star = (t * t / d).min(1.0);
    let log_d = d.log2();
    OptimalValues {
        h_min_star: (-p_guess_star.log2()).max(0.0),
        h_star: (log_d - von_neumann_entropy(rho)).max(0.0),
        h_max_star: (log_d + rho.lambda_max().log2()).max(0.0),
        p_guess_star,
    }
}

/// `H(Z|E) = S(sum_z M_z rho M_z) - S(rho)` for a projective measurement given by its projectors.
pub fn conditional_h(rho: &DensityMatrix, projectors: &[ComplexMatrix]) -> Result<f64> {
    let d = rho.dim();
    let mut dephased = ComplexMatrix::zeros(d, d);
    for p in projectors {
        if p.rows() != d || p.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.rows(),
            });
        }
        dephased = &dephased + &(&(p * rho.matrix()) * p);
    }
    let e = psd_eigen(&dephased.hermitian_part())?;
    Ok((entropy_of_spectrum(&e.values) - von_neumann_entropy(rho)).max(0.0))
}

pub fn conditional_h_basis(rho: &DensityMatrix, m: &MeasurementBasis) -> Result<f64> {
    conditional_h(rho, &m.projectors())
}

/// Solution of `p_secr = max_sigma (sum_x sqrt(<g_x|sigma|g_x>))^2` with `g_x = sqrt(rho)|m_x>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEntropyResult {
    pub p_secr: f64,
    /// Certified upper bound on `p_secr` from the dual.
    pub p_secr_upper: f64,
    pub h_max: f64,
    pub sigma_star: ComplexMatrix,
    pub iterations: usize,
}

/// Conditional max-entropy `log2 p_secr` of the outcomes of a rank-one measurement.
pub fn conditional_hmax(rho: &DensityMatrix, m: &MeasurementBasis) -> Result<MaxEntropyResult> {
    conditional_hmax_traced(rho, m).map(|(r, _)| r)
}

/// Same as [`conditional_hmax`], also returning the objective after every accepted step.
///
/// The primal is concave in `sigma`. Writing `sqrt(q) = min_t (q / t + t) / 2` turns it
/// into `min_t max_sigma`, so for any `t > 0`
/// `sqrt(p_secr) <= sqrt(lambda_max(sum_x g_x g_x^dagger / t_x) * sum_x t_x)`.
/// Taking `t_x = sqrt(<g_x|sigma|g_x>)` at the current iterate gives the stopping gap.
pub fn conditional_hmax_traced(
    rho: &DensityMatrix,
    m: &MeasurementBasis,
) -> Result<(MaxEntropyResult, Vec<f64>)> {
    let d = rho.dim();
    if m.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: m.dim(),
        });
    }
    let g: Vec<Vec<C64>> = m
        .vectors()
        .iter()
        .map(|v| rho.sqrt().mul_vec(v))
        .filter(|v| crate::linalg::norm(v) > SUPPORT_TOL)
        .collect();
    let solver = PsecrSolver { d, g: &g };

    let mut sigma = ComplexMatrix::identity(d).scale(1.0 / d as f64);
    let mut value = solver.objective(&sigma);
    let mut trace = vec![value];
    let mut upper = solver.upper_bound(&sigma)?;
    let mut iterations = 0;
    while upper - value > PSECR_GAP_TOL && iterations < PSECR_MAX_ITERATIONS {
        iterations += 1;
        let proposal = solver.fixed_point_step(&sigma);
        // backtrack along the segment towards the proposal until the objective improves
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-6 {
            let candidate = if step == 1.0 {
                proposal.clone()
            } else {
                &sigma.scale(1.0 - step) + &proposal.scale(step)
            };
            let v = solver.objective(&candidate);
            if v > value {
                accepted = Some((candidate, v));
                break;
            }
            step *= 0.5;
        }
        let Some((next, v)) = accepted else { break };
        sigma = next;
        value = v;
        trace.push(value);
        upper = upper.min(solver.upper_bound(&sigma)?);
    }
    if upper - value > PSECR_ACCEPT_GAP {
        return Err(Error::NoConvergence {
            routine: "conditional_hmax",
            iterations,
        });
    }
    let result = MaxEntropyResult {
        p_secr: value,
        p_secr_upper: upper.max(value),
        h_max: value.log2().max(0.0),
        sigma_star: sigma,
        iterations,
    };
    Ok((result, trace))
}

struct PsecrSolver<'a> {
    d: usize,
    g: &'a [Vec<C64>],
}

impl PsecrSolver<'_> {
    const DROP: f64 = 1e-14;

    fn weights(&self, sigma: &ComplexMatrix) -> Vec<f64> {
        self.g.iter().map(|v| sigma.sandwich(v, v).re.max(0.0)).collect()
    }

    fn objective(&self, sigma: &ComplexMatrix) -> f64 {
        let s: f64 = self.weights(sigma).iter().map(|q| q.sqrt()).sum();
        s * s
    }

    /// `sigma <- T sigma T / tr`, `T = sum_x g_x g_x^dagger / sqrt(<g_x|sigma|g_x>)`.
    fn fixed_point_step(&self, sigma: &ComplexMatrix) -> ComplexMatrix {
        let mut t = ComplexMatrix::zeros(self.d, self.d);
        for (v, q) in self.g.iter().zip(self.weights(sigma)) {
            if q >= Self::DROP {
                t = &t + &ComplexMatrix::projector(v).scale(1.0 / q.sqrt());
            }
        }
        let n = (&(&t * sigma) * &t).hermitian_part();
        let tr = n.trace().re;
        if tr > 0.0 {
            n.scale(1.0 / tr)
        } else {
            sigma.clone()
        }
    }

    fn upper_bound(&self, sigma: &ComplexMatrix) -> Result<f64> {
        let t: Vec<f64> = self.weights(sigma).iter().map(|q| q.sqrt()).collect();
        if t.iter().any(|&x| x < Self::DROP) {
            return Ok(f64::INFINITY);
        }
        let mut gt = ComplexMatrix::zeros(self.d, self.d);
        for (v, tx) in self.g.iter().zip(&t) {
            gt = &gt + &ComplexMatrix::projector(v).scale(1.0 / tx);
        }
        let lmax = psd_eigen(&gt.hermitian_part())?.max_value();
        Ok(lmax * t.iter().sum::<f64>())
    }
}

/// Independent qubit evaluation of `p_secr`: grid over the Bloch ball at angular and radial
/// step `resolution`, then a shrinking pattern search from the best grid point.
pub fn psecr_oracle_qubit(rho: &DensityMatrix, m: &MeasurementBasis, resolution: f64) -> Result<f64> {
    if rho.dim() != 2 || m.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: if rho.dim() != 2 { rho.dim() } else { m.dim() },
        });
    }
    let resolution = resolution.clamp(1e-3, 0.5);
    let g: Vec<Vec<C64>> = m.vectors().iter().map(|v| rho.sqrt().mul_vec(v)).collect();
    // <g|sigma|g> with sigma = (I + x X + y Y + z Z)/2
    let bloch: Vec<[f64; 4]> = g
        .iter()
        .map(|v| {
            let n0 = v[0].norm_sqr() + v[1].norm_sqr();
            let off = v[0].conj() * v[1];
            [n0, 2.0 * off.re, 2.0 * off.im, v[0].norm_sqr() - v[1].norm_sqr()]
        })
        .collect();
    let value = |p: [f64; 3]| -> f64 {
        let s: f64 = bloch
            .iter()
            .map(|b| (0.5 * (b[0] + p[0] * b[1] + p[1] * b[2] + p[2] * b[3])).max(0.0).sqrt())
            .sum();
        s * s
    };
    let steps_angle = (std::f64::consts::PI / resolution).ceil() as usize;
    let steps_r = (1.0 / resolution).ceil() as usize;
    let mut best = (value([0.0; 3]), [0.0; 3]);
    for i in 0..=steps_angle {
        let theta = std::f64::consts::PI * i as f64 / steps_angle as f64;
        for j in 0..2 * steps_angle {
            let phi = std::f64::consts::PI * j as f64 / steps_angle as f64;
            let dir = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            for k in 1..=steps_r {
                let r = k as f64 / steps_r as f64;
                let p = dir.map(|c| r * c);
                let v = value(p);
                if v > best.0 {
                    best = (v, p);
                }
            }
        }
    }
    let mut step = resolution;
    while step > 1e-12 {
        let mut improved = false;
        for axis in 0..3 {
            for sign in [-1.0, 1.0] {
                let mut p = best.1;
                p[axis] += sign * step;
                let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                if r > 1.0 {
                    p = p.map(|c| c / r);
                }
                let v = value(p);
                if v > best.0 {
                    best = (v, p);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{coarse_grain, unbiased_basis, CoarseGraining};
    use crate::states::{qubit_m_state, random_density};

    fn sigma_x_basis() -> MeasurementBasis {
        let s = 0.5f64.sqrt();
        MeasurementBasis::from_vectors(
            vec![vec![C64::new(s, 0.0), C64::new(s, 0.0)], vec![C64::new(s, 0.0), C64::new(-s, 0.0)]],
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityMatrix::pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        assert!(von_neumann_entropy(&pure).abs() < 1e-12);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(5)) - 5f64.log2()).abs() < 1e-12);
        let q = qubit_m_state(0.6).unwrap();
        assert!((von_neumann_entropy(&q) - 0.7219280948873623).abs() < 1e-12);
    }

    #[test]
    fn optimal_value_examples() {
        let v = optimal_values(&qubit_m_state(0.6).unwrap());
        assert!((v.p_guess_star - 0.9).abs() < 1e-12);
        assert!((v.h_min_star - 0.15200309344504995).abs() < 1e-12);
        assert!((v.h_star - 0.2780719051126377).abs() < 1e-12);
        assert!((v.h_max_star - 0.6780719051126377).abs() < 1e-12);

        let v = optimal_values(&DensityMatrix::maximally_mixed(3));
        assert!((v.p_guess_star - 1.0).abs() < 1e-12);
        assert!(v.h_min_star.abs() < 1e-12 && v.h_star.abs() < 1e-12 && v.h_max_star.abs() < 1e-12);

        let pure = random_density(4, 1, 3).unwrap();
        let v = optimal_values(&pure);
        for h in [v.h_min_star, v.h_star, v.h_max_star] {
            assert!((h - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn conditional_h_examples() {
        let q = qubit_m_state(0.6).unwrap();
        assert!(conditional_h_basis(&q, &MeasurementBasis::eigenbasis(&q)).unwrap().abs() < 1e-12);
        assert!((conditional_h_basis(&q, &sigma_x_basis()).unwrap() - 0.2780719051126377).abs() < 1e-12);
        for seed in 0..10 {
            let rho = random_density(3 + seed as usize % 3, 3, seed).unwrap();
            let expected = (rho.dim() as f64).log2() - von_neumann_entropy(&rho);
            assert!((conditional_h_basis(&rho, &unbiased_basis(&rho)).unwrap() - expected).abs() < 1e-9);
        }
        assert!(conditional_h_basis(&q, &MeasurementBasis::computational(3)).is_err());
    }

    #[test]
    fn conditional_hmax_examples() {
        let q = qubit_m_state(0.6).unwrap();
        let r = conditional_hmax(&q, &sigma_x_basis()).unwrap();
        assert!((r.p_secr - 1.6).abs() < 1e-8);
        assert!((r.h_max - 0.6780719051126377).abs() < 1e-8);

        let r = conditional_hmax(&q, &MeasurementBasis::eigenbasis(&q)).unwrap();
        assert!((r.p_secr - 1.0).abs() < 1e-9);
        assert!(r.h_max.abs() < 1e-9);

        let rho = random_density(4, 4, 17).unwrap();
        let r = conditional_hmax(&rho, &unbiased_basis(&rho)).unwrap();
        assert!((r.p_secr - 4.0 * rho.lambda_max()).abs() < 1e-7);
    }

    #[test]
    fn psecr_iterates_are_monotone_and_bounded() {
        for seed in 0..20u64 {
            let d = 2 + seed as usize % 3;
            let rho = random_density(d, d, seed).unwrap();
            let m = MeasurementBasis::from_unitary(
                &crate::linalg::random::haar_unitary(d, &mut crate::linalg::random::seeded_rng(seed + 100)),
                1e-10,
            )
            .unwrap();
            let (r, trace) = conditional_hmax_traced(&rho, &m).unwrap();
            assert!(trace.windows(2).all(|w| w[1] >= w[0]));
            assert!(r.p_secr <= d as f64 * rho.lambda_max() + 1e-8);
            assert!(r.p_secr <= r.p_secr_upper + 1e-12);
        }
    }

    #[test]
    fn qubit_oracle_examples() {
        let q = qubit_m_state(0.6).unwrap();
        assert!((psecr_oracle_qubit(&q, &sigma_x_basis(), 0.02).unwrap() - 1.6).abs() < 2e-3);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((psecr_oracle_qubit(&mixed, &sigma_x_basis(), 0.02).unwrap() - 1.0).abs() < 2e-3);
        let pure = qubit_m_state(1.0).unwrap();
        assert!((psecr_oracle_qubit(&pure, &sigma_x_basis(), 0.02).unwrap() - 2.0).abs() < 2e-3);
    }

    #[test]
    fn coarse_graining_never_increases_h() {
        for seed in 0..10u64 {
            let rho = random_density(4, 4, seed).unwrap();
            let m = MeasurementBasis::from_unitary(
                &crate::linalg::random::haar_unitary(4, &mut crate::linalg::random::seeded_rng(seed)),
                1e-10,
            )
            .unwrap();
            let fine = conditional_h_basis(&rho, &m).unwrap();
            let coarse = coarse_grain(&m, &CoarseGraining::new(vec![0, 1, 0, 1]).unwrap()).unwrap();
            assert!(conditional_h(&rho, &coarse).unwrap() <= fine + 1e-9);
        }
    }
}
