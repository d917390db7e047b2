//! Product-basis search for two-qubit states, and the enumeration showing that one
//! entangled basis admits no unbiased product basis.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, C64};
use crate::measurements::{product_basis, ConditionEvaluator, ConditionTarget, MeasurementBasis, ProductMode};
use crate::states::{two_qubit_basis, DensityMatrix};

pub const DEFAULT_SEARCH_TOL: f64 = 1e-10;
pub const DEFAULT_SEARCH_RESTARTS: usize = 200;

/// Initial simplex edge, in radians.
pub const SIMPLEX_SCALE: f64 = 0.3;

/// Refinement keeps going below the success tolerance down to this objective value.
const POLISH_TARGET: f64 = 1e-26;

/// Restarts evaluated concurrently; the first success in index order wins.
const BATCH: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub basis: MeasurementBasis,
    pub angles: Vec<f64>,
    /// Sum of squared deviations from the target condition.
    pub residual: f64,
    pub target: ConditionTarget,
    pub mode: ProductMode,
    pub restarts_used: usize,
    pub seed: u64,
    pub success: bool,
}

/// Options for the derivative-free minimiser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub scale: f64,
    pub target: f64,
    pub max_evaluations: usize,
    /// Fresh simplices built around the incumbent after stagnation, with shrinking edges.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            scale: SIMPLEX_SCALE,
            target: POLISH_TARGET,
            max_evaluations: 20_000,
            restarts: 4,
        }
    }
}

/// Minimises `f` from `x0`; returns the best point and value.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], opts: NelderMeadOptions) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut best = (x0.to_vec(), f(x0));
    let mut scale = opts.scale;
    for _ in 0..=opts.restarts {
        if best.1 <= opts.target {
            break;
        }
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push(best.clone());
        for i in 0..n {
            let mut x = best.0.clone();
            x[i] += scale;
            let v = f(&x);
            simplex.push((x, v));
        }
        let mut evaluations = n + 1;
        while evaluations < opts.max_evaluations {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[0].1 <= opts.target {
                break;
            }
            let spread = simplex[n].1 - simplex[0].1;
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if diameter < 1e-13 || spread <= 1e-16 * simplex[0].1.abs() {
                break;
            }
            let centroid: Vec<f64> = (0..n)
                .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let reflected = along(1.0);
            let fr = f(&reflected);
            evaluations += 1;
            if fr < simplex[0].1 {
                let expanded = along(2.0);
                let fe = f(&expanded);
                evaluations += 1;
                simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
            } else {
                let (contracted, fc) = if fr < simplex[n].1 {
                    let x = along(0.5);
                    let v = f(&x);
                    (x, v)
                } else {
                    let x = along(-0.5);
                    let v = f(&x);
                    (x, v)
                };
                evaluations += 1;
                if fc < simplex[n].1.min(fr) {
                    simplex[n] = (contracted, fc);
                } else {
                    let anchor = simplex[0].0.clone();
                    for (x, v) in simplex[1..].iter_mut() {
                        for (xi, ai) in x.iter_mut().zip(&anchor) {
                            *xi = ai + 0.5 * (*xi - ai);
                        }
                        *v = f(x);
                    }
                    evaluations += n;
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best.1 {
            best = simplex.swap_remove(0);
        }
        scale *= 0.3;
    }
    best
}

/// Best product basis found for `target`, successful or not.
pub fn search_product_basis(
    rho: &DensityMatrix,
    target: ConditionTarget,
    mode: ProductMode,
    seed: u64,
    restarts: usize,
    tol: f64,
) -> Result<SearchResult> {
    if rho.dim() != 4 {
        return Err(Error::NotFourDim { dim: rho.dim() });
    }
    let evaluator = ConditionEvaluator::new(rho);
    let objective = |angles: &[f64]| -> f64 {
        match product_basis(angles, mode) {
            Ok(b) => evaluator.objective(target, b.vectors()),
            Err(_) => f64::INFINITY,
        }
    };
    let run = |r: usize| -> (Vec<f64>, f64) {
        let x0 = start_point(seed, r, mode);
        nelder_mead(objective, &x0, NelderMeadOptions::default())
    };

    let restarts = restarts.max(1);
    let mut best: Option<(usize, Vec<f64>, f64)> = None;
    let mut used = 0;
    let mut found = false;
    for batch_start in (0..restarts).step_by(BATCH) {
        let batch_end = (batch_start + BATCH).min(restarts);
        let results: Vec<(usize, Vec<f64>, f64)> = (batch_start..batch_end)
            .into_par_iter()
            .map(|r| {
                let (x, v) = run(r);
                (r, x, v)
            })
            .collect();
        for (r, x, v) in results {
            used = r + 1;
            if best.as_ref().is_none_or(|b| v < b.2) {
                best = Some((r, x, v));
            }
            if v <= tol {
                found = true;
                break;
            }
        }
        if found {
            break;
        }
    }
    let (_, angles, _) = best.expect("at least one restart");
    let basis = product_basis(&angles, mode)?;
    let residual = evaluator.objective(target, basis.vectors());
    Ok(SearchResult {
        basis,
        angles,
        residual,
        target,
        mode,
        restarts_used: used,
        seed,
        success: residual <= tol,
    })
}

/// Like [`search_product_basis`] but fails with `NoSuccess` when no restart reaches `tol`.
pub fn find_product_basis(
    rho: &DensityMatrix,
    target: ConditionTarget,
    mode: ProductMode,
    seed: u64,
    restarts: usize,
    tol: f64,
) -> Result<SearchResult> {
    let r = search_product_basis(rho, target, mode, seed, restarts, tol)?;
    if r.success {
        Ok(r)
    } else {
        Err(Error::NoSuccess {
            best_residual: r.residual,
        })
    }
}

/// Restart 0 starts at the computational basis, later ones at uniform random angles.
fn start_point(seed: u64, restart: usize, mode: ProductMode) -> Vec<f64> {
    let n = mode.parameter_count();
    if restart == 0 {
        return vec![0.0; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    (0..n)
        .map(|k| {
            if k % 2 == 0 {
                rng.random_range(0.0..PI)
            } else {
                rng.random_range(0.0..2.0 * PI)
            }
        })
        .collect()
}

/// One candidate `(x, y)` of the enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidatePair {
    pub x: f64,
    pub y: f64,
    /// `|<psi_3|aA>|^2`
    pub overlap: f64,
    /// `|overlap - 1/4|`
    pub deviation: f64,
    /// `cos x + cos y + cos(x - y)`
    pub trig_sum: f64,
    /// `cos x - cos y - cos(x - y)`
    pub trig_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoUnbiasedProductReport {
    pub pairs: Vec<CandidatePair>,
    /// Largest violation of the two trigonometric equations over all pairs.
    pub max_trig_violation: f64,
    /// Smallest deviation of `|<psi_3|aA>|^2` from 1/4 over all pairs.
    pub min_deviation: f64,
}

/// Evaluates the four phase pairs left by unbiasedness to `|00>` and `|psi_2>`, with
/// `|a> = (|0> + e^{ix}|1>)/sqrt 2`, `|A> = (|0> + e^{iy}|1>)/sqrt 2`.
pub fn verify_no_unbiased_product_basis() -> NoUnbiasedProductReport {
    let psi3 = two_qubit_basis()[2].clone();
    let s = 0.5f64.sqrt();
    let qubit = |phase: f64| [C64::new(s, 0.0), C64::from_polar(s, phase)];
    let candidates = [
        (PI / 2.0, 3.0 * PI / 4.0),
        (PI / 2.0, 7.0 * PI / 4.0),
        (3.0 * PI / 2.0, PI / 4.0),
        (3.0 * PI / 2.0, 5.0 * PI / 4.0),
    ];
    let pairs: Vec<CandidatePair> = candidates
        .iter()
        .map(|&(x, y)| {
            let a = qubit(x);
            let big_a = qubit(y);
            let v = [a[0] * big_a[0], a[0] * big_a[1], a[1] * big_a[0], a[1] * big_a[1]];
            let overlap = inner(&psi3, &v).norm_sqr();
            CandidatePair {
                x,
                y,
                overlap,
                deviation: (overlap - 0.25).abs(),
                trig_sum: x.cos() + y.cos() + (x - y).cos(),
                trig_difference: x.cos() - y.cos() - (x - y).cos(),
            }
        })
        .collect();
    let max_trig_violation = pairs
        .iter()
        .map(|p| p.trig_sum.abs().max(p.trig_difference.abs()))
        .fold(0.0, f64::max);
    let min_deviation = pairs.iter().map(|p| p.deviation).fold(f64::INFINITY, f64::min);
    NoUnbiasedProductReport {
        pairs,
        max_trig_violation,
        min_deviation,
    }
}
