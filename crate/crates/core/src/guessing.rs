//! Guessing probability of a fixed rank-one measurement, with primal witnesses and dual
//! certificates, plus ensemble-discrimination checks.
//!
//! For `M = {|m_i>}` the guessing probability is the geometric coherence
//! `max_U sum_i |<m_i| sqrt(rho) |u_i>|^2` over orthonormal bases `{|u_i>}`, attained by the
//! ensemble `rho_i = sqrt(rho) |u_i><u_i| sqrt(rho)`. The objective is convex in `U`, so the
//! linearise-and-maximise step `U <- polar(C)`, with columns `c_i = g_i <g_i|u_i>` and
//! `g_i = sqrt(rho)|m_i>`, never decreases it.
//!
//! Upper bounds come from the dual program `min tr(X rho)` subject to `X >= M_i` on the
//! support of `rho`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::random::{haar_unitary, seeded_rng};
use crate::linalg::{
    min_eigenvalue, pinv_sqrt_psd, polar_unitary, psd_eigen, support_projector, ComplexMatrix, C64,
};
use crate::measurements::{condition_residuals, CoarseGraining, ConditionTarget, MeasurementBasis};
use crate::states::DensityMatrix;

pub const DEFAULT_RESTARTS: usize = 32;

/// Largest dual gap for which a value is reported as exact.
pub const BRACKET_TOL: f64 = 1e-5;

/// Residual level below which the closed-form dual witness is used.
pub const CONDITION_TOL: f64 = 1e-8;

/// Feasibility slack allowed when checking `X >= M_i`.
pub const FEASIBILITY_TOL: f64 = 1e-9;

const MM_MAX_ITERATIONS: usize = 5_000;
const MM_STALL: f64 = 1e-15;
const FIDELITY_ITERATIONS: usize = 500;

/// Sub-normalised ensemble `{rho_i}` with `sum_i rho_i = rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub parts: Vec<ComplexMatrix>,
    pub weights: Vec<f64>,
}

impl Decomposition {
    pub fn new(parts: Vec<ComplexMatrix>) -> Self {
        let weights = parts.iter().map(|p| p.trace().re).collect();
        Self { parts, weights }
    }

    /// Pure parts `|v_i><v_i|`.
    pub fn from_vectors(vectors: &[Vec<C64>]) -> Self {
        Self::new(vectors.iter().map(|v| ComplexMatrix::projector(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.parts.first().map_or(0, ComplexMatrix::rows)
    }

    pub fn sum(&self) -> ComplexMatrix {
        let d = self.dim();
        self.parts
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, p| &acc + p)
    }

    /// `sum_i tr(M_i rho_i)`.
    pub fn success_probability(&self, ops: &[ComplexMatrix]) -> f64 {
        self.parts
            .iter()
            .zip(ops)
            .map(|(p, m)| m.trace_product_re(p))
            .sum()
    }

    /// Merges parts that share a coarse label.
    pub fn grouped(&self, f: &CoarseGraining) -> Result<Self> {
        f.check_domain(self.len())?;
        let d = self.dim();
        let mut parts = vec![ComplexMatrix::zeros(d, d); f.num_labels()];
        for (i, p) in self.parts.iter().enumerate() {
            let j = f.label(i);
            parts[j] = &parts[j] + p;
        }
        Ok(Self::new(parts))
    }
}

/// `lower <= P_guess <= upper`, with `witness_x` the dual-feasible operator behind `upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateBracket {
    pub lower: f64,
    pub upper: f64,
    pub witness_x: ComplexMatrix,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueStatus {
    /// Dual gap at most [`BRACKET_TOL`].
    Exact,
    /// Only the bracket is certified.
    Bracketed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessingResult {
    pub value: f64,
    pub status: ValueStatus,
    pub witness: Decomposition,
    pub bracket: CertificateBracket,
    /// Columns are the basis `{|u_i>}` of the witness `rho_i = sqrt(rho)|u_i><u_i|sqrt(rho)`.
    pub basis_used: ComplexMatrix,
    /// Best value of the fidelity form `max_s F(rho, sum_i s_i |m_i><m_i|)`.
    pub fidelity_value: f64,
    /// Index of the start that produced `value`: 0 = measurement basis, 1 = polar start,
    /// 2 = fidelity start, 3.. = random restarts.
    pub best_start: usize,
}

/// Smallest eigenvalues of `Y - rho_j` (`Y = sum_i rho_i Pi_i`, Hermitised) and of
/// `B_j = (tr sqrt(rho) / d) sqrt(rho) - sqrt(rho) Pi_j sqrt(rho)` for `rho = sum_i rho_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelstromWitness {
    pub min_eigenvalues: Vec<f64>,
    pub symmetric_min_eigenvalues: Vec<f64>,
}

impl HelstromWitness {
    /// Every `Y - rho_j` is PSD up to `tol`.
    pub fn certifies(&self, tol: f64) -> bool {
        self.min_eigenvalues.iter().all(|&l| l >= -tol)
    }

    /// Every `B_j` is PSD up to `tol`.
    pub fn certifies_symmetric(&self, tol: f64) -> bool {
        self.symmetric_min_eigenvalues.iter().all(|&l| l >= -tol)
    }
}

/// Outcome of checking a proposed dual operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    /// `min_i lambda_min(Pi (X - M_i) Pi)`.
    pub min_slack: f64,
    pub feasible: bool,
    /// `tr(X rho)`, a valid upper bound when `feasible`.
    pub upper: f64,
}

fn check_dims(rho: &DensityMatrix, m: &MeasurementBasis) -> Result<()> {
    if rho.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: m.dim(),
        });
    }
    Ok(())
}

/// `(tr sqrt(rho))^2 / d`.
pub fn pguess_optimal(rho: &DensityMatrix) -> f64 {
    let t = rho.trace_sqrt();
    (t * t / rho.dim() as f64).min(1.0)
}

/// Parts `sqrt(rho)|m_i><m_i|sqrt(rho)`.
pub fn eve_decomposition(rho: &DensityMatrix, m: &MeasurementBasis) -> Result<Decomposition> {
    check_dims(rho, m)?;
    let vectors: Vec<Vec<C64>> = m.vectors().iter().map(|v| rho.sqrt().mul_vec(v)).collect();
    Ok(Decomposition::from_vectors(&vectors))
}

/// `rho^{-1/2} rho_i rho^{-1/2}` on the support of `rho = sum_i rho_i`.
pub fn pretty_good_measurement(parts: &Decomposition) -> Result<Vec<ComplexMatrix>> {
    let rho = parts.sum().hermitian_part();
    let r = pinv_sqrt_psd(&rho)?;
    Ok(parts
        .parts
        .iter()
        .map(|p| (&(&r * p) * &r).hermitian_part())
        .collect())
}

pub fn helstrom_check(parts: &Decomposition, candidate: &[ComplexMatrix]) -> Result<HelstromWitness> {
    let d = parts.dim();
    if candidate.len() != parts.len() {
        return Err(Error::DimensionMismatch {
            expected: parts.len(),
            found: candidate.len(),
        });
    }
    if let Some(bad) = candidate.iter().find(|c| c.rows() != d || c.cols() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.rows(),
        });
    }
    let y = parts
        .parts
        .iter()
        .zip(candidate)
        .fold(ComplexMatrix::zeros(d, d), |acc, (p, c)| &acc + &(p * c))
        .hermitian_part();
    let min_eigenvalues = parts
        .parts
        .iter()
        .map(|p| min_eigenvalue(&(&y - p)))
        .collect::<Result<Vec<_>>>()?;

    let rho = parts.sum().hermitian_part();
    let sqrt_rho = psd_eigen(&rho)?.apply(f64::sqrt);
    let t = sqrt_rho.trace().re / d as f64;
    let symmetric_min_eigenvalues = candidate
        .iter()
        .map(|c| min_eigenvalue(&(&sqrt_rho.scale(t) - &(&(&sqrt_rho * c) * &sqrt_rho))))
        .collect::<Result<Vec<_>>>()?;
    Ok(HelstromWitness {
        min_eigenvalues,
        symmetric_min_eigenvalues,
    })
}

/// Checks `X >= M_i` on the support of `rho` and evaluates `tr(X rho)`.
pub fn verify_certificate(
    rho: &DensityMatrix,
    m: &MeasurementBasis,
    x: &ComplexMatrix,
) -> Result<CertificateCheck> {
    check_dims(rho, m)?;
    if x.rows() != rho.dim() || x.cols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: x.rows(),
        });
    }
    let pi = support_projector(rho.matrix())?;
    let min_slack = min_slack(&pi, m, x)?;
    Ok(CertificateCheck {
        min_slack,
        feasible: min_slack >= -FEASIBILITY_TOL,
        upper: x.trace_product_re(rho.matrix()),
    })
}

fn min_slack(pi: &ComplexMatrix, m: &MeasurementBasis, x: &ComplexMatrix) -> Result<f64> {
    let px = &(pi * &x.hermitian_part()) * pi;
    let mut worst = f64::INFINITY;
    for v in m.vectors() {
        let pv = pi.mul_vec(v);
        let slack = &px - &ComplexMatrix::projector(&pv);
        worst = worst.min(min_eigenvalue(&slack)?);
    }
    Ok(worst)
}

/// Value of the geometric-coherence objective `sum_i |<m_i|sqrt(rho)|u_i>|^2`.
pub fn coherence_objective(g: &ComplexMatrix, u: &ComplexMatrix) -> f64 {
    overlaps(g, u).iter().map(|z| z.norm_sqr()).sum()
}

/// Diagonal of `G^dagger U`.
fn overlaps(g: &ComplexMatrix, u: &ComplexMatrix) -> Vec<C64> {
    let d = g.rows();
    (0..g.cols())
        .map(|i| (0..d).map(|r| g[(r, i)].conj() * u[(r, i)]).sum())
        .collect()
}

/// Runs the ascent from `u`; returns the final basis, its value, and the value after each step.
fn mm_ascent(g: &ComplexMatrix, mut u: ComplexMatrix) -> Result<(ComplexMatrix, f64, Vec<f64>)> {
    let mut value = coherence_objective(g, &u);
    let mut trace = vec![value];
    for _ in 0..MM_MAX_ITERATIONS {
        let diag = overlaps(g, &u);
        let c = ComplexMatrix::from_fn(g.rows(), g.cols(), |r, i| g[(r, i)] * diag[i]);
        let next = polar_unitary(&c)?;
        let v = coherence_objective(g, &next);
        if v <= value {
            break;
        }
        let gain = v - value;
        u = next;
        value = v;
        trace.push(value);
        if gain <= MM_STALL * value.max(1.0) {
            break;
        }
    }
    Ok((u, value, trace))
}

/// Value trace of the ascent from a seeded Haar-random start.
pub fn mm_ascent_trace(rho: &DensityMatrix, m: &MeasurementBasis, seed: u64) -> Result<Vec<f64>> {
    check_dims(rho, m)?;
    let g = rho.sqrt() * &m.to_unitary();
    let u0 = haar_unitary(rho.dim(), &mut seeded_rng(seed));
    Ok(mm_ascent(&g, u0)?.2)
}

/// Alternating maximisation of `F(rho, sum_i s_i |m_i><m_i|)` over the simplex.
///
/// For fixed `s`, `sqrt F = max_W Re tr(W^dagger sqrt(rho) M diag(sqrt s))` is attained at
/// the polar factor `W`; for fixed `W` the optimal `s_i` is proportional to
/// `r_i^2`, `r_i = max(0, Re (W^dagger sqrt(rho) M)_ii)`. Returns the value and the last `W`,
/// which is also a good start for the ascent since its objective is at least `sum_i r_i^2`.
fn fidelity_cross_check(g: &ComplexMatrix) -> Result<(f64, ComplexMatrix)> {
    let d = g.cols();
    let mut s = vec![1.0 / d as f64; d];
    let mut best = 0.0f64;
    let mut w = ComplexMatrix::identity(d);
    for _ in 0..FIDELITY_ITERATIONS {
        let a = ComplexMatrix::from_fn(g.rows(), d, |r, i| g[(r, i)] * s[i].sqrt());
        w = polar_unitary(&a)?;
        let r: Vec<f64> = overlaps(&w, g).iter().map(|z| z.re.max(0.0)).collect();
        let norm_sq: f64 = r.iter().map(|x| x * x).sum();
        let value: f64 = r.iter().zip(&s).map(|(ri, si)| ri * si.sqrt()).sum::<f64>().powi(2);
        if norm_sq <= 0.0 {
            break;
        }
        let gain = value - best;
        best = best.max(value);
        s = r.iter().map(|x| x * x / norm_sq).collect();
        if gain.abs() <= 1e-15 {
            break;
        }
    }
    Ok((best.min(1.0), w))
}

struct Start {
    index: usize,
    basis: ComplexMatrix,
    value: f64,
}

fn best_start(starts: Vec<Start>) -> Start {
    starts
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one start")
}

fn ascend_from(g: &ComplexMatrix, starts: Vec<(usize, ComplexMatrix)>) -> Result<Start> {
    let results = starts
        .into_par_iter()
        .map(|(index, u0)| {
            mm_ascent(g, u0).map(|(basis, value, _)| Start {
                index,
                basis,
                value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    // collect preserves start order, so ties resolve to the lowest index
    Ok(best_start(results))
}

fn deterministic_starts(g: &ComplexMatrix, m: &MeasurementBasis, fid_w: ComplexMatrix) -> Result<Vec<(usize, ComplexMatrix)>> {
    Ok(vec![(0, m.to_unitary()), (1, polar_unitary(g)?), (2, fid_w)])
}

/// Guessing probability of a rank-one measurement with witness and dual bracket.
pub fn pguess_fixed(
    rho: &DensityMatrix,
    m: &MeasurementBasis,
    seed: u64,
    restarts: usize,
) -> Result<GuessingResult> {
    check_dims(rho, m)?;
    let d = rho.dim();
    let g = rho.sqrt() * &m.to_unitary();
    let (fidelity_value, fid_w) = fidelity_cross_check(&g)?;
    let mut starts = deterministic_starts(&g, m, fid_w)?;
    let mut rng = seeded_rng(seed);
    for r in 0..restarts {
        starts.push((3 + r, haar_unitary(d, &mut rng)));
    }
    let best = ascend_from(&g, starts)?;
    finish(rho, m, &g, best, fidelity_value)
}

fn finish(
    rho: &DensityMatrix,
    m: &MeasurementBasis,
    g: &ComplexMatrix,
    best: Start,
    fidelity_value: f64,
) -> Result<GuessingResult> {
    let vectors: Vec<Vec<C64>> = best.basis.columns().iter().map(|u| rho.sqrt().mul_vec(u)).collect();
    let witness = Decomposition::from_vectors(&vectors);
    let value = witness.success_probability(&m.projectors());
    let bracket = certificate_for_basis(rho, m, g, &best.basis, value)?;
    let status = if bracket.gap <= BRACKET_TOL {
        ValueStatus::Exact
    } else {
        ValueStatus::Bracketed
    };
    Ok(GuessingResult {
        value,
        status,
        witness,
        bracket,
        basis_used: best.basis,
        fidelity_value,
        best_start: best.index,
    })
}

/// Bracket from the deterministic starts only (no random restarts).
pub fn dual_certificate(rho: &DensityMatrix, m: &MeasurementBasis) -> Result<CertificateBracket> {
    check_dims(rho, m)?;
    let g = rho.sqrt() * &m.to_unitary();
    let (_, fid_w) = fidelity_cross_check(&g)?;
    let best = ascend_from(&g, deterministic_starts(&g, m, fid_w)?)?;
    let vectors: Vec<Vec<C64>> = best.basis.columns().iter().map(|u| rho.sqrt().mul_vec(u)).collect();
    let lower = Decomposition::from_vectors(&vectors).success_probability(&m.projectors());
    certificate_for_basis(rho, m, &g, &best.basis, lower)
}

/// Smallest feasible upper bound among the closed-form witness (when the symmetric
/// condition holds), the complementary-slackness witness built from `u`, and `X = Pi`.
fn certificate_for_basis(
    rho: &DensityMatrix,
    m: &MeasurementBasis,
    g: &ComplexMatrix,
    u: &ComplexMatrix,
    lower: f64,
) -> Result<CertificateBracket> {
    let pi = support_projector(rho.matrix())?;
    let r = pinv_sqrt_psd(rho.matrix())?;
    let mut candidates: Vec<ComplexMatrix> = vec![pi.clone()];

    let residuals = condition_residuals(rho, m)?;
    if residuals.max_abs(ConditionTarget::Hmin) < CONDITION_TOL {
        candidates.push(r.scale(rho.trace_sqrt() / rho.dim() as f64));
    }

    // X sqrt(rho) U = M D with D = diag(<m_i|sqrt(rho)|u_i>)
    let diag = overlaps(g, u);
    let md = ComplexMatrix::from_fn(m.dim(), m.dim(), |row, i| m.vector(i)[row] * diag[i]);
    let x = (&(&md * &u.adjoint()) * &r).hermitian_part();
    let x = (&(&pi * &x) * &pi).hermitian_part();
    let shift = (-min_slack(&pi, m, &x)?).max(0.0);
    candidates.push(&x + &pi.scale(shift));

    let mut best: Option<(f64, ComplexMatrix)> = None;
    for x in candidates {
        let slack = min_slack(&pi, m, &x)?;
        if slack < -FEASIBILITY_TOL {
            continue;
        }
        let upper = x.trace_product_re(rho.matrix());
        if best.as_ref().is_none_or(|(b, _)| upper < *b) {
            best = Some((upper, x));
        }
    }
    let (upper, witness_x) = best.expect("X = Pi is always feasible");
    let upper = upper.max(lower);
    Ok(CertificateBracket {
        lower,
        upper,
        witness_x,
        gap: upper - lower,
    })
}

/// Lower bound on the guessing probability of the coarse-grained measurement, obtained by
/// grouping the witness ensemble of the fine measurement.
pub fn pguess_coarse_lower(
    rho: &DensityMatrix,
    fine: &MeasurementBasis,
    f: &CoarseGraining,
) -> Result<f64> {
    f.check_domain(fine.dim())?;
    let result = pguess_fixed(rho, fine, 0, DEFAULT_RESTARTS)?;
    pguess_coarse_lower_from(&result, fine, f)
}

/// Same as [`pguess_coarse_lower`] starting from an existing fine result.
pub fn pguess_coarse_lower_from(
    fine_result: &GuessingResult,
    fine: &MeasurementBasis,
    f: &CoarseGraining,
) -> Result<f64> {
    let coarse_ops = crate::measurements::coarse_grain(fine, f)?;
    let grouped = fine_result.witness.grouped(f)?;
    Ok(grouped.success_probability(&coarse_ops))
}

/// Reference value by direct search, sharing no code with the ascent: a grid over qubit bases
/// refined by pattern search for `d = 2`, and Givens-rotation hill climbing from random
/// unitaries for larger `d`.
pub fn bruteforce_pguess(
    rho: &DensityMatrix,
    m: &MeasurementBasis,
    seed: u64,
    restarts: usize,
    grid: usize,
) -> Result<f64> {
    check_dims(rho, m)?;
    let g = rho.sqrt() * &m.to_unitary();
    let objective = |u: &ComplexMatrix| -> f64 {
        let d = g.rows();
        (0..d)
            .map(|i| (0..d).map(|r| g[(r, i)].conj() * u[(r, i)]).sum::<C64>().norm_sqr())
            .sum()
    };
    if rho.dim() == 2 {
        let basis = |t: f64, p: f64| {
            let (s, c) = t.sin_cos();
            let e = C64::from_polar(1.0, p);
            ComplexMatrix::from_fn(2, 2, |r, col| match (r, col) {
                (0, 0) => C64::new(c, 0.0),
                (1, 0) => e * s,
                (0, 1) => -e.conj() * s,
                _ => C64::new(c, 0.0),
            })
        };
        let grid = grid.max(8);
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..=grid {
            let t = std::f64::consts::FRAC_PI_2 * i as f64 / grid as f64;
            for j in 0..2 * grid {
                let p = std::f64::consts::PI * j as f64 / grid as f64;
                let v = objective(&basis(t, p));
                if v > best.0 {
                    best = (v, t, p);
                }
            }
        }
        let mut step = std::f64::consts::PI / grid as f64;
        while step > 1e-12 {
            let mut improved = false;
            for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let v = objective(&basis(best.1 + dt, best.2 + dp));
                if v > best.0 {
                    best = (v, best.1 + dt, best.2 + dp);
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        return Ok(best.0);
    }

    let d = rho.dim();
    let mut rng = seeded_rng(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..restarts.max(1) {
        let mut u = haar_unitary(d, &mut rng);
        let mut value = objective(&u);
        let mut step = 0.5;
        while step > 1e-10 {
            let mut improved = false;
            for j in 0..d {
                for k in j + 1..d {
                    for phase in [0.0, std::f64::consts::FRAC_PI_2] {
                        for sign in [1.0, -1.0] {
                            let trial = givens(&u, j, k, sign * step, phase);
                            let v = objective(&trial);
                            if v > value {
                                u = trial;
                                value = v;
                                improved = true;
                            }
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.max(value);
    }
    Ok(best)
}

/// Rotates columns `j, k` of `u` by angle `theta` with relative phase `phase`.
fn givens(u: &ComplexMatrix, j: usize, k: usize, theta: f64, phase: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let e = C64::from_polar(s, phase);
    let mut out = u.clone();
    for r in 0..u.rows() {
        let a = u[(r, j)];
        let b = u[(r, k)];
        out[(r, j)] = a * c + b * e;
        out[(r, k)] = -a * e.conj() + b * c;
    }
    out
}
