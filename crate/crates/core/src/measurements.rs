//! Rank-one projective measurements and the optimality conditions they can satisfy.
//!
//! For a state with eigenpairs `(lambda_k, |u_k>)` and a basis `{|m_i>}` three conditions
//! are tracked:
//!
//! * min-entropy: `<m_i| sqrt(rho) |m_i> = tr sqrt(rho) / d`,
//! * von Neumann: `<m_i| rho |m_i> = 1 / d`,
//! * max-entropy: `|<m_i|u_max>|^2 = 1 / d`, or with a degenerate top eigenvalue
//!   `sum_j g_j |<m_i|u_max^(j)>|^2 = 1 / d` for some probability vector `g`.
//!
//! Any basis unbiased to the eigenbasis satisfies all three.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{fix_phase, inner, ComplexMatrix, C64, ONE, ZERO};
use crate::states::DensityMatrix;

/// Default tolerance for orthonormality checks.
pub const BASIS_TOL: f64 = 1e-10;

/// Eigenvalue gap below which the top eigenvalue is treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-9;

/// Residual level at which the degenerate max-entropy fit is declared feasible.
pub const HMAX_FEASIBILITY_TOL: f64 = 1e-8;

/// An orthonormal basis `{|m_i>}` of C^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    dim: usize,
    vectors: Vec<Vec<C64>>,
}

impl MeasurementBasis {
    pub fn from_vectors(vectors: Vec<Vec<C64>>, tol: f64) -> Result<Self> {
        let count = vectors.len();
        let dim = vectors.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::NotComplete("no vectors".into()));
        }
        if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        if vectors
            .iter()
            .flatten()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let mut deviation: f64 = 0.0;
        for i in 0..count {
            for j in i..count {
                let target = if i == j { ONE } else { ZERO };
                deviation = deviation.max((inner(&vectors[i], &vectors[j]) - target).norm());
            }
        }
        if deviation > tol {
            return Err(Error::NotOrthonormal { deviation });
        }
        if count != dim {
            return Err(Error::NotComplete(format!(
                "{count} orthonormal vectors in dimension {dim}"
            )));
        }
        let basis = Self { dim, vectors };
        let completeness = basis
            .projectors()
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, p| &acc + p)
            .max_abs_diff(&ComplexMatrix::identity(dim));
        if completeness > 1e-9 {
            return Err(Error::NotComplete(format!(
                "sum of projectors deviates from identity by {completeness:.3e}"
            )));
        }
        Ok(basis)
    }

    /// Basis made of the columns of a unitary matrix.
    pub fn from_unitary(u: &ComplexMatrix, tol: f64) -> Result<Self> {
        Self::from_vectors(u.columns(), tol)
    }

    /// Recovers the basis from rank-one projectors `|m_i><m_i|`.
    pub fn from_projectors(ops: &[ComplexMatrix], tol: f64) -> Result<Self> {
        let mut vectors = Vec::with_capacity(ops.len());
        for (index, op) in ops.iter().enumerate() {
            op.ensure_square()?;
            let e = crate::linalg::hermitian_eigen(op)?;
            let n = e.dim();
            let top = e.values[n - 1];
            let rest = e.values[..n - 1].iter().fold(0.0f64, |a, l| a.max(l.abs()));
            if (top - 1.0).abs() > tol.max(1e-9) || rest > tol.max(1e-9) {
                return Err(Error::NotRankOne { index });
            }
            vectors.push(e.vector(n - 1));
        }
        Self::from_vectors(vectors, tol)
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            dim,
            vectors: (0..dim).map(|k| crate::linalg::basis_vector(dim, k)).collect(),
        }
    }

    /// Eigenbasis of `rho`, ordered by decreasing eigenvalue.
    pub fn eigenbasis(rho: &DensityMatrix) -> Self {
        Self {
            dim: rho.dim(),
            vectors: rho.eigenbasis_descending().1,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[C64] {
        &self.vectors[i]
    }

    /// Matrix with the basis vectors as columns.
    pub fn to_unitary(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.vectors)
    }

    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        self.vectors.iter().map(|v| ComplexMatrix::projector(v)).collect()
    }

    /// Outcome distribution `<m_i|rho|m_i>`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Vec<f64> {
        self.vectors
            .iter()
            .map(|m| rho.matrix().sandwich(m, m).re)
            .collect()
    }

    /// max over i, k of `| |<m_i|u_k>|^2 - 1/d |` against the eigenbasis of `rho`.
    pub fn unbiasedness_residual(&self, rho: &DensityMatrix) -> f64 {
        let target = 1.0 / self.dim as f64;
        let e = rho.eigen();
        let mut worst: f64 = 0.0;
        for m in &self.vectors {
            for k in 0..self.dim {
                worst = worst.max((inner(m, &e.vector(k)).norm_sqr() - target).abs());
            }
        }
        worst
    }
}

/// Basis unbiased to the eigenbasis of `rho`: `|m_j> = sum_k exp(2 pi i jk/d) |u_k> / sqrt(d)`.
pub fn unbiased_basis(rho: &DensityMatrix) -> MeasurementBasis {
    let d = rho.dim();
    let e = rho.eigen();
    let scale = 1.0 / (d as f64).sqrt();
    let vectors = (0..d)
        .map(|j| {
            let mut m = vec![ZERO; d];
            for k in 0..d {
                let w = C64::from_polar(scale, 2.0 * PI * ((j * k) % d) as f64 / d as f64);
                for (r, z) in m.iter_mut().enumerate() {
                    *z += w * e.vectors[(r, k)];
                }
            }
            m
        })
        .collect();
    MeasurementBasis { dim: d, vectors }
}

/// Parameters of the three-outcome family whose moduli are set by `gamma` and `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QutritFamilyParams {
    pub gamma: [f64; 3],
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl QutritFamilyParams {
    /// Closed window of admissible k; `None` when `gamma_1 = gamma_3` (every k works).
    pub fn k_window(gamma: [f64; 3]) -> Option<(f64, f64)> {
        let spread = gamma[0] - gamma[2];
        if spread <= 0.0 {
            None
        } else {
            Some((-0.5 / spread, 0.5 / spread))
        }
    }

    pub fn new(gamma: [f64; 3], k: f64) -> Result<Self> {
        if !(gamma[0] >= gamma[1] && gamma[1] >= gamma[2] && gamma[2] >= 0.0) {
            return Err(Error::InvalidWeights(format!(
                "gamma must satisfy g1 >= g2 >= g3 >= 0, got {gamma:?}"
            )));
        }
        if !k.is_finite() {
            return Err(Error::NonFinite);
        }
        const EDGE: f64 = 1e-12;
        if let Some((lo, hi)) = Self::k_window(gamma) {
            if k < lo * (1.0 + EDGE) || k > hi * (1.0 + EDGE) {
                return Err(Error::InfeasibleK {
                    k,
                    reason: format!("outside the window [{lo}, {hi}]"),
                });
            }
        }
        let a = -(gamma[1] - gamma[2]) * k;
        let b = (gamma[0] - gamma[2]) * k;
        let c = -(gamma[0] - gamma[1]) * k;
        // squared moduli of the components of |m_1> and |m_2>
        let p = [(1.0 + a) / 3.0, (1.0 + b) / 3.0, (1.0 + c) / 3.0];
        if p.iter().any(|&x| x < -EDGE) {
            return Err(Error::InfeasibleK {
                k,
                reason: "1 + a, 1 + b, 1 + c must be non-negative".into(),
            });
        }
        let p = p.map(|x| x.max(0.0));
        // p0 e^{i t1} + p1 + p2 e^{i t2} = 0 closes a triangle with sides p0, p1, p2.
        let slack = EDGE * (p[0] + p[1] + p[2]);
        if p[0] > p[1] + p[2] + slack || p[1] > p[0] + p[2] + slack || p[2] > p[0] + p[1] + slack {
            return Err(Error::InfeasibleK {
                k,
                reason: "the orthogonality triangle |b - a| <= 1 + c <= 2 + a + b fails".into(),
            });
        }
        let (theta1, theta2) = close_triangle(p);
        Ok(Self {
            gamma,
            k,
            a,
            b,
            c,
            theta1,
            theta2,
        })
    }

    /// Component amplitudes of the three vectors in the ordered eigenbasis.
    pub fn amplitudes(&self) -> [[C64; 3]; 3] {
        let s = [
            ((1.0 + self.a) / 3.0).max(0.0).sqrt(),
            ((1.0 + self.b) / 3.0).max(0.0).sqrt(),
            ((1.0 + self.c) / 3.0).max(0.0).sqrt(),
        ];
        let m1 = [C64::new(s[0], 0.0), C64::new(s[1], 0.0), C64::new(s[2], 0.0)];
        let m2 = [
            C64::from_polar(s[0], self.theta1),
            C64::new(s[1], 0.0),
            C64::from_polar(s[2], self.theta2),
        ];
        // conj(m1 x m2) is orthogonal to both and has unit norm.
        let mut m3 = vec![
            (m1[1] * m2[2] - m1[2] * m2[1]).conj(),
            (m1[2] * m2[0] - m1[0] * m2[2]).conj(),
            (m1[0] * m2[1] - m1[1] * m2[0]).conj(),
        ];
        let n = crate::linalg::norm(&m3);
        m3.iter_mut().for_each(|z| *z /= n);
        fix_phase(&mut m3, 1e-12);
        [m1, m2, [m3[0], m3[1], m3[2]]]
    }
}

/// Angles with `p0 e^{i t1} + p1 + p2 e^{i t2} = 0`, choosing `t1` in `[0, pi]`.
fn close_triangle(p: [f64; 3]) -> (f64, f64) {
    let [p0, p1, p2] = p;
    if p0 == 0.0 {
        return (0.0, PI);
    }
    if p1 == 0.0 {
        return (0.0, PI);
    }
    if p2 == 0.0 {
        return (PI, 0.0);
    }
    let cos1 = ((p2 * p2 - p0 * p0 - p1 * p1) / (2.0 * p0 * p1)).clamp(-1.0, 1.0);
    let theta1 = cos1.acos();
    let closing = -(C64::from_polar(p0, theta1) + p1) / p2;
    (theta1, closing.arg())
}

/// The three-outcome family expressed in `eigenbasis` (ordered by decreasing eigenvalue).
pub fn qutrit_family(gamma: [f64; 3], k: f64, eigenbasis: &MeasurementBasis) -> Result<MeasurementBasis> {
    if eigenbasis.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: eigenbasis.dim(),
        });
    }
    let params = QutritFamilyParams::new(gamma, k)?;
    let vectors = params
        .amplitudes()
        .iter()
        .map(|amps| {
            let mut v = vec![ZERO; 3];
            for (coef, u) in amps.iter().zip(eigenbasis.vectors()) {
                for (z, ui) in v.iter_mut().zip(u) {
                    *z += coef * ui;
                }
            }
            v
        })
        .collect();
    MeasurementBasis::from_vectors(vectors, 1e-9)
}

/// Shape of a two-qubit product basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductMode {
    /// `{|a,b>, |a,b_perp>, |a_perp,c>, |a_perp,c_perp>}`, six angles.
    General,
    /// `{|a,b>, |a,b_perp>, |a_perp,b>, |a_perp,b_perp>}`, four angles.
    Restricted,
}

impl ProductMode {
    pub fn parameter_count(self) -> usize {
        match self {
            ProductMode::General => 6,
            ProductMode::Restricted => 4,
        }
    }
}

impl std::str::FromStr for ProductMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "general" => Ok(ProductMode::General),
            "restricted" => Ok(ProductMode::Restricted),
            other => Err(format!("unknown product mode '{other}'")),
        }
    }
}

/// cos(t/2)|0> + e^{i p} sin(t/2)|1>
pub fn bloch_state(theta: f64, phi: f64) -> [C64; 2] {
    [
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// -e^{-i p} sin(t/2)|0> + cos(t/2)|1>, orthogonal to [`bloch_state`].
pub fn bloch_state_perp(theta: f64, phi: f64) -> [C64; 2] {
    [
        -C64::from_polar((theta / 2.0).sin(), -phi),
        C64::new((theta / 2.0).cos(), 0.0),
    ]
}

fn kron2(x: [C64; 2], y: [C64; 2]) -> Vec<C64> {
    vec![x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]]
}

/// Product basis from Bloch angles `(theta, phi)` per factor: `a, b, c` in general mode,
/// `a, b` in restricted mode.
pub fn product_basis(angles: &[f64], mode: ProductMode) -> Result<MeasurementBasis> {
    if angles.len() != mode.parameter_count() {
        return Err(Error::ParameterCount {
            expected: mode.parameter_count(),
            found: angles.len(),
        });
    }
    let a = bloch_state(angles[0], angles[1]);
    let a_perp = bloch_state_perp(angles[0], angles[1]);
    let b = bloch_state(angles[2], angles[3]);
    let b_perp = bloch_state_perp(angles[2], angles[3]);
    let (c, c_perp) = match mode {
        ProductMode::General => (
            bloch_state(angles[4], angles[5]),
            bloch_state_perp(angles[4], angles[5]),
        ),
        ProductMode::Restricted => (b, b_perp),
    };
    Ok(MeasurementBasis {
        dim: 4,
        vectors: vec![kron2(a, b), kron2(a, b_perp), kron2(a_perp, c), kron2(a_perp, c_perp)],
    })
}

/// Deterministic relabelling of outcomes, `outcome_map[i]` = coarse label of fine outcome `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseGraining {
    outcome_map: Vec<usize>,
    labels: usize,
}

impl CoarseGraining {
    /// Labels must be exactly `0..L` with every label used.
    pub fn new(outcome_map: Vec<usize>) -> Result<Self> {
        if outcome_map.is_empty() {
            return Err(Error::BadMap("empty map".into()));
        }
        let labels = outcome_map.iter().max().unwrap() + 1;
        let mut seen = vec![false; labels];
        for &l in &outcome_map {
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::BadMap(format!("label {missing} has no preimage")));
        }
        Ok(Self {
            outcome_map,
            labels,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            outcome_map: (0..d).collect(),
            labels: d,
        }
    }

    pub fn outcome_map(&self) -> &[usize] {
        &self.outcome_map
    }

    pub fn num_labels(&self) -> usize {
        self.labels
    }

    pub fn label(&self, fine: usize) -> usize {
        self.outcome_map[fine]
    }

    pub(crate) fn check_domain(&self, d: usize) -> Result<()> {
        if self.outcome_map.len() != d {
            return Err(Error::BadMap(format!(
                "map covers {} outcomes, measurement has {d}",
                self.outcome_map.len()
            )));
        }
        Ok(())
    }
}

/// `M_j = sum_{i : f(i) = j} |m_i><m_i|`
pub fn coarse_grain(m: &MeasurementBasis, f: &CoarseGraining) -> Result<Vec<ComplexMatrix>> {
    f.check_domain(m.dim())?;
    let d = m.dim();
    let mut out = vec![ComplexMatrix::zeros(d, d); f.num_labels()];
    for (i, p) in m.projectors().into_iter().enumerate() {
        let j = f.label(i);
        out[j] = &out[j] + &p;
    }
    Ok(out)
}

/// Which optimality condition a residual refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionTarget {
    Hmin,
    H,
    Hmax,
}

impl std::str::FromStr for ConditionTarget {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "hmin" => Ok(ConditionTarget::Hmin),
            "h" => Ok(ConditionTarget::H),
            "hmax" => Ok(ConditionTarget::Hmax),
            other => Err(format!("unknown target '{other}'")),
        }
    }
}

impl std::fmt::Display for ConditionTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConditionTarget::Hmin => "hmin",
            ConditionTarget::H => "h",
            ConditionTarget::Hmax => "hmax",
        })
    }
}

/// Deviations of a basis from each optimality condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResiduals {
    /// `tr sqrt(rho)/d - <m_i|sqrt(rho)|m_i>`
    pub hmin_residuals: Vec<f64>,
    /// `1/d - <m_i|rho|m_i>`
    pub h_residuals: Vec<f64>,
    /// `1/d - sum_j g_j |<m_i|u_max^(j)>|^2`, with `g = [1]` when the top eigenvalue is simple.
    pub hmax_residuals: Vec<f64>,
    pub hmax_degenerate: bool,
    pub hmax_weights: Vec<f64>,
    pub hmax_feasible: bool,
}

impl ConditionResiduals {
    pub fn max_abs(&self, target: ConditionTarget) -> f64 {
        let v = match target {
            ConditionTarget::Hmin => &self.hmin_residuals,
            ConditionTarget::H => &self.h_residuals,
            ConditionTarget::Hmax => &self.hmax_residuals,
        };
        v.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn sum_sq(&self, target: ConditionTarget) -> f64 {
        let v = match target {
            ConditionTarget::Hmin => &self.hmin_residuals,
            ConditionTarget::H => &self.h_residuals,
            ConditionTarget::Hmax => &self.hmax_residuals,
        };
        v.iter().map(|x| x * x).sum()
    }
}

/// Precomputed state data for evaluating condition residuals of many bases.
#[derive(Debug, Clone)]
pub struct ConditionEvaluator {
    dim: usize,
    rho: ComplexMatrix,
    sqrt_rho: ComplexMatrix,
    trace_sqrt: f64,
    top_vectors: Vec<Vec<C64>>,
}

impl ConditionEvaluator {
    pub fn new(rho: &DensityMatrix) -> Self {
        let (values, vectors) = rho.eigenbasis_descending();
        let top = values[0];
        let top_vectors = values
            .iter()
            .zip(vectors)
            .take_while(|(l, _)| top - **l < DEGENERACY_GAP)
            .map(|(_, v)| v)
            .collect();
        Self {
            dim: rho.dim(),
            rho: rho.matrix().clone(),
            sqrt_rho: rho.sqrt().clone(),
            trace_sqrt: rho.trace_sqrt(),
            top_vectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_top_degenerate(&self) -> bool {
        self.top_vectors.len() > 1
    }

    pub fn hmin(&self, vectors: &[Vec<C64>]) -> Vec<f64> {
        let t = self.trace_sqrt / self.dim as f64;
        vectors
            .iter()
            .map(|m| t - self.sqrt_rho.sandwich(m, m).re)
            .collect()
    }

    pub fn h(&self, vectors: &[Vec<C64>]) -> Vec<f64> {
        let t = 1.0 / self.dim as f64;
        vectors.iter().map(|m| t - self.rho.sandwich(m, m).re).collect()
    }

    /// Residuals and fitted weights for the max-entropy condition.
    pub fn hmax(&self, vectors: &[Vec<C64>]) -> (Vec<f64>, Vec<f64>) {
        let t = 1.0 / self.dim as f64;
        let overlaps: Vec<Vec<f64>> = vectors
            .iter()
            .map(|m| self.top_vectors.iter().map(|u| inner(m, u).norm_sqr()).collect())
            .collect();
        let weights = if self.top_vectors.len() == 1 {
            vec![1.0]
        } else {
            simplex_least_squares(&overlaps, t)
        };
        let residuals = overlaps
            .iter()
            .map(|row| t - row.iter().zip(&weights).map(|(o, g)| o * g).sum::<f64>())
            .collect();
        (residuals, weights)
    }

    pub fn residuals(&self, target: ConditionTarget, vectors: &[Vec<C64>]) -> Vec<f64> {
        match target {
            ConditionTarget::Hmin => self.hmin(vectors),
            ConditionTarget::H => self.h(vectors),
            ConditionTarget::Hmax => self.hmax(vectors).0,
        }
    }

    /// Sum of squared residuals for one condition.
    pub fn objective(&self, target: ConditionTarget, vectors: &[Vec<C64>]) -> f64 {
        self.residuals(target, vectors).iter().map(|x| x * x).sum()
    }

    pub fn all(&self, vectors: &[Vec<C64>]) -> ConditionResiduals {
        let (hmax_residuals, hmax_weights) = self.hmax(vectors);
        let hmax_feasible = hmax_residuals
            .iter()
            .all(|r| r.abs() <= HMAX_FEASIBILITY_TOL);
        ConditionResiduals {
            hmin_residuals: self.hmin(vectors),
            h_residuals: self.h(vectors),
            hmax_residuals,
            hmax_degenerate: self.is_top_degenerate(),
            hmax_weights,
            hmax_feasible,
        }
    }
}

pub fn condition_residuals(rho: &DensityMatrix, m: &MeasurementBasis) -> Result<ConditionResiduals> {
    if rho.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: m.dim(),
        });
    }
    Ok(ConditionEvaluator::new(rho).all(m.vectors()))
}

/// min over the probability simplex of `sum_x (sum_j a[x][j] g_j - target)^2`,
/// by accelerated projected gradient.
fn simplex_least_squares(a: &[Vec<f64>], target: f64) -> Vec<f64> {
    let n = a[0].len();
    let lipschitz = 2.0 * a.iter().flatten().map(|x| x * x).sum::<f64>().max(1e-300);
    let step = 1.0 / lipschitz;
    let objective = |g: &[f64]| -> f64 {
        a.iter()
            .map(|row| {
                let r = row.iter().zip(g).map(|(x, y)| x * y).sum::<f64>() - target;
                r * r
            })
            .sum()
    };
    let gradient = |g: &[f64]| -> Vec<f64> {
        let mut grad = vec![0.0; n];
        for row in a {
            let r = row.iter().zip(g).map(|(x, y)| x * y).sum::<f64>() - target;
            for (gj, x) in grad.iter_mut().zip(row) {
                *gj += 2.0 * r * x;
            }
        }
        grad
    };
    let mut g = vec![1.0 / n as f64; n];
    let mut y = g.clone();
    let mut t = 1.0f64;
    let mut best = (objective(&g), g.clone());
    for _ in 0..20_000 {
        let grad = gradient(&y);
        let step_point: Vec<f64> = y.iter().zip(&grad).map(|(v, d)| v - step * d).collect();
        let next = project_to_simplex(&step_point);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let momentum = (t - 1.0) / t_next;
        y = next
            .iter()
            .zip(&g)
            .map(|(x, prev)| x + momentum * (x - prev))
            .collect();
        let moved: f64 = next.iter().zip(&g).map(|(x, p)| (x - p).abs()).sum();
        g = next;
        t = t_next;
        let f = objective(&g);
        if f < best.0 {
            best = (f, g.clone());
        }
        if moved < 1e-16 || best.0 < 1e-30 {
            break;
        }
    }
    best.1
}

/// Euclidean projection onto `{g >= 0, sum g = 1}`.
fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let candidate = (cumulative - 1.0) / (i + 1) as f64;
        if s - candidate > 0.0 {
            shift = candidate;
        }
    }
    v.iter().map(|x| (x - shift).max(0.0)).collect()
}
