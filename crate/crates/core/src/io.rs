//! JSON file formats and the report document written by the command-line tool.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested arrays.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::entropies::OptimalValues;
use crate::error::Error;
use crate::guessing::ValueStatus;
use crate::linalg::{ComplexMatrix, C64};
use crate::measurements::{ConditionResiduals, ConditionTarget, MeasurementBasis, ProductMode};
use crate::states::DensityMatrix;

pub type MatrixRows = Vec<Vec<C64>>;

/// Failure to turn a file into a validated object.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Invalid(#[from] Error),
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> MatrixRows {
    (0..m.rows()).map(|r| m.row(r)).collect()
}

pub fn rows_to_matrix(rows: &MatrixRows) -> Result<ComplexMatrix, Error> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch {
            expected: cols,
            found: bad.len(),
        });
    }
    ComplexMatrix::new(n, cols, rows.iter().flatten().copied().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub matrix: MatrixRows,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self {
            dim: rho.dim(),
            matrix: matrix_to_rows(rho.matrix()),
        }
    }

    pub fn to_state(&self, tol: f64) -> Result<DensityMatrix, Error> {
        let m = rows_to_matrix(&self.matrix)?;
        let n = m.ensure_square()?;
        if n != self.dim {
            return Err(Error::OutOfRange {
                what: "declared dim",
                value: self.dim as f64,
                min: n as f64,
                max: n as f64,
            });
        }
        DensityMatrix::from_matrix(m, tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementFile {
    pub dim: usize,
    pub vectors: MatrixRows,
}

impl MeasurementFile {
    pub fn from_basis(m: &MeasurementBasis) -> Self {
        Self {
            dim: m.dim(),
            vectors: m.vectors().to_vec(),
        }
    }

    pub fn to_basis(&self, tol: f64) -> Result<MeasurementBasis, Error> {
        if let Some(bad) = self.vectors.iter().find(|v| v.len() != self.dim) {
            return Err(Error::OutOfRange {
                what: "vector length",
                value: bad.len() as f64,
                min: self.dim as f64,
                max: self.dim as f64,
            });
        }
        MeasurementBasis::from_vectors(self.vectors.clone(), tol)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| InputError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_state(path: &Path, tol: f64) -> Result<(StateFile, DensityMatrix), InputError> {
    let file: StateFile = read_json(path)?;
    let rho = file.to_state(tol)?;
    Ok((file, rho))
}

pub fn read_measurement(path: &Path, tol: f64) -> Result<(MeasurementFile, MeasurementBasis), InputError> {
    let file: MeasurementFile = read_json(path)?;
    let m = file.to_basis(tol)?;
    Ok((file, m))
}

/// Everything a command reports. Absent sections are omitted from the JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    pub input: InputEcho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal: Option<OptimalValues>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub achieving_basis: Option<MeasurementFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantities: Option<MeasurementQuantities>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<ConditionResiduals>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurement: Option<MeasurementFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<ConditionTarget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ProductMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_hmin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementQuantities {
    pub p_guess: f64,
    pub p_guess_status: ValueStatus,
    pub h_min: f64,
    pub h: f64,
    pub h_max: f64,
    pub p_secr: f64,
    pub p_secr_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    /// `-log2(upper)`, a certified lower bound on the conditional min-entropy.
    pub h_min_certified: f64,
    pub feasible: bool,
    pub min_slack: f64,
    pub witness_x: MatrixRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub success: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub angles: Vec<f64>,
    pub restarts_used: usize,
    pub basis: MeasurementFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub accepted: bool,
    pub verdict: String,
    pub claimed_hmin: f64,
    pub certified_hmin: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub psd: f64,
    pub basis: f64,
    pub bracket: f64,
    pub search: f64,
    pub certify: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::qubit_m_state;

    #[test]
    fn state_file_round_trip() {
        let rho = qubit_m_state(0.6).unwrap();
        let file = StateFile::from_state(&rho);
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.starts_with("{\"dim\":2,\"matrix\":[[[0.8,0.0],[0.0,0.0]]"));
        let back: StateFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_state(1e-10).unwrap().matrix(), rho.matrix());
    }

    #[test]
    fn declared_dim_must_match() {
        let mut file = StateFile::from_state(&qubit_m_state(0.6).unwrap());
        file.dim = 3;
        assert!(file.to_state(1e-10).is_err());
        let m = MeasurementFile {
            dim: 3,
            vectors: MeasurementFile::from_basis(&MeasurementBasis::computational(2)).vectors,
        };
        assert!(m.to_basis(1e-10).is_err());
    }
}
