//! Datasets, candidate descriptions and the loss function.

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{CvcError, Result};

/// What a candidate fits: an OLS model on a feature subset, or a penalised
/// fit at a fixed penalty level.
///
/// Every subset model carries an unpenalised intercept; `features` lists the
/// slope columns only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSpec {
    Subset { features: Vec<usize> },
    Lambda { lambda: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateModel {
    pub id: usize,
    pub spec: CandidateSpec,
}

impl CandidateModel {
    pub fn subset(id: usize, mut features: Vec<usize>) -> Self {
        features.sort_unstable();
        features.dedup();
        CandidateModel {
            id,
            spec: CandidateSpec::Subset { features },
        }
    }

    pub fn lambda(id: usize, lambda: f64) -> Self {
        CandidateModel {
            id,
            spec: CandidateSpec::Lambda { lambda },
        }
    }

    /// Number of fitted terms, intercept included, for subset candidates.
    pub fn size(&self) -> Option<usize> {
        match &self.spec {
            CandidateSpec::Subset { features } => Some(features.len() + 1),
            CandidateSpec::Lambda { .. } => None,
        }
    }

    pub fn penalty(&self) -> Option<f64> {
        match self.spec {
            CandidateSpec::Lambda { lambda } => Some(lambda),
            CandidateSpec::Subset { .. } => None,
        }
    }
}

/// Checks id contiguity and per-kind constraints for a candidate list.
pub fn validate_candidates(candidates: &[CandidateModel], p: usize) -> Result<()> {
    for (pos, c) in candidates.iter().enumerate() {
        if c.id != pos {
            return Err(CvcError::InvalidConfig(format!(
                "candidate ids must be 0..M-1 in order; found id {} at position {pos}",
                c.id
            )));
        }
        match &c.spec {
            CandidateSpec::Subset { features } => {
                if features.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(CvcError::InvalidConfig(format!(
                        "candidate {pos}: subset indices must be strictly increasing"
                    )));
                }
                if let Some(&bad) = features.iter().find(|&&f| f >= p) {
                    return Err(CvcError::InvalidConfig(format!(
                        "candidate {pos}: feature {bad} out of range for {p} columns"
                    )));
                }
            }
            CandidateSpec::Lambda { lambda } => {
                if !(*lambda >= 0.0) || !lambda.is_finite() {
                    return Err(CvcError::InvalidConfig(format!(
                        "candidate {pos}: penalty must be finite and nonnegative, got {lambda}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// `(yhat - y)^2`
#[inline]
pub fn squared_loss(yhat: f64, y: f64) -> f64 {
    let r = yhat - y;
    r * r
}

/// Design matrix and response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub standardized: bool,
    pub column_means: Array1<f64>,
    pub column_scales: Array1<f64>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(x: Array2<f64>, y: Array1<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(CvcError::DimensionMismatch(format!(
                "x has {} rows but y has {} entries",
                x.nrows(),
                y.len()
            )));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(CvcError::Degenerate("non-finite entry in dataset".into()));
        }
        let p = x.ncols();
        Ok(Dataset {
            x,
            y,
            standardized: false,
            column_means: Array1::zeros(p),
            column_scales: Array1::ones(p),
            feature_names: (0..p).map(|j| format!("x{j}")).collect(),
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.p());
        self.feature_names = names;
        self
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Centers every column and scales it to unit sample standard deviation
    /// (divisor `n - 1`). Constant columns are centered and left unscaled.
    pub fn standardize(&self) -> Dataset {
        let n = self.n();
        let mut x = self.x.clone();
        let mut means = Array1::zeros(self.p());
        let mut scales = Array1::ones(self.p());
        if n >= 2 {
            for (j, mut col) in x.axis_iter_mut(Axis(1)).enumerate() {
                let mean = col.sum() / n as f64;
                col.mapv_inplace(|v| v - mean);
                let ss: f64 = col.iter().map(|v| v * v).sum();
                let sd = (ss / (n - 1) as f64).sqrt();
                means[j] = mean;
                if sd > 0.0 {
                    col.mapv_inplace(|v| v / sd);
                    scales[j] = sd;
                }
            }
        }
        Dataset {
            x,
            y: self.y.clone(),
            standardized: true,
            column_means: means,
            column_scales: scales,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Owned copy of the given rows.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select(Axis(0), rows),
            y: self.y.select(Axis(0), rows),
            standardized: self.standardized,
            column_means: self.column_means.clone(),
            column_scales: self.column_scales.clone(),
            feature_names: self.feature_names.clone(),
        }
    }
}
