//! Built-in fitting procedures.

mod lasso;
mod ols;
mod risk;

use ndarray::{Array1, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::data::{CandidateModel, CandidateSpec, Dataset};
use crate::error::FitError;

pub use lasso::{
    fit_lasso, fit_lasso_path, lasso_kkt_violation, lasso_objective, lasso_path, LambdaPath,
    LassoOptions, LASSO_PATH_RATIO,
};
pub use ols::{fit_ols_subset, MAX_CONDITION};
pub use risk::population_risk;

/// Linear predictor `intercept + x . coefficients` on the original scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub coefficients: Array1<f64>,
    pub intercept: f64,
    pub spec: CandidateSpec,
    pub iterations: usize,
    pub converged: bool,
}

impl LinearModel {
    /// Constant predictor.
    pub fn constant(p: usize, intercept: f64, spec: CandidateSpec) -> Self {
        LinearModel {
            coefficients: Array1::zeros(p),
            intercept,
            spec,
            iterations: 0,
            converged: true,
        }
    }

    pub fn predict(&self, x: ArrayView1<'_, f64>) -> f64 {
        self.intercept + x.dot(&self.coefficients)
    }

    pub fn predict_all(&self, x: ArrayView2<'_, f64>) -> Array1<f64> {
        x.dot(&self.coefficients) + self.intercept
    }

    pub fn nonzeros(&self) -> usize {
        self.coefficients.iter().filter(|&&b| b != 0.0).count()
    }
}

/// Fits every candidate on one training set.
pub trait Fitter: Sync {
    fn fit(&self, train: &Dataset, candidates: &[CandidateModel])
        -> Result<Vec<LinearModel>, FitError>;
}

impl<F> Fitter for F
where
    F: Fn(&Dataset, &[CandidateModel]) -> Result<Vec<LinearModel>, FitError> + Sync,
{
    fn fit(
        &self,
        train: &Dataset,
        candidates: &[CandidateModel],
    ) -> Result<Vec<LinearModel>, FitError> {
        self(train, candidates)
    }
}

/// Least squares on each candidate's feature subset.
#[derive(Debug, Clone, Copy, Default)]
pub struct OlsSubsetFitter;

impl Fitter for OlsSubsetFitter {
    fn fit(
        &self,
        train: &Dataset,
        candidates: &[CandidateModel],
    ) -> Result<Vec<LinearModel>, FitError> {
        candidates
            .iter()
            .map(|c| fit_ols_subset(train.x.view(), train.y.view(), c))
            .collect()
    }
}

/// Lasso along the candidates' penalty levels, warm-started from the
/// largest penalty down.
#[derive(Debug, Clone, Copy, Default)]
pub struct LassoFitter {
    pub options: LassoOptions,
}

impl Fitter for LassoFitter {
    fn fit(
        &self,
        train: &Dataset,
        candidates: &[CandidateModel],
    ) -> Result<Vec<LinearModel>, FitError> {
        let mut lambdas = Vec::with_capacity(candidates.len());
        for c in candidates {
            match c.spec {
                CandidateSpec::Lambda { lambda } if lambda >= 0.0 => lambdas.push(lambda),
                CandidateSpec::Lambda { lambda } => {
                    return Err(FitError::NegativePenalty {
                        candidate: c.id,
                        lambda,
                    })
                }
                CandidateSpec::Subset { .. } => {
                    return Err(FitError::UnsupportedCandidate { candidate: c.id })
                }
            }
        }
        Ok(fit_lasso_path(
            train.x.view(),
            train.y.view(),
            &lambdas,
            &self.options,
        ))
    }
}
