use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, ArrayView1, ArrayView2};

use super::LinearModel;
use crate::data::{CandidateModel, CandidateSpec};
use crate::error::FitError;

/// Largest accepted condition number of the column-normalized Gram matrix.
pub const MAX_CONDITION: f64 = 1e12;

/// Least-squares fit with intercept on the candidate's feature subset.
/// Coefficients outside the subset are exactly zero.
pub fn fit_ols_subset(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    candidate: &CandidateModel,
) -> Result<LinearModel, FitError> {
    let CandidateSpec::Subset { features } = &candidate.spec else {
        return Err(FitError::UnsupportedCandidate {
            candidate: candidate.id,
        });
    };
    let (n, p) = x.dim();
    if let Some(&index) = features.iter().find(|&&f| f >= p) {
        return Err(FitError::FeatureOutOfRange {
            candidate: candidate.id,
            index,
            p,
        });
    }
    let k = features.len();
    if n < k + 1 {
        return Err(FitError::TooFewRows {
            candidate: candidate.id,
            rows: n,
            params: k + 1,
        });
    }
    let y_mean = y.sum() / n as f64;
    if k == 0 {
        return Ok(LinearModel::constant(p, y_mean, candidate.spec.clone()));
    }

    let means: Vec<f64> = features
        .iter()
        .map(|&f| x.column(f).sum() / n as f64)
        .collect();
    let mut design = DMatrix::<f64>::from_fn(n, k, |i, c| x[[i, features[c]]] - means[c]);
    let norms: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();
    if norms.contains(&0.0) {
        return Err(FitError::Singular {
            candidate: candidate.id,
            condition: f64::INFINITY,
        });
    }
    for (c, &s) in norms.iter().enumerate() {
        design.column_mut(c).unscale_mut(s);
    }
    let rhs = DVector::<f64>::from_fn(n, |i, _| y[i] - y_mean);

    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 {
        (smax / smin).powi(2)
    } else {
        f64::INFINITY
    };
    if !(condition < MAX_CONDITION) {
        return Err(FitError::Singular {
            candidate: candidate.id,
            condition,
        });
    }
    let scaled = svd.solve(&rhs, 0.0).expect("u and v were computed");

    let mut coefficients = Array1::zeros(p);
    let mut intercept = y_mean;
    for (c, &f) in features.iter().enumerate() {
        let b = scaled[c] / norms[c];
        coefficients[f] = b;
        intercept -= b * means[c];
    }
    Ok(LinearModel {
        coefficients,
        intercept,
        spec: candidate.spec.clone(),
        iterations: 0,
        converged: true,
    })
}
