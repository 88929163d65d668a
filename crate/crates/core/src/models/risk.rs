use ndarray::{Array2, ArrayView1};

use crate::error::{CvcError, Result};

/// Expected squared prediction error of a linear fit under a linear model
/// with design covariance `sigma`: `(b - beta)' sigma (b - beta) + noise_var`.
pub fn population_risk(
    beta_hat: ArrayView1<'_, f64>,
    beta: ArrayView1<'_, f64>,
    sigma: &Array2<f64>,
    noise_var: f64,
) -> Result<f64> {
    let p = beta.len();
    if beta_hat.len() != p || sigma.dim() != (p, p) {
        return Err(CvcError::DimensionMismatch(format!(
            "beta_hat {} / beta {} / sigma {:?}",
            beta_hat.len(),
            p,
            sigma.dim()
        )));
    }
    let d = &beta_hat - &beta;
    Ok(d.dot(&sigma.dot(&d)) + noise_var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1};

    #[test]
    fn exact_estimate_has_noise_risk() {
        let b = array![1.0, -2.0, 0.5];
        let r = population_risk(b.view(), b.view(), &Array2::eye(3), 1.0).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn unit_error_identity() {
        let e1 = array![1.0, 0.0, 0.0];
        let r = population_risk(e1.view(), Array1::zeros(3).view(), &Array2::eye(3), 1.0).unwrap();
        assert_eq!(r, 2.0);
    }

    #[test]
    fn equicorrelated_quadratic_form() {
        let p = 4;
        let sigma = Array2::from_shape_fn((p, p), |(i, j)| if i == j { 1.0 } else { 0.5 });
        let d = array![1.0, 1.0, 0.0, 0.0];
        let r = population_risk(d.view(), Array1::zeros(p).view(), &sigma, 1.0).unwrap();
        assert!((r - 4.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let a = array![1.0, 2.0];
        let b = array![1.0, 2.0, 3.0];
        assert!(population_risk(a.view(), b.view(), &Array2::eye(3), 1.0).is_err());
    }
}
