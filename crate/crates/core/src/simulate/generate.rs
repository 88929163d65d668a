use nalgebra::DMatrix;
use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{CvcError, Result};
use crate::rng::{substream, Phase};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Covariance {
    Identity,
    /// Unit variances, every off-diagonal entry equal to `rho`.
    Equicorrelated { rho: f64 },
    Full { matrix: Vec<Vec<f64>> },
}

impl Covariance {
    pub fn matrix(&self, p: usize) -> Array2<f64> {
        match self {
            Covariance::Identity => Array2::eye(p),
            Covariance::Equicorrelated { rho } => {
                Array2::from_shape_fn((p, p), |(i, j)| if i == j { 1.0 } else { *rho })
            }
            Covariance::Full { matrix } => Array2::from_shape_fn((p, p), |(i, j)| matrix[i][j]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian,
    /// Student t with 3 degrees of freedom, not rescaled (variance 3).
    StudentT3,
    /// No noise; `y` is exactly linear in `x`.
    Zero,
}

/// `y = intercept + X beta + noise_scale * eps` with rows of `X` drawn from
/// `N(0, covariance)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearDesign {
    pub n: usize,
    pub intercept: f64,
    pub beta: Vec<f64>,
    pub covariance: Covariance,
    pub noise: NoiseKind,
    pub noise_scale: f64,
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub data: Dataset,
    pub beta: Array1<f64>,
    pub intercept: f64,
    pub sigma: Array2<f64>,
    /// Realized noise `y - intercept - X beta`.
    pub noise: Array1<f64>,
}

pub fn gen_linear_data(design: &LinearDesign, seed: u64) -> Result<SyntheticData> {
    let n = design.n;
    let p = design.beta.len();
    let mut rng = substream(seed, Phase::Data, n as u64, p as u64);
    let gaussian = |rng: &mut rand_chacha::ChaCha8Rng| -> f64 { StandardNormal.sample(rng) };

    let x = match &design.covariance {
        Covariance::Identity => Array2::from_shape_fn((n, p), |_| gaussian(&mut rng)),
        Covariance::Equicorrelated { rho } => {
            if !(0.0..1.0).contains(rho) {
                return Err(CvcError::InvalidConfig(format!(
                    "equicorrelation must lie in [0, 1), got {rho}"
                )));
            }
            let (a, b) = ((1.0 - rho).sqrt(), rho.sqrt());
            let mut x = Array2::zeros((n, p));
            for mut row in x.outer_iter_mut() {
                let shared = gaussian(&mut rng);
                for v in row.iter_mut() {
                    *v = a * gaussian(&mut rng) + b * shared;
                }
            }
            x
        }
        Covariance::Full { matrix } => {
            if matrix.len() != p || matrix.iter().any(|r| r.len() != p) {
                return Err(CvcError::DimensionMismatch(format!(
                    "covariance must be {p} x {p}"
                )));
            }
            let sigma = design.covariance.matrix(p);
            let chol = DMatrix::from_fn(p, p, |i, j| sigma[[i, j]])
                .cholesky()
                .ok_or_else(|| CvcError::InvalidConfig("covariance is not positive definite".into()))?;
            let l = chol.l();
            let mut x = Array2::zeros((n, p));
            for mut row in x.outer_iter_mut() {
                let z: Vec<f64> = (0..p).map(|_| gaussian(&mut rng)).collect();
                for i in 0..p {
                    row[i] = (0..=i).map(|k| l[(i, k)] * z[k]).sum();
                }
            }
            x
        }
    };

    let noise: Array1<f64> = match design.noise {
        NoiseKind::Gaussian => Array1::from_shape_fn(n, |_| gaussian(&mut rng)),
        NoiseKind::StudentT3 => {
            let t = StudentT::new(3.0).expect("valid degrees of freedom");
            Array1::from_shape_fn(n, |_| t.sample(&mut rng))
        }
        NoiseKind::Zero => Array1::zeros(n),
    } * design.noise_scale;

    let beta = Array1::from(design.beta.clone());
    let y = x.dot(&beta) + design.intercept + &noise;
    Ok(SyntheticData {
        data: Dataset::new(x, y)?,
        beta,
        intercept: design.intercept,
        sigma: design.covariance.matrix(p),
        noise,
    })
}

/// Coefficients with `s` entries of random sign and unit size, then `s`
/// standard Gaussian entries, then zeros.
pub fn mixed_sparse_beta(p: usize, s: usize, seed: u64) -> Result<Vec<f64>> {
    if 2 * s > p {
        return Err(CvcError::InvalidConfig(format!(
            "need p >= 2s, got p = {p}, s = {s}"
        )));
    }
    let mut rng = substream(seed, Phase::Coefficients, p as u64, s as u64);
    let mut beta = vec![0.0; p];
    for b in beta.iter_mut().take(s) {
        *b = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
    for b in beta.iter_mut().skip(s).take(s) {
        *b = StandardNormal.sample(&mut rng);
    }
    Ok(beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(n: usize, noise: NoiseKind, covariance: Covariance) -> LinearDesign {
        LinearDesign {
            n,
            intercept: 0.0,
            beta: vec![1.0, -2.0, 0.0, 0.5],
            covariance,
            noise,
            noise_scale: 1.0,
        }
    }

    #[test]
    fn noise_variance_near_one() {
        let s = gen_linear_data(&design(10_000, NoiseKind::Gaussian, Covariance::Identity), 3)
            .unwrap();
        let resid = &s.data.y - &s.data.x.dot(&s.beta);
        let mean = resid.mean().unwrap();
        let var = resid.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / 9_999.0;
        assert!((var - 1.0).abs() < 0.1, "{var}");
    }

    #[test]
    fn identity_design_is_uncorrelated() {
        let s = gen_linear_data(&design(10_000, NoiseKind::Gaussian, Covariance::Identity), 4)
            .unwrap();
        let x = &s.data.x;
        for a in 0..4 {
            for b in (a + 1)..4 {
                let (ca, cb) = (x.column(a), x.column(b));
                let (ma, mb) = (ca.mean().unwrap(), cb.mean().unwrap());
                let cov: f64 = ca.iter().zip(cb).map(|(u, v)| (u - ma) * (v - mb)).sum();
                let va: f64 = ca.iter().map(|u| (u - ma).powi(2)).sum();
                let vb: f64 = cb.iter().map(|v| (v - mb).powi(2)).sum();
                assert!((cov / (va * vb).sqrt()).abs() < 0.05);
            }
        }
    }

    #[test]
    fn equicorrelated_design_correlation() {
        let s = gen_linear_data(
            &design(20_000, NoiseKind::Gaussian, Covariance::Equicorrelated { rho: 0.5 }),
            5,
        )
        .unwrap();
        let (a, b) = (s.data.x.column(0), s.data.x.column(3));
        let r = a.dot(&b) / (a.dot(&a) * b.dot(&b)).sqrt();
        assert!((r - 0.5).abs() < 0.03, "{r}");
    }

    #[test]
    fn zero_beta_zero_noise_gives_zero_response() {
        let mut d = design(50, NoiseKind::Zero, Covariance::Identity);
        d.beta = vec![0.0; 4];
        let s = gen_linear_data(&d, 1).unwrap();
        assert!(s.data.y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deterministic_per_seed() {
        let d = design(20, NoiseKind::StudentT3, Covariance::Identity);
        let a = gen_linear_data(&d, 8).unwrap();
        let b = gen_linear_data(&d, 8).unwrap();
        assert_eq!(a.data, b.data);
    }

    #[test]
    fn full_covariance_matches_equicorrelated_matrix() {
        let m = Covariance::Equicorrelated { rho: 0.3 }.matrix(4);
        let full = Covariance::Full {
            matrix: m.outer_iter().map(|r| r.to_vec()).collect(),
        };
        assert_eq!(full.matrix(4), m);
        assert!(gen_linear_data(&design(10, NoiseKind::Gaussian, full), 1).is_ok());
        let small = Covariance::Full {
            matrix: vec![vec![1.0]],
        };
        assert!(gen_linear_data(&design(10, NoiseKind::Gaussian, small), 1).is_err());
    }

    #[test]
    fn mixed_sparse_beta_layout() {
        let b = mixed_sparse_beta(20, 5, 2).unwrap();
        assert!(b[..5].iter().all(|v| v.abs() == 1.0));
        assert!(b[10..].iter().all(|&v| v == 0.0));
        assert!(mixed_sparse_beta(8, 5, 2).is_err());
    }
}
