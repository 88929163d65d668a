//! Coordinate-descent Lasso.
//!
//! Minimizes `(2n)^{-1} |y - b0 - X b|^2 + lambda |D b|_1` where `D` holds the
//! column standard deviations (divisor `n`), i.e. the penalty acts on the
//! standardized coefficients. The intercept is unpenalized. Coefficients are
//! reported on the original scale.

use ndarray::{Array1, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::LinearModel;
use crate::data::{CandidateSpec, Dataset};
use crate::error::{CvcError, Result};

/// `lambda_min / lambda_max` of the default penalty path.
pub const LASSO_PATH_RATIO: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LassoOptions {
    /// Stop once a full sweep changes no standardized coefficient by more
    /// than this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for LassoOptions {
    fn default() -> Self {
        LassoOptions {
            tol: 1e-7,
            max_sweeps: 100_000,
        }
    }
}

struct Standardized {
    n: usize,
    p: usize,
    /// Column-major standardized design.
    cols: Vec<f64>,
    means: Vec<f64>,
    /// Zero for constant columns, which never enter the model.
    scales: Vec<f64>,
    y_mean: f64,
    yc: Vec<f64>,
}

impl Standardized {
    fn new(x: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>) -> Self {
        let (n, p) = x.dim();
        let nf = n as f64;
        let mut cols = vec![0.0; n * p];
        let mut means = vec![0.0; p];
        let mut scales = vec![0.0; p];
        for j in 0..p {
            let col = x.column(j);
            let mean = col.sum() / nf;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
            let sd = var.sqrt();
            means[j] = mean;
            let dst = &mut cols[j * n..(j + 1) * n];
            if sd > 0.0 {
                scales[j] = sd;
                for (d, v) in dst.iter_mut().zip(col.iter()) {
                    *d = (v - mean) / sd;
                }
            }
        }
        let y_mean = y.sum() / nf;
        let yc = y.iter().map(|v| v - y_mean).collect();
        Standardized {
            n,
            p,
            cols,
            means,
            scales,
            y_mean,
            yc,
        }
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.cols[j * self.n..(j + 1) * self.n]
    }

    /// `max_j |n^{-1} x_j' yc|`
    fn lambda_max(&self) -> f64 {
        (0..self.p)
            .map(|j| dot(self.col(j), &self.yc).abs() / self.n as f64)
            .fold(0.0, f64::max)
    }

    fn residual(&self, beta: &[f64]) -> Vec<f64> {
        let mut r = self.yc.clone();
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                axpy(-b, self.col(j), &mut r);
            }
        }
        r
    }

    fn to_model(&self, beta: &[f64], lambda: f64, iterations: usize, converged: bool) -> LinearModel {
        let mut coefficients = Array1::zeros(self.p);
        let mut intercept = self.y_mean;
        for j in 0..self.p {
            if beta[j] != 0.0 {
                let b = beta[j] / self.scales[j];
                coefficients[j] = b;
                intercept -= b * self.means[j];
            }
        }
        LinearModel {
            coefficients,
            intercept,
            spec: CandidateSpec::Lambda { lambda },
            iterations,
            converged,
        }
    }

    fn standardized_beta(&self, model: &LinearModel) -> Vec<f64> {
        (0..self.p)
            .map(|j| model.coefficients[j] * self.scales[j])
            .collect()
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

struct Solver<'a> {
    data: &'a Standardized,
    beta: Vec<f64>,
    resid: Vec<f64>,
}

impl<'a> Solver<'a> {
    fn new(data: &'a Standardized) -> Self {
        Solver {
            data,
            beta: vec![0.0; data.p],
            resid: data.yc.clone(),
        }
    }

    fn update(&mut self, j: usize, lambda: f64) -> f64 {
        let n = self.data.n as f64;
        let col = self.data.col(j);
        let old = self.beta[j];
        let new = soft_threshold(dot(col, &self.resid) / n + old, lambda);
        let delta = new - old;
        if delta != 0.0 {
            axpy(-delta, col, &mut self.resid);
            self.beta[j] = new;
        }
        delta.abs()
    }

    fn sweep_all(&mut self, lambda: f64) -> f64 {
        let mut max_delta = 0.0f64;
        for j in 0..self.data.p {
            if self.data.scales[j] > 0.0 {
                max_delta = max_delta.max(self.update(j, lambda));
            }
        }
        max_delta
    }

    fn sweep_active(&mut self, lambda: f64, active: &[usize]) -> f64 {
        let mut max_delta = 0.0f64;
        for &j in active {
            max_delta = max_delta.max(self.update(j, lambda));
        }
        max_delta
    }

    /// Full sweeps alternate with sweeps restricted to the nonzero set until
    /// a full sweep moves nothing by more than `tol`.
    fn solve(&mut self, lambda: f64, opts: &LassoOptions) -> (usize, bool) {
        let mut sweeps = 0;
        let mut active = Vec::new();
        while sweeps < opts.max_sweeps {
            let delta = self.sweep_all(lambda);
            sweeps += 1;
            if delta < opts.tol {
                return (sweeps, true);
            }
            active.clear();
            active.extend((0..self.data.p).filter(|&j| self.beta[j] != 0.0));
            while sweeps < opts.max_sweeps {
                let delta = self.sweep_active(lambda, &active);
                sweeps += 1;
                if delta < opts.tol {
                    break;
                }
            }
        }
        (sweeps, false)
    }
}

/// Lasso fit at a single penalty level, started from zero.
pub fn fit_lasso(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    lambda: f64,
    opts: &LassoOptions,
) -> LinearModel {
    let data = Standardized::new(x, y);
    let mut solver = Solver::new(&data);
    let (sweeps, converged) = solver.solve(lambda, opts);
    data.to_model(&solver.beta, lambda, sweeps, converged)
}

/// Lasso fits at every penalty in `lambdas`, returned in input order.
/// Fits run from the largest penalty down, each warm-started from the last.
pub fn fit_lasso_path(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    lambdas: &[f64],
    opts: &LassoOptions,
) -> Vec<LinearModel> {
    let data = Standardized::new(x, y);
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| lambdas[b].total_cmp(&lambdas[a]));
    let mut solver = Solver::new(&data);
    let mut out: Vec<Option<LinearModel>> = vec![None; lambdas.len()];
    for idx in order {
        let (sweeps, converged) = solver.solve(lambdas[idx], opts);
        out[idx] = Some(data.to_model(&solver.beta, lambdas[idx], sweeps, converged));
    }
    out.into_iter().map(|m| m.expect("every index visited")).collect()
}

/// Largest violation of the Lasso optimality conditions on the standardized
/// scale: `|g_j| <= lambda` for zero coefficients and `g_j = lambda sign(b_j)`
/// for active ones, where `g_j = n^{-1} x_j' r`.
pub fn lasso_kkt_violation(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    model: &LinearModel,
    lambda: f64,
) -> f64 {
    let data = Standardized::new(x, y);
    let beta = data.standardized_beta(model);
    let resid = data.residual(&beta);
    let n = data.n as f64;
    (0..data.p)
        .filter(|&j| data.scales[j] > 0.0)
        .map(|j| {
            let g = dot(data.col(j), &resid) / n;
            if beta[j] == 0.0 {
                (g.abs() - lambda).max(0.0)
            } else {
                (g - lambda * beta[j].signum()).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Penalized objective of `model` at `lambda`.
pub fn lasso_objective(
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    model: &LinearModel,
    lambda: f64,
) -> f64 {
    let data = Standardized::new(x, y);
    let beta = data.standardized_beta(model);
    let rss: f64 = data.residual(&beta).iter().map(|r| r * r).sum();
    rss / (2.0 * data.n as f64) + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
}

/// Log-equally spaced penalty grid from `lambda_max` down to
/// `ratio * lambda_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaPath {
    pub values: Vec<f64>,
    pub lambda_max: f64,
    pub ratio: f64,
}

impl LambdaPath {
    pub fn with_ratio(lambda_max: f64, ratio: f64, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(CvcError::InvalidConfig(format!("path needs at least 2 values, got {k}")));
        }
        if !(lambda_max > 0.0) || !(ratio > 0.0 && ratio < 1.0) {
            return Err(CvcError::Degenerate(format!(
                "invalid path endpoints: lambda_max {lambda_max}, ratio {ratio}"
            )));
        }
        let step = ratio.ln() / (k - 1) as f64;
        let mut values: Vec<f64> = (0..k).map(|i| lambda_max * (step * i as f64).exp()).collect();
        values[0] = lambda_max;
        values[k - 1] = lambda_max * ratio;
        Ok(LambdaPath {
            values,
            lambda_max,
            ratio,
        })
    }
}

/// Default path for `data`: `lambda_max` is the smallest penalty giving the
/// all-zero fit.
pub fn lasso_path(data: &Dataset, k: usize) -> Result<LambdaPath> {
    let s = Standardized::new(data.x.view(), data.y.view());
    let lambda_max = s.lambda_max();
    if !(lambda_max > 0.0) {
        return Err(CvcError::Degenerate(
            "response is constant or uncorrelated with every column; no penalty path".into(),
        ));
    }
    LambdaPath::with_ratio(lambda_max, LASSO_PATH_RATIO, k)
}
