#![allow(dead_code)]

use cvc::{LossMatrix, FoldPlan};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, p), |_| StandardNormal.sample(rng))
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Array1<f64> {
    Array1::from_shape_fn(n, |_| StandardNormal.sample(rng))
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..k {
            let f = a[r][col] / a[col][col];
            for c in col..k {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = ((r + 1)..k).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// OLS with intercept on `features` through the raw normal equations
/// `[1 X_J]'[1 X_J] b = [1 X_J]' y`. Returns `(intercept, coefficients)`.
pub fn normal_equations(x: &Array2<f64>, y: &Array1<f64>, features: &[usize]) -> (f64, Vec<f64>) {
    let n = x.nrows();
    let k = features.len() + 1;
    let design = |i: usize, c: usize| if c == 0 { 1.0 } else { x[[i, features[c - 1]]] };
    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for i in 0..n {
        for r in 0..k {
            b[r] += design(i, r) * y[i];
            for c in 0..k {
                a[r][c] += design(i, r) * design(i, c);
            }
        }
    }
    let sol = solve(a, b);
    (sol[0], sol[1..].to_vec())
}

/// Random V-fold loss matrix with per-candidate offsets added to squared
/// Gaussian noise, so column means are distinct with probability one.
pub fn random_losses(rng: &mut ChaCha8Rng, n: usize, m: usize, v: usize) -> LossMatrix {
    let offsets: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..0.5)).collect();
    let values = Array2::from_shape_fn((n, m), |(_, c)| {
        let z: f64 = StandardNormal.sample(rng);
        z * z + offsets[c]
    });
    let plan = cvc::make_folds(n, v, rng.random()).unwrap();
    LossMatrix::from_plan(values, &plan).unwrap()
}

/// Loss matrix whose columns share a per-sample component, as losses of
/// competing fits on the same validation points do.
pub fn correlated_losses(rng: &mut ChaCha8Rng, n: usize, m: usize, v: usize) -> LossMatrix {
    let offsets: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..0.3)).collect();
    let base: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let values = Array2::from_shape_fn((n, m), |(i, c)| {
        let e: f64 = StandardNormal.sample(rng);
        (base[i] + 0.3 * e).powi(2) + offsets[c]
    });
    let plan = cvc::make_folds(n, v, rng.random()).unwrap();
    LossMatrix::from_plan(values, &plan).unwrap()
}

pub fn plan(n: usize, v: usize, seed: u64) -> FoldPlan {
    cvc::make_folds(n, v, seed).unwrap()
}

/// Sample correlation matrix of the columns of `cols` (each of length n).
pub fn correlation(cols: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = cols[0].len() as f64;
    let centered: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| {
            let m = c.iter().sum::<f64>() / n;
            c.iter().map(|v| v - m).collect()
        })
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let k = cols.len();
    let mut r = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            r[i][j] = dot(&centered[i], &centered[j])
                / (dot(&centered[i], &centered[i]) * dot(&centered[j], &centered[j])).sqrt();
        }
    }
    r
}

/// Lower Cholesky factor by the textbook recurrence.
pub fn cholesky(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = a.len();
    let mut l = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let s: f64 = (0..j).map(|t| l[i][t] * l[j][t]).sum();
            if i == j {
                l[i][j] = (a[i][i] - s).max(0.0).sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    l
}

/// Draws of `max_j Z_j` for `Z ~ N(0, corr)`.
pub fn gaussian_max_draws(corr: &[Vec<f64>], draws: usize, seed: u64) -> Vec<f64> {
    let l = cholesky(corr);
    let k = corr.len();
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(draws);
    let mut z = vec![0.0; k];
    for _ in 0..draws {
        for v in z.iter_mut() {
            *v = StandardNormal.sample(&mut r);
        }
        let m = (0..k)
            .map(|i| (0..=i).map(|t| l[i][t] * z[t]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(m);
    }
    out
}

pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() as f64 - 1.0) * q).round() as usize;
    sorted[idx]
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Shift invariance and scale equivariance of the contrast statistics and
/// studentized invariance of `T`, every `T*_b` and the p-value, for focal
/// candidate `focal`.
pub fn check_invariances(
    l: &LossMatrix,
    focal: usize,
    shifts: &[f64],
    scale: f64,
    seed: u64,
) -> Result<(), String> {
    use cvc::{bootstrap_draws, diff_stats, multiplier_bootstrap, ScreenSet};
    let base = diff_stats(l, focal).map_err(|e| e.to_string())?;
    let shifted = diff_stats(&l.map_values(|r, _, v| v + shifts[r]), focal).map_err(|e| e.to_string())?;
    let scaled = diff_stats(&l.map_values(|_, _, v| v * scale), focal).map_err(|e| e.to_string())?;
    let pairs = [
        (&base.xi, &shifted.xi, &scaled.xi, "xi"),
        (&base.centered, &shifted.centered, &scaled.centered, "centered"),
        (&base.fold_means, &shifted.fold_means, &scaled.fold_means, "fold_means"),
    ];
    for (b, s, c, name) in pairs {
        for ((x, y), z) in b.iter().zip(s.iter()).zip(c.iter()) {
            if (x - y).abs() > 1e-12 * (1.0 + x.abs()) {
                return Err(format!("shift changed {name}: {x} vs {y}"));
            }
            if !close(x * scale, *z, 1e-12) {
                return Err(format!("scale broke {name}: {x} * {scale} vs {z}"));
            }
        }
    }
    for k in 0..base.num_competitors() {
        if (base.overall_means[k] - shifted.overall_means[k]).abs() > 1e-12 * (1.0 + base.overall_means[k].abs()) {
            return Err("shift changed overall means".into());
        }
        if !close(base.scales[k] * scale, scaled.scales[k], 1e-12) {
            return Err("scale broke scales".into());
        }
        let (a, b, c) = (base.studentized(k), shifted.studentized(k), scaled.studentized(k));
        if !close(a, b, 1e-10) || !close(a, c, 1e-12) {
            return Err(format!("studentized ratio moved: {a} {b} {c}"));
        }
    }
    for v in 0..base.num_groups {
        for k in 0..base.num_competitors() {
            let rows: Vec<f64> = base
                .groups
                .iter()
                .enumerate()
                .filter(|(_, &g)| g == v)
                .map(|(r, _)| base.centered[[r, k]])
                .collect();
            let mean = rows.iter().sum::<f64>() / rows.len() as f64;
            if mean.abs() > 1e-10 * base.scales[k].max(f64::MIN_POSITIVE) && mean.abs() > 1e-14 {
                return Err(format!("fold {v} centered mean {mean}"));
            }
        }
    }
    let screens = [ScreenSet::all(&base), ScreenSet::all(&shifted), ScreenSet::all(&scaled)];
    let stats = [&base, &shifted, &scaled];
    let draws: Vec<Vec<f64>> = stats.iter().zip(&screens).map(|(d, s)| bootstrap_draws(d, s, 50, seed)).collect();
    for b in 0..draws[0].len() {
        if !close(draws[0][b], draws[1][b], 1e-10) || !close(draws[0][b], draws[2][b], 1e-10) {
            return Err(format!("bootstrap draw {b} moved"));
        }
    }
    let recs: Vec<_> = stats
        .iter()
        .zip(&screens)
        .map(|(d, s)| multiplier_bootstrap(d, s, 200, seed).unwrap())
        .collect();
    match (recs[0].t_stat, recs[1].t_stat, recs[2].t_stat) {
        (Some(a), Some(b), Some(c)) if close(a, b, 1e-10) && close(a, c, 1e-10) => {}
        (None, None, None) => {}
        other => return Err(format!("T moved: {other:?}")),
    }
    if recs[0].p_value != recs[1].p_value || recs[0].p_value != recs[2].p_value {
        return Err(format!(
            "p-value moved: {} {} {}",
            recs[0].p_value, recs[1].p_value, recs[2].p_value
        ));
    }
    Ok(())
}

/// `T <= 0` exactly for the cv choice and `T > 0` for every other candidate.
pub fn check_argmax(l: &LossMatrix) -> Result<(), String> {
    use cvc::{diff_stats, test_statistic, ScreenSet, Statistic};
    let best = cvc::cv_select(l);
    for m in 0..l.num_candidates() {
        let d = diff_stats(l, m).map_err(|e| e.to_string())?;
        let t = match test_statistic(&d, &ScreenSet::all(&d)) {
            Statistic::Value(t) => t,
            other => return Err(format!("candidate {m}: {other:?}")),
        };
        if (m == best) != (t <= 0.0) {
            return Err(format!("candidate {m} (cv choice {best}) has T = {t}"));
        }
    }
    Ok(())
}
