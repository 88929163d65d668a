//! Studentized max-statistic tests with Gaussian multiplier bootstrap
//! p-values, plus inequality screening of clearly inferior competitors.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::contrast::{Contrast, DiffStats};
use crate::error::{CvcError, Result};
use crate::rng::{substream, Phase};

/// Competitors retained for the bootstrap comparison of one focal candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenSet {
    pub focal: usize,
    /// Candidate ids of the retained competitors.
    pub kept: Vec<usize>,
    /// Lower bound on the studentized ratio a competitor needs to be kept.
    pub threshold: Option<f64>,
    pub skipped: bool,
}

impl ScreenSet {
    /// Keeps every competitor.
    pub fn all(d: &DiffStats) -> ScreenSet {
        ScreenSet {
            focal: d.focal,
            kept: d.competitors.clone(),
            threshold: None,
            skipped: true,
        }
    }
}

/// Default screening level for a test level `alpha`.
pub fn default_alpha_prime(alpha: f64) -> f64 {
    alpha / 10.0
}

pub fn standard_normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("valid").inverse_cdf(p)
}

/// Drops competitors whose studentized contrast lies far below zero.
///
/// With `z = Phi^{-1}(1 - alpha' / (M - 1))`, competitor `j` is kept when
/// `sqrt(n) mu / sigma >= -2 z / sqrt(1 - z^2 / n)`. If `z^2 >= n` the bound
/// is undefined and every competitor is kept.
pub fn inequality_screen(
    d: &DiffStats,
    alpha_prime: f64,
    m_total: usize,
    n: usize,
) -> Result<ScreenSet> {
    if !(alpha_prime > 0.0 && alpha_prime < 1.0) {
        return Err(CvcError::InvalidConfig(format!(
            "screening level must lie in (0, 1), got {alpha_prime}"
        )));
    }
    if m_total < 2 {
        return Err(CvcError::NoCompetitors);
    }
    let z = standard_normal_quantile(1.0 - alpha_prime / (m_total - 1) as f64);
    let nf = n as f64;
    if z * z >= nf {
        return Ok(ScreenSet::all(d));
    }
    let threshold = -2.0 * z / (1.0 - z * z / nf).sqrt();
    let kept = d
        .competitors
        .iter()
        .enumerate()
        .filter(|&(k, _)| d.studentized(k) >= threshold)
        .map(|(_, &j)| j)
        .collect();
    Ok(ScreenSet {
        focal: d.focal,
        kept,
        threshold: Some(threshold),
        skipped: false,
    })
}

/// Value of the max statistic over the retained competitors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Statistic {
    Value(f64),
    /// Every retained competitor is identical to, or dominated by, the focal
    /// candidate with zero spread.
    NoContrast,
    /// Some retained competitor beats the focal candidate at every sample.
    FocalDominated,
    /// Screening removed every competitor.
    Empty,
}

/// Positions (into `d.competitors`) of kept, non-degenerate columns, or the
/// resolved statistic if degenerate columns decide the test.
fn active_columns(d: &DiffStats, s: &ScreenSet) -> std::result::Result<Vec<usize>, Statistic> {
    if s.kept.is_empty() {
        return Err(Statistic::Empty);
    }
    let mut active = Vec::with_capacity(s.kept.len());
    for &j in &s.kept {
        let Some(k) = d.competitors.iter().position(|&c| c == j) else {
            continue;
        };
        match d.contrast(k) {
            Contrast::Finite(_) => active.push(k),
            Contrast::FocalWorse => return Err(Statistic::FocalDominated),
            Contrast::FocalBetter | Contrast::Identical => {}
        }
    }
    if active.is_empty() {
        Err(Statistic::NoContrast)
    } else {
        Ok(active)
    }
}

/// `T = max_j sqrt(n) mu_j / sigma_j` over the retained competitors.
pub fn test_statistic(d: &DiffStats, s: &ScreenSet) -> Statistic {
    match active_columns(d, s) {
        Err(resolved) => resolved,
        Ok(active) => Statistic::Value(
            active
                .iter()
                .map(|&k| d.studentized(k))
                .fold(f64::NEG_INFINITY, f64::max),
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestOutcome {
    Bootstrap,
    NoContrast,
    FocalDominated,
    AllScreened,
    SingleCandidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValueRecord {
    pub focal: usize,
    /// `None` when the test was decided without a finite statistic.
    pub t_stat: Option<f64>,
    pub p_value: f64,
    pub bootstrap_reps: usize,
    pub exceedances: usize,
    pub outcome: TestOutcome,
    pub screen: ScreenSet,
    pub seed: u64,
}

impl PValueRecord {
    /// Record for a candidate without competitors.
    pub fn vacuous(focal: usize, bootstrap_reps: usize, seed: u64) -> Self {
        PValueRecord {
            focal,
            t_stat: None,
            p_value: 1.0,
            bootstrap_reps,
            exceedances: 0,
            outcome: TestOutcome::SingleCandidate,
            screen: ScreenSet {
                focal,
                kept: Vec::new(),
                threshold: None,
                skipped: true,
            },
            seed,
        }
    }
}

/// Studentized, group-centered columns `(xi - mu^(v)) / sigma`, one `Vec` per
/// active competitor.
fn standardized_columns(d: &DiffStats, active: &[usize]) -> Vec<Vec<f64>> {
    active
        .iter()
        .map(|&k| {
            let inv = 1.0 / d.scales[k];
            d.centered.column(k).iter().map(|v| v * inv).collect()
        })
        .collect()
}

/// One bootstrap replicate: multipliers are drawn once per sample and shared
/// across all competitor columns.
fn replicate(columns: &[Vec<f64>], n: usize, focal: usize, b: usize, seed: u64) -> f64 {
    let mut rng = substream(seed, Phase::Multiplier, focal as u64, b as u64);
    let zeta: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let scale = 1.0 / (n as f64).sqrt();
    columns
        .iter()
        .map(|col| col.iter().zip(&zeta).map(|(c, z)| c * z).sum::<f64>() * scale)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Bootstrap draws `T*_1..T*_B`; empty when degenerate columns decide the test.
pub fn bootstrap_draws(d: &DiffStats, s: &ScreenSet, reps: usize, seed: u64) -> Vec<f64> {
    let Ok(active) = active_columns(d, s) else {
        return Vec::new();
    };
    let columns = standardized_columns(d, &active);
    let n = d.n();
    (0..reps)
        .into_par_iter()
        .map(|b| replicate(&columns, n, d.focal, b, seed))
        .collect()
}

/// Gaussian multiplier bootstrap p-value `B^{-1} #{b : T*_b > T}`.
pub fn multiplier_bootstrap(
    d: &DiffStats,
    s: &ScreenSet,
    reps: usize,
    seed: u64,
) -> Result<PValueRecord> {
    if reps == 0 {
        return Err(CvcError::InvalidConfig("bootstrap replications must be >= 1".into()));
    }
    let record = |t_stat, p_value, exceedances, outcome| PValueRecord {
        focal: d.focal,
        t_stat,
        p_value,
        bootstrap_reps: reps,
        exceedances,
        outcome,
        screen: s.clone(),
        seed,
    };
    let t = match test_statistic(d, s) {
        Statistic::Value(t) => t,
        Statistic::NoContrast => return Ok(record(None, 1.0, 0, TestOutcome::NoContrast)),
        Statistic::Empty => return Ok(record(None, 1.0, 0, TestOutcome::AllScreened)),
        Statistic::FocalDominated => {
            return Ok(record(None, 0.0, 0, TestOutcome::FocalDominated))
        }
    };
    let draws = bootstrap_draws(d, s, reps, seed);
    let exceed = draws.iter().filter(|&&tb| tb > t).count();
    Ok(record(
        Some(t),
        exceed as f64 / reps as f64,
        exceed,
        TestOutcome::Bootstrap,
    ))
}

/// Empirical moment ratios `(q!)^{-1} (mean |z|^q)^{1/q}` of the standardized
/// vector, for judging a sub-exponential tail: ratios that stay flat or
/// shrink as `q` grows are consistent with a finite psi_1 norm.
///
/// Standardization uses the divisor `n`, so the `q = 2` moment is exactly 1.
pub fn psi1_diagnostic(values: &[f64], q_list: &[u32]) -> Result<Vec<(u32, f64)>> {
    if values.len() < 2 {
        return Err(CvcError::Degenerate("need at least two values".into()));
    }
    if let Some(&q) = q_list.iter().find(|&&q| !(1..=8).contains(&q)) {
        return Err(CvcError::InvalidConfig(format!("moment order {q} outside 1..=8")));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if !(sd > 0.0) {
        return Err(CvcError::Degenerate("zero standard deviation".into()));
    }
    let z: Vec<f64> = values.iter().map(|v| ((v - mean) / sd).abs()).collect();
    Ok(q_list
        .iter()
        .map(|&q| {
            let moment = z.iter().map(|a| a.powi(q as i32)).sum::<f64>() / n;
            let factorial: f64 = (1..=q).map(f64::from).product();
            (q, moment.powf(1.0 / f64::from(q)) / factorial)
        })
        .collect())
}
