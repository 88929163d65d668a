//! Subset-selection study: all intercept-containing submodels of a linear
//! model with four covariates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{gen_linear_data, Covariance, LinearDesign, NoiseKind};
use super::median;
use crate::data::{squared_loss, CandidateModel, CandidateSpec};
use crate::engine::{cvc_run, CvcConfig};
use crate::error::{CvcError, Result};
use crate::models::OlsSubsetFitter;
use crate::rng::{derive_seed, Phase};

/// Every subset of `terms` model terms that keeps term 0, the intercept.
/// Subsets are ordered by size, then lexicographically; features are the
/// remaining `terms - 1` covariates, numbered from 0.
pub fn enumerate_subsets(terms: usize) -> Vec<CandidateModel> {
    assert!((1..=20).contains(&terms), "term count {terms} out of range");
    let k = terms - 1;
    let mut subsets: Vec<Vec<usize>> = (0u32..1 << k)
        .map(|mask| (0..k).filter(|&b| mask & (1 << b) != 0).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
        .into_iter()
        .enumerate()
        .map(|(id, f)| CandidateModel::subset(id, f))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sim1Config {
    pub n: usize,
    /// Intercept followed by four slopes.
    pub beta: [f64; 5],
    pub noise: NoiseKind,
    pub noise_scale: f64,
    pub reps: usize,
    pub seed: u64,
    pub cvc: CvcConfig,
}

impl Sim1Config {
    pub const SPARSE: [f64; 5] = [2.0, 0.0, 0.0, 4.0, 0.0];
    pub const DENSE: [f64; 5] = [2.0, 9.0, 0.0, 4.0, 8.0];

    pub fn new(n: usize, beta: [f64; 5], reps: usize, seed: u64) -> Self {
        Sim1Config {
            n,
            beta,
            noise: NoiseKind::Gaussian,
            noise_scale: 1.0,
            reps,
            seed,
            cvc: CvcConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta[0] == 0.0 {
            return Err(CvcError::InvalidConfig("intercept must be nonzero".into()));
        }
        if self.noise_scale != 1.0 && self.noise_scale != 2.0 {
            return Err(CvcError::InvalidConfig(format!(
                "noise scale must be 1 or 2, got {}",
                self.noise_scale
            )));
        }
        if self.reps == 0 {
            return Err(CvcError::InvalidConfig("reps must be >= 1".into()));
        }
        self.cvc.validate()
    }

    /// Covariates with a nonzero slope.
    pub fn true_support(&self) -> Vec<usize> {
        (1..5).filter(|&k| self.beta[k] != 0.0).map(|k| k - 1).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sim1Record {
    pub rep: usize,
    pub cv_choice: Option<usize>,
    pub cvc_choice: Option<usize>,
    pub cv_correct: bool,
    pub cvc_correct: bool,
    pub set_size: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sim1Report {
    pub config: Sim1Config,
    pub cv_rate: f64,
    pub cvc_rate: f64,
    pub median_set_size: f64,
    pub mean_set_size: f64,
    pub errors: usize,
    pub records: Vec<Sim1Record>,
}

pub fn run_sim1(config: &Sim1Config) -> Result<Sim1Report> {
    config.validate()?;
    let candidates = enumerate_subsets(5);
    let truth = config.true_support();
    let is_truth = |m: usize| match &candidates[m].spec {
        CandidateSpec::Subset { features } => *features == truth,
        CandidateSpec::Lambda { .. } => false,
    };
    let design = LinearDesign {
        n: config.n,
        intercept: config.beta[0],
        beta: config.beta[1..].to_vec(),
        covariance: Covariance::Identity,
        noise: config.noise,
        noise_scale: config.noise_scale,
    };

    let records: Vec<Sim1Record> = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let rep_seed = derive_seed(config.seed, Phase::Repetition, rep as u64, config.n as u64);
            let outcome = gen_linear_data(&design, rep_seed).and_then(|s| {
                let cvc = CvcConfig {
                    seed: rep_seed,
                    ..config.cvc.clone()
                };
                cvc_run(&s.data, &candidates, &cvc, &OlsSubsetFitter, squared_loss)
            });
            match outcome {
                Ok(r) => {
                    let pick = r.parsimonious_choice.expect("candidates supplied");
                    Sim1Record {
                        rep,
                        cv_choice: Some(r.cv_choice),
                        cvc_choice: Some(pick),
                        cv_correct: is_truth(r.cv_choice),
                        cvc_correct: is_truth(pick),
                        set_size: Some(r.raw_set_size),
                        error: None,
                    }
                }
                Err(e) => Sim1Record {
                    rep,
                    cv_choice: None,
                    cvc_choice: None,
                    cv_correct: false,
                    cvc_correct: false,
                    set_size: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let reps = records.len() as f64;
    let sizes: Vec<f64> = records.iter().filter_map(|r| r.set_size).map(|s| s as f64).collect();
    Ok(Sim1Report {
        config: config.clone(),
        cv_rate: records.iter().filter(|r| r.cv_correct).count() as f64 / reps,
        cvc_rate: records.iter().filter(|r| r.cvc_correct).count() as f64 / reps,
        median_set_size: median(&sizes),
        mean_set_size: if sizes.is_empty() {
            f64::NAN
        } else {
            sizes.iter().sum::<f64>() / sizes.len() as f64
        },
        errors: records.iter().filter(|r| r.error.is_some()).count(),
        records,
    })
}
