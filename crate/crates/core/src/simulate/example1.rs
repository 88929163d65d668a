//! Pure-noise response with two candidates: the zero predictor and the
//! training-mean predictor. The zero predictor is always better, yet plain
//! validation picks the mean model with positive probability.

use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{squared_loss, CandidateModel, Dataset};
use crate::engine::{cvc_run, CvcConfig, ValidationMode};
use crate::error::{FitError, Result};
use crate::models::LinearModel;
use crate::rng::{derive_seed, substream, Phase};

/// Fits candidate 0 as the constant 0 and every other candidate as the
/// training mean.
pub fn zero_or_mean_fitter(
    train: &Dataset,
    candidates: &[CandidateModel],
) -> std::result::Result<Vec<LinearModel>, FitError> {
    let mean = train.y.mean().unwrap_or(0.0);
    Ok(candidates
        .iter()
        .map(|c| {
            let b0 = if c.id == 0 { 0.0 } else { mean };
            LinearModel::constant(train.p(), b0, c.spec.clone())
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Report {
    pub n: usize,
    pub train_fraction: f64,
    pub reps: usize,
    /// Share of reps in which plain validation picked the mean model.
    pub overfit_rate: f64,
    /// Share of reps whose confidence set contains the zero model.
    pub zero_model_coverage: f64,
}

pub fn run_example1(
    n: usize,
    train_fraction: f64,
    reps: usize,
    seed: u64,
    base: &CvcConfig,
) -> Result<Example1Report> {
    let candidates = vec![CandidateModel::subset(0, vec![]), CandidateModel::subset(1, vec![])];
    let outcomes = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let rep_seed = derive_seed(seed, Phase::Repetition, rep as u64, n as u64);
            let mut rng = substream(rep_seed, Phase::Data, n as u64, 1);
            let y = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let data = Dataset::new(Array2::zeros((n, 1)), y)?;
            let config = CvcConfig {
                seed: rep_seed,
                mode: ValidationMode::SampleSplit { train_fraction },
                ..base.clone()
            };
            let r = cvc_run(&data, &candidates, &config, &zero_or_mean_fitter, squared_loss)?;
            Ok((r.cv_choice == 1, r.contains(0)))
        })
        .collect::<Result<Vec<(bool, bool)>>>()?;
    let count = |f: fn(&(bool, bool)) -> bool| outcomes.iter().filter(|o| f(o)).count() as f64;
    Ok(Example1Report {
        n,
        train_fraction,
        reps,
        overfit_rate: count(|o| o.0) / reps as f64,
        zero_model_coverage: count(|o| o.1) / reps as f64,
    })
}
