//! Lasso tuning study: penalty choice by cv, cvc and the one-standard-error
//! rule, judged by closed-form population risk.

use ndarray::{Array1, Array2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{gen_linear_data, mixed_sparse_beta, Covariance, LinearDesign, NoiseKind};
use super::median;
use crate::data::{squared_loss, CandidateModel};
use crate::engine::{cross_validate, cvc_from_losses, one_se_rule, rescale_lambda, CvcConfig};
use crate::error::{CvcError, Result};
use crate::folds::make_folds;
use crate::models::{
    fit_lasso, fit_lasso_path, lasso_path, population_risk, LambdaPath, LassoFitter, LinearModel,
};
use crate::rng::{derive_seed, Phase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaKind {
    Identity,
    /// Off-diagonal entries 0.5.
    Correlated,
}

impl SigmaKind {
    pub fn covariance(self) -> Covariance {
        match self {
            SigmaKind::Identity => Covariance::Identity,
            SigmaKind::Correlated => Covariance::Equicorrelated { rho: 0.5 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaKind {
    /// `s = 5`
    Sparse,
    /// `s = 25`
    Dense,
}

impl BetaKind {
    pub fn s(self) -> usize {
        match self {
            BetaKind::Sparse => 5,
            BetaKind::Dense => 25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sim2Config {
    pub n: usize,
    pub p: usize,
    pub sigma_kind: SigmaKind,
    pub beta_kind: BetaKind,
    pub reps: usize,
    pub path_len: usize,
    pub seed: u64,
    pub cvc: CvcConfig,
}

impl Default for Sim2Config {
    fn default() -> Self {
        Sim2Config {
            n: 200,
            p: 200,
            sigma_kind: SigmaKind::Identity,
            beta_kind: BetaKind::Sparse,
            reps: 100,
            path_len: 50,
            seed: 0,
            cvc: CvcConfig::default(),
        }
    }
}

impl Sim2Config {
    pub fn setting_name(&self) -> String {
        let b = match self.beta_kind {
            BetaKind::Sparse => "sparse",
            BetaKind::Dense => "dense",
        };
        let s = match self.sigma_kind {
            SigmaKind::Identity => "identity",
            SigmaKind::Correlated => "correlated",
        };
        format!("{b}/{s}")
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(CvcError::InvalidConfig("reps must be >= 1".into()));
        }
        if self.path_len < 2 {
            return Err(CvcError::InvalidConfig("path needs at least 2 values".into()));
        }
        if 2 * self.beta_kind.s() > self.p {
            return Err(CvcError::InvalidConfig(format!(
                "p = {} too small for s = {}",
                self.p,
                self.beta_kind.s()
            )));
        }
        self.cvc.validate()
    }
}

/// Population risk of each fit.
pub fn fit_risks(
    fits: &[LinearModel],
    beta: &Array1<f64>,
    sigma: &Array2<f64>,
    noise_var: f64,
) -> Result<Vec<f64>> {
    fits.iter()
        .map(|f| population_risk(f.coefficients.view(), beta.view(), sigma, noise_var))
        .collect()
}

/// Index of the path value with the smallest risk; ties go to the larger
/// penalty.
pub fn oracle_best_lambda(path: &LambdaPath, risks: &[f64]) -> Result<usize> {
    if risks.len() != path.values.len() || risks.is_empty() {
        return Err(CvcError::DimensionMismatch(format!(
            "{} risks for {} penalties",
            risks.len(),
            path.values.len()
        )));
    }
    let mut best = 0;
    for k in 1..risks.len() {
        let better = risks[k] < risks[best]
            || (risks[k] == risks[best] && path.values[k] > path.values[best]);
        if better {
            best = k;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub lambda: f64,
    pub risk: f64,
    pub nonzeros: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sim2Record {
    pub rep: usize,
    pub cv: MethodOutcome,
    pub cvc: MethodOutcome,
    pub one_se: MethodOutcome,
    /// Minimizer of the fold-averaged risk `V^{-1} sum_v Q(f_lambda^(v))`,
    /// the quantity cross-validation estimates.
    pub oracle_lambda: f64,
    pub oracle_risk: f64,
    pub covered: bool,
    /// Minimizer of the risk of the full-data fit at each grid value.
    pub full_data_oracle_lambda: f64,
    pub full_data_covered: bool,
    pub set_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub median_risk: f64,
    pub median_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sim2Report {
    pub config: Sim2Config,
    pub setting: String,
    pub methods: Vec<MethodSummary>,
    pub coverage: f64,
    pub full_data_coverage: f64,
    pub median_set_size: f64,
    pub records: Vec<Sim2Record>,
}

fn outcome(model: &LinearModel, lambda: f64, beta: &Array1<f64>, sigma: &Array2<f64>) -> Result<MethodOutcome> {
    Ok(MethodOutcome {
        lambda,
        risk: population_risk(model.coefficients.view(), beta.view(), sigma, 1.0)?,
        nonzeros: model.nonzeros(),
    })
}

fn run_rep(config: &Sim2Config, rep: usize) -> Result<Sim2Record> {
    let rep_seed = derive_seed(config.seed, Phase::Repetition, rep as u64, config.p as u64);
    let beta = mixed_sparse_beta(config.p, config.beta_kind.s(), rep_seed)?;
    let design = LinearDesign {
        n: config.n,
        intercept: 0.0,
        beta,
        covariance: config.sigma_kind.covariance(),
        noise: NoiseKind::Gaussian,
        noise_scale: 1.0,
    };
    let synth = gen_linear_data(&design, rep_seed)?;
    let data = &synth.data;

    let path = lasso_path(data, config.path_len)?;
    let candidates: Vec<CandidateModel> = path
        .values
        .iter()
        .enumerate()
        .map(|(k, &l)| CandidateModel::lambda(k, l))
        .collect();
    let fitter = LassoFitter::default();
    let plan = make_folds(data.n(), config.cvc.folds, rep_seed)?;
    let (losses, fold_fits) = cross_validate(data, &candidates, &plan, &fitter, squared_loss)?;
    let cvc = CvcConfig {
        seed: rep_seed,
        ..config.cvc.clone()
    };
    let result = cvc_from_losses(&losses, Some(&candidates), &cvc)?;
    let one_se = one_se_rule(&losses, &candidates)?;

    let mut fold_risk = vec![0.0; path.values.len()];
    for fits in &fold_fits {
        for (acc, r) in fold_risk.iter_mut().zip(fit_risks(fits, &synth.beta, &synth.sigma, 1.0)?) {
            *acc += r / fold_fits.len() as f64;
        }
    }
    let oracle = oracle_best_lambda(&path, &fold_risk)?;
    let full = fit_lasso_path(data.x.view(), data.y.view(), &path.values, &fitter.options);
    let full_oracle = oracle_best_lambda(&path, &fit_risks(&full, &synth.beta, &synth.sigma, 1.0)?)?;

    let cvc_pick = result.parsimonious_choice.expect("candidates supplied");
    let cvc_lambda = rescale_lambda(path.values[cvc_pick], config.cvc.folds);
    let cvc_fit = fit_lasso(data.x.view(), data.y.view(), cvc_lambda, &fitter.options);

    Ok(Sim2Record {
        rep,
        cv: outcome(&full[result.cv_choice], path.values[result.cv_choice], &synth.beta, &synth.sigma)?,
        cvc: outcome(&cvc_fit, cvc_lambda, &synth.beta, &synth.sigma)?,
        one_se: outcome(&full[one_se], path.values[one_se], &synth.beta, &synth.sigma)?,
        oracle_lambda: path.values[oracle],
        oracle_risk: fold_risk[oracle],
        covered: result.contains(oracle),
        full_data_oracle_lambda: path.values[full_oracle],
        full_data_covered: result.contains(full_oracle),
        set_size: result.raw_set_size,
    })
}

pub fn run_sim2(config: &Sim2Config) -> Result<Sim2Report> {
    config.validate()?;
    let records = (0..config.reps)
        .into_par_iter()
        .map(|rep| run_rep(config, rep))
        .collect::<Result<Vec<_>>>()?;

    let summarize = |name: &str, pick: fn(&Sim2Record) -> &MethodOutcome| {
        let risks: Vec<f64> = records.iter().map(|r| pick(r).risk).collect();
        let sizes: Vec<f64> = records.iter().map(|r| pick(r).nonzeros as f64).collect();
        MethodSummary {
            method: name.to_string(),
            median_risk: median(&risks),
            median_size: median(&sizes),
        }
    };
    let methods = vec![
        summarize("cv", |r| &r.cv),
        summarize("cvc", |r| &r.cvc),
        summarize("1se", |r| &r.one_se),
    ];
    let set_sizes: Vec<f64> = records.iter().map(|r| r.set_size as f64).collect();
    let share = |f: fn(&Sim2Record) -> bool| {
        records.iter().filter(|r| f(r)).count() as f64 / records.len() as f64
    };
    Ok(Sim2Report {
        setting: config.setting_name(),
        config: config.clone(),
        methods,
        coverage: share(|r| r.covered),
        full_data_coverage: share(|r| r.full_data_covered),
        median_set_size: median(&set_sizes),
        records,
    })
}
