//! Loss-matrix construction, per-candidate tests and selection rules.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contrast::{diff_stats, LossMatrix};
use crate::data::{validate_candidates, CandidateModel, CandidateSpec, Dataset};
use crate::error::{CvcError, Result};
use crate::folds::{make_folds, make_split, FoldPlan};
use crate::models::{Fitter, LinearModel};
use crate::testing::{
    default_alpha_prime, inequality_screen, multiplier_bootstrap, PValueRecord, ScreenSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ValidationMode {
    VFold,
    SampleSplit { train_fraction: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvcConfig {
    pub folds: usize,
    pub alpha: f64,
    /// Screening level; `None` means `alpha / 10`.
    pub alpha_prime: Option<f64>,
    pub screen: bool,
    pub bootstrap_reps: usize,
    pub seed: u64,
    pub mode: ValidationMode,
}

impl Default for CvcConfig {
    fn default() -> Self {
        CvcConfig {
            folds: 5,
            alpha: 0.05,
            alpha_prime: None,
            screen: true,
            bootstrap_reps: 200,
            seed: 0,
            mode: ValidationMode::VFold,
        }
    }
}

impl CvcConfig {
    pub fn with_seed(seed: u64) -> Self {
        CvcConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn effective_alpha_prime(&self) -> f64 {
        self.alpha_prime.unwrap_or_else(|| default_alpha_prime(self.alpha))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(CvcError::InvalidConfig(format!(
                "alpha must lie in (0, 0.5), got {}",
                self.alpha
            )));
        }
        let ap = self.effective_alpha_prime();
        if !(ap > 0.0 && ap < 1.0) {
            return Err(CvcError::InvalidConfig(format!(
                "alpha' must lie in (0, 1), got {ap}"
            )));
        }
        if self.bootstrap_reps == 0 {
            return Err(CvcError::InvalidConfig("bootstrap replications must be >= 1".into()));
        }
        match self.mode {
            ValidationMode::VFold if self.folds < 2 => Err(CvcError::InvalidConfig(format!(
                "need at least 2 folds, got {}",
                self.folds
            ))),
            ValidationMode::SampleSplit { train_fraction }
                if !(train_fraction > 0.0 && train_fraction < 1.0) =>
            {
                Err(CvcError::InvalidConfig(format!(
                    "train fraction must lie in (0, 1), got {train_fraction}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Validation plan for `n` samples under this configuration.
    pub fn plan(&self, n: usize) -> Result<FoldPlan> {
        match self.mode {
            ValidationMode::VFold => make_folds(n, self.folds, self.seed),
            ValidationMode::SampleSplit { train_fraction } => {
                let n_train = ((n as f64) * train_fraction).round() as usize;
                make_split(n, n_train.clamp(1, n.saturating_sub(1)), self.seed)
            }
        }
    }
}

/// Fits every candidate on each group's complement and scores the group.
pub fn compute_loss_matrix<F, L>(
    data: &Dataset,
    candidates: &[CandidateModel],
    plan: &FoldPlan,
    fitter: &F,
    loss: L,
) -> Result<LossMatrix>
where
    F: Fitter + ?Sized,
    L: Fn(f64, f64) -> f64 + Sync,
{
    cross_validate(data, candidates, plan, fitter, loss).map(|(losses, _)| losses)
}

/// Like [`compute_loss_matrix`], also returning the fitted models: entry
/// `[v][m]` is candidate `m` fitted without group `v`.
pub fn cross_validate<F, L>(
    data: &Dataset,
    candidates: &[CandidateModel],
    plan: &FoldPlan,
    fitter: &F,
    loss: L,
) -> Result<(LossMatrix, Vec<Vec<LinearModel>>)>
where
    F: Fitter + ?Sized,
    L: Fn(f64, f64) -> f64 + Sync,
{
    if plan.n() != data.n() {
        return Err(CvcError::DimensionMismatch(format!(
            "plan covers {} samples, dataset has {}",
            plan.n(),
            data.n()
        )));
    }
    let rows = plan.scored_rows();
    let mut row_of = vec![usize::MAX; data.n()];
    for (r, &i) in rows.iter().enumerate() {
        row_of[i] = r;
    }
    let m_total = candidates.len();
    let fits: Vec<Vec<LinearModel>> = (0..plan.num_groups())
        .into_par_iter()
        .map(|v| {
            let train = data.select_rows(&plan.train_indices(v));
            let models = fitter
                .fit(&train, candidates)
                .map_err(|source| CvcError::Fit { fold: v, source })?;
            if models.len() != m_total {
                return Err(CvcError::DimensionMismatch(format!(
                    "fitter returned {} models for {m_total} candidates",
                    models.len()
                )));
            }
            Ok(models)
        })
        .collect::<Result<_>>()?;
    let mut values = Array2::zeros((rows.len(), m_total));
    for (v, models) in fits.iter().enumerate() {
        for &i in plan.group(v) {
            let xi = data.x.row(i);
            for (m, model) in models.iter().enumerate() {
                values[[row_of[i], m]] = loss(model.predict(xi), data.y[i]);
            }
        }
    }
    Ok((LossMatrix::from_plan(values, plan)?, fits))
}

/// Candidate with the smallest mean validated loss; ties go to the smaller id.
pub fn cv_select(losses: &LossMatrix) -> usize {
    let means = losses.mean_losses();
    let mut best = 0;
    for (m, &v) in means.iter().enumerate() {
        if v < means[best] {
            best = m;
        }
    }
    best
}

/// Screen and bootstrap every candidate.
pub fn cvc_pvalues(losses: &LossMatrix, config: &CvcConfig) -> Result<Vec<PValueRecord>> {
    config.validate()?;
    let m_total = losses.num_candidates();
    if m_total == 1 {
        return Ok(vec![PValueRecord::vacuous(0, config.bootstrap_reps, config.seed)]);
    }
    let alpha_prime = config.effective_alpha_prime();
    (0..m_total)
        .into_par_iter()
        .map(|m| {
            let d = diff_stats(losses, m)?;
            let screen = if config.screen {
                inequality_screen(&d, alpha_prime, m_total, losses.n())?
            } else {
                ScreenSet::all(&d)
            };
            multiplier_bootstrap(&d, &screen, config.bootstrap_reps, config.seed)
        })
        .collect()
}

/// `{m : p_m >= alpha}`
pub fn confidence_set(pvalues: &[PValueRecord], alpha: f64) -> Vec<usize> {
    pvalues
        .iter()
        .filter(|r| r.p_value >= alpha)
        .map(|r| r.focal)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvcResult {
    pub pvalues: Vec<PValueRecord>,
    pub confidence_set: Vec<usize>,
    /// Size of `{m : p_m >= alpha}` before the empty-set fallback.
    pub raw_set_size: usize,
    /// The raw set was empty and was replaced by `{cv_choice}`.
    pub empty_fallback: bool,
    pub cv_choice: usize,
    pub parsimonious_choice: Option<usize>,
    pub loss_means: Vec<f64>,
    pub alpha: f64,
}

impl CvcResult {
    pub fn contains(&self, m: usize) -> bool {
        self.confidence_set.contains(&m)
    }
}

/// Tests on an existing loss matrix. `candidates` (if given) enables the
/// parsimonious choice.
pub fn cvc_from_losses(
    losses: &LossMatrix,
    candidates: Option<&[CandidateModel]>,
    config: &CvcConfig,
) -> Result<CvcResult> {
    let pvalues = cvc_pvalues(losses, config)?;
    let cv_choice = cv_select(losses);
    let raw = confidence_set(&pvalues, config.alpha);
    let raw_set_size = raw.len();
    let empty_fallback = raw.is_empty();
    let confidence_set = if empty_fallback { vec![cv_choice] } else { raw };
    let parsimonious_choice = match candidates {
        Some(c) => Some(most_parsimonious(&confidence_set, c)?),
        None => None,
    };
    Ok(CvcResult {
        pvalues,
        confidence_set,
        raw_set_size,
        empty_fallback,
        cv_choice,
        parsimonious_choice,
        loss_means: losses.mean_losses().to_vec(),
        alpha: config.alpha,
    })
}

/// Full procedure: split, fit, score, test, select.
pub fn cvc_run<F, L>(
    data: &Dataset,
    candidates: &[CandidateModel],
    config: &CvcConfig,
    fitter: &F,
    loss: L,
) -> Result<CvcResult>
where
    F: Fitter + ?Sized,
    L: Fn(f64, f64) -> f64 + Sync,
{
    config.validate()?;
    if candidates.is_empty() {
        return Err(CvcError::InvalidConfig("no candidates".into()));
    }
    validate_candidates(candidates, data.p())?;
    let plan = config.plan(data.n())?;
    let losses = compute_loss_matrix(data, candidates, &plan, fitter, loss)?;
    cvc_from_losses(&losses, Some(candidates), config)
}

/// Most parsimonious member of `set`: fewest terms for subset candidates
/// (ties to the smaller id), largest penalty for penalty candidates.
pub fn most_parsimonious(set: &[usize], candidates: &[CandidateModel]) -> Result<usize> {
    if set.is_empty() {
        return Err(CvcError::EmptyConfidenceSet);
    }
    let lookup = |m: usize| {
        candidates
            .get(m)
            .ok_or_else(|| CvcError::InvalidConfig(format!("unknown candidate {m}")))
    };
    let mut best = set[0];
    for &m in set {
        let (cand, incumbent) = (lookup(m)?, lookup(best)?);
        let better = match (&cand.spec, &incumbent.spec) {
            (CandidateSpec::Subset { features: a }, CandidateSpec::Subset { features: b }) => {
                (a.len(), m) < (b.len(), best)
            }
            (CandidateSpec::Lambda { lambda: a }, CandidateSpec::Lambda { lambda: b }) => {
                a > b || (a == b && m < best)
            }
            _ => {
                return Err(CvcError::InvalidConfig(
                    "cannot rank subset and penalty candidates together".into(),
                ))
            }
        };
        if better {
            best = m;
        }
    }
    Ok(best)
}

/// Largest penalty whose mean loss is within one standard error of the
/// minimum. The standard error is the standard deviation of the group-level
/// mean losses of the minimizer divided by `sqrt(G)`.
pub fn one_se_rule(losses: &LossMatrix, candidates: &[CandidateModel]) -> Result<usize> {
    if candidates.len() != losses.num_candidates() {
        return Err(CvcError::DimensionMismatch(format!(
            "{} candidates for {} loss columns",
            candidates.len(),
            losses.num_candidates()
        )));
    }
    let lambdas: Vec<f64> = candidates
        .iter()
        .map(|c| {
            c.penalty().ok_or_else(|| {
                CvcError::InvalidConfig("one-standard-error rule needs penalty candidates".into())
            })
        })
        .collect::<Result<_>>()?;
    let means = losses.mean_losses();
    let best = cv_select(losses);
    let bound = means[best] + fold_standard_error(losses, best);
    let mut choice = best;
    for m in 0..candidates.len() {
        if means[m] <= bound && lambdas[m] > lambdas[choice] {
            choice = m;
        }
    }
    Ok(choice)
}

/// Standard error of candidate `m`'s risk estimate from its group means.
pub fn fold_standard_error(losses: &LossMatrix, m: usize) -> f64 {
    let g = losses.num_groups();
    if g < 2 {
        return 0.0;
    }
    let col = losses.group_means().column(m).to_owned();
    let mean = col.sum() / g as f64;
    let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (g - 1) as f64;
    (var / g as f64).sqrt()
}

/// Penalty for the final full-data fit: `sqrt(1 - 1/V) * lambda`.
pub fn rescale_lambda(lambda: f64, folds: usize) -> f64 {
    (1.0 - 1.0 / folds as f64).sqrt() * lambda
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::squared_loss;
    use crate::models::{LinearModel, OlsSubsetFitter};
    use ndarray::{array, Array1};

    fn losses_with_means(means: &[f64]) -> LossMatrix {
        let n = 4;
        let wiggle = [0.1, -0.1, 0.2, -0.2];
        let values = Array2::from_shape_fn((n, means.len()), |(i, m)| means[m] + wiggle[i]);
        LossMatrix::with_groups(values, vec![0, 0, 1, 1]).unwrap()
    }

    #[test]
    fn cv_select_argmin_and_ties() {
        assert_eq!(cv_select(&losses_with_means(&[2.0, 1.0, 3.0])), 1);
        assert_eq!(cv_select(&losses_with_means(&[1.0, 1.0])), 0);
    }

    #[test]
    fn parsimony_rules() {
        let subsets = vec![
            CandidateModel::subset(0, vec![0, 1, 2]),
            CandidateModel::subset(1, vec![0]),
            CandidateModel::subset(2, vec![1, 2]),
            CandidateModel::subset(3, vec![0, 1, 2, 3]),
            CandidateModel::subset(4, vec![0, 3]),
        ];
        assert_eq!(most_parsimonious(&[0, 1], &subsets).unwrap(), 1);
        assert_eq!(most_parsimonious(&[4, 2], &subsets).unwrap(), 2);
        let lambdas = vec![
            CandidateModel::lambda(0, 0.1),
            CandidateModel::lambda(1, 0.5),
            CandidateModel::lambda(2, 0.02),
        ];
        assert_eq!(most_parsimonious(&[0, 1, 2], &lambdas).unwrap(), 1);
        assert!(matches!(
            most_parsimonious(&[], &lambdas),
            Err(CvcError::EmptyConfidenceSet)
        ));
    }

    #[test]
    fn rescale_examples() {
        assert!((rescale_lambda(1.0, 5) - 0.8f64.sqrt()).abs() < 1e-15);
        assert_eq!(rescale_lambda(0.0, 7), 0.0);
        assert!((rescale_lambda(2.0, 2) - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn one_se_with_identical_losses_picks_largest_lambda() {
        let l = losses_with_means(&[1.0, 1.0, 1.0]);
        let c = vec![
            CandidateModel::lambda(0, 1.0),
            CandidateModel::lambda(1, 0.5),
            CandidateModel::lambda(2, 0.1),
        ];
        assert_eq!(one_se_rule(&l, &c).unwrap(), 0);
    }

    #[test]
    fn one_se_with_zero_band_is_the_minimizer() {
        // every group has the same mean for each candidate, so SE = 0
        let values = array![[3.0, 2.0, 1.0], [3.0, 2.0, 1.0], [3.0, 2.0, 1.0], [3.0, 2.0, 1.0]];
        let l = LossMatrix::with_groups(values, vec![0, 0, 1, 1]).unwrap();
        let c = vec![
            CandidateModel::lambda(0, 1.0),
            CandidateModel::lambda(1, 0.5),
            CandidateModel::lambda(2, 0.1),
        ];
        assert_eq!(one_se_rule(&l, &c).unwrap(), 2);
    }

    #[test]
    fn single_candidate_is_vacuous() {
        let l = LossMatrix::with_groups(array![[1.0], [2.0], [0.5], [4.0]], vec![0, 1, 0, 1])
            .unwrap();
        let r = cvc_from_losses(&l, None, &CvcConfig::default()).unwrap();
        assert_eq!(r.confidence_set, vec![0]);
        assert_eq!(r.pvalues[0].p_value, 1.0);
    }

    #[test]
    fn constant_response_gives_zero_intercept_losses() {
        let x = Array2::from_shape_fn((10, 2), |(i, j)| (i * (j + 2)) as f64 % 7.0);
        let data = Dataset::new(x, Array1::from_elem(10, 4.0)).unwrap();
        let c = vec![CandidateModel::subset(0, vec![])];
        let plan = make_folds(10, 5, 3).unwrap();
        let l = compute_loss_matrix(&data, &c, &plan, &OlsSubsetFitter, squared_loss).unwrap();
        assert!(l.column(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fixed_zero_predictor_losses_are_squared_responses() {
        let y = array![0.3, -1.2, 0.8, 2.0, -0.1, 0.5];
        let data = Dataset::new(Array2::zeros((6, 1)), y.clone()).unwrap();
        let c = vec![CandidateModel::subset(0, vec![]), CandidateModel::subset(1, vec![])];
        let fitter = |train: &Dataset, cands: &[CandidateModel]| {
            let mean = train.y.mean().unwrap();
            Ok(cands
                .iter()
                .map(|c| {
                    let b0 = if c.id == 0 { 0.0 } else { mean };
                    LinearModel::constant(1, b0, c.spec.clone())
                })
                .collect())
        };
        let plan = make_folds(6, 3, 1).unwrap();
        let l = compute_loss_matrix(&data, &c, &plan, &fitter, squared_loss).unwrap();
        for i in 0..6 {
            assert_eq!(l.values()[[i, 0]], y[i] * y[i]);
        }
    }

    #[test]
    fn fit_errors_carry_candidate_and_fold() {
        // duplicate columns make the two-variable subset singular
        let x = Array2::from_shape_fn((10, 2), |(i, _)| i as f64);
        let data = Dataset::new(x, Array1::from_shape_fn(10, |i| (i % 3) as f64)).unwrap();
        let c = vec![CandidateModel::subset(0, vec![0]), CandidateModel::subset(1, vec![0, 1])];
        let err = cvc_run(&data, &c, &CvcConfig::default(), &OlsSubsetFitter, squared_loss)
            .unwrap_err();
        match err {
            CvcError::Fit { source, .. } => assert_eq!(source.candidate(), 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        let mut c = CvcConfig::default();
        assert!(c.validate().is_ok());
        c.alpha = 0.5;
        assert!(c.validate().is_err());
        c = CvcConfig {
            bootstrap_reps: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c = CvcConfig {
            alpha_prime: Some(1.0),
            ..Default::default()
        };
        assert!(c.validate().is_err());
        assert!((CvcConfig::default().effective_alpha_prime() - 0.005).abs() < 1e-15);
    }
}
