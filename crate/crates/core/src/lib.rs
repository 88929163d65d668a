//! Cross-validation with confidence.
//!
//! For each candidate model (a variable subset or a penalty level) the
//! library tests whether it attains the smallest cross-validated risk, using
//! a studentized Gaussian multiplier bootstrap of the per-sample loss
//! differences. Candidates that survive form a confidence set; the usual
//! cross-validation pick always belongs to it with high probability, and
//! the most parsimonious member is a less overfit alternative.
//!
//! ```no_run
//! use cvc::{cvc_run, squared_loss, CvcConfig, OlsSubsetFitter};
//! use cvc::simulate::enumerate_subsets;
//! # fn demo(data: &cvc::Dataset) -> cvc::Result<()> {
//! let candidates = enumerate_subsets(data.p() + 1);
//! let result = cvc_run(data, &candidates, &CvcConfig::with_seed(7), &OlsSubsetFitter, squared_loss)?;
//! println!("confidence set: {:?}", result.confidence_set);
//! # Ok(()) }
//! ```

pub mod contrast;
pub mod data;
pub mod engine;
pub mod error;
pub mod folds;
pub mod io;
pub mod models;
pub mod rng;
pub mod simulate;
pub mod testing;

pub use contrast::{diff_stats, Contrast, DiffStats, LossMatrix};
pub use data::{squared_loss, CandidateModel, CandidateSpec, Dataset};
pub use engine::{
    compute_loss_matrix, confidence_set, cross_validate, cv_select, cvc_from_losses, cvc_pvalues, cvc_run,
    most_parsimonious, one_se_rule, rescale_lambda, CvcConfig, CvcResult, ValidationMode,
};
pub use error::{CvcError, FitError, ParseError, Result};
pub use folds::{make_folds, make_split, FoldPlan, PlanMode};
pub use models::{
    fit_lasso, fit_lasso_path, fit_ols_subset, lasso_path, population_risk, Fitter, LambdaPath,
    LassoFitter, LassoOptions, LinearModel, OlsSubsetFitter,
};
pub use testing::{
    bootstrap_draws, inequality_screen, multiplier_bootstrap, psi1_diagnostic, test_statistic,
    PValueRecord, ScreenSet, Statistic, TestOutcome,
};
