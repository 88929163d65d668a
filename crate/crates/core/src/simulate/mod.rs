//! Synthetic-data generators and experiment harnesses.

mod example1;
mod generate;
mod sim1;
mod sim2;

pub use example1::{run_example1, zero_or_mean_fitter, Example1Report};
pub use generate::{gen_linear_data, mixed_sparse_beta, Covariance, LinearDesign, NoiseKind, SyntheticData};
pub use sim1::{enumerate_subsets, run_sim1, Sim1Config, Sim1Record, Sim1Report};
pub use sim2::{
    fit_risks, oracle_best_lambda, run_sim2, BetaKind, MethodOutcome, MethodSummary, SigmaKind, Sim2Config,
    Sim2Record, Sim2Report,
};

/// Median with the midpoint convention for even lengths; NaN when empty.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}
