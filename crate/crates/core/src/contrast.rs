//! Cross-validated loss matrices and the per-candidate loss contrasts.

use ndarray::{Array1, Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{CvcError, Result};
use crate::folds::{FoldPlan, PlanMode};

/// A contrast column counts as degenerate when its standard deviation is
/// below this fraction of the loss scale of the two candidates involved.
pub const DEGENERACY_RTOL: f64 = 1e-10;

/// Per-sample validated losses: entry `(r, m)` is the loss of candidate `m`
/// at the `r`-th scored sample, using the model fitted without that sample's
/// group.
#[derive(Debug, Clone, PartialEq)]
pub struct LossMatrix {
    values: Array2<f64>,
    samples: Vec<usize>,
    groups: Vec<usize>,
    num_groups: usize,
    mode: PlanMode,
    candidate_ids: Vec<usize>,
}

impl LossMatrix {
    /// Matrix whose rows follow `plan.scored_rows()`.
    pub fn from_plan(values: Array2<f64>, plan: &FoldPlan) -> Result<Self> {
        let samples = plan.scored_rows();
        if values.nrows() != samples.len() {
            return Err(CvcError::DimensionMismatch(format!(
                "loss matrix has {} rows, plan scores {} samples",
                values.nrows(),
                samples.len()
            )));
        }
        let groups = samples.iter().map(|&i| plan.fold_of(i).unwrap()).collect();
        Self::build(values, samples, groups, plan.num_groups(), plan.mode())
    }

    /// Matrix with explicit per-row group labels in `0..G`.
    pub fn with_groups(values: Array2<f64>, groups: Vec<usize>) -> Result<Self> {
        let num_groups = groups.iter().copied().max().map_or(0, |g| g + 1);
        let mode = if num_groups == 1 {
            PlanMode::SampleSplit
        } else {
            PlanMode::VFold
        };
        let samples = (0..values.nrows()).collect();
        Self::build(values, samples, groups, num_groups, mode)
    }

    /// Single-group matrix, as produced by one train/test split.
    pub fn single_group(values: Array2<f64>) -> Result<Self> {
        let n = values.nrows();
        Self::with_groups(values, vec![0; n])
    }

    fn build(
        values: Array2<f64>,
        samples: Vec<usize>,
        groups: Vec<usize>,
        num_groups: usize,
        mode: PlanMode,
    ) -> Result<Self> {
        if groups.len() != values.nrows() {
            return Err(CvcError::DimensionMismatch(format!(
                "{} group labels for {} rows",
                groups.len(),
                values.nrows()
            )));
        }
        if values.nrows() < 2 {
            return Err(CvcError::InvalidConfig("need at least two scored samples".into()));
        }
        if values.ncols() == 0 {
            return Err(CvcError::InvalidConfig("need at least one candidate".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CvcError::Degenerate("non-finite loss".into()));
        }
        let mut counts = vec![0usize; num_groups];
        for &g in &groups {
            counts[g] += 1;
        }
        if counts.contains(&0) {
            return Err(CvcError::InvalidConfig("empty validation group".into()));
        }
        let candidate_ids = (0..values.ncols()).collect();
        Ok(LossMatrix {
            values,
            samples,
            groups,
            num_groups,
            mode,
            candidate_ids,
        })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn num_candidates(&self) -> usize {
        self.values.ncols()
    }

    pub fn groups(&self) -> &[usize] {
        &self.groups
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    pub fn mode(&self) -> PlanMode {
        self.mode
    }

    /// Original sample index of each row.
    pub fn samples(&self) -> &[usize] {
        &self.samples
    }

    pub fn candidate_ids(&self) -> &[usize] {
        &self.candidate_ids
    }

    pub fn column(&self, m: usize) -> ArrayView1<'_, f64> {
        self.values.column(m)
    }

    /// Cross-validated risk estimate of each candidate (column means).
    pub fn mean_losses(&self) -> Array1<f64> {
        self.values.mean_axis(Axis(0)).expect("nonempty")
    }

    /// Mean loss of each candidate within each group, `G x M`.
    pub fn group_means(&self) -> Array2<f64> {
        let m = self.num_candidates();
        let mut sums = Array2::<f64>::zeros((self.num_groups, m));
        let mut counts = vec![0usize; self.num_groups];
        for (row, &g) in self.values.outer_iter().zip(&self.groups) {
            counts[g] += 1;
            let mut acc = sums.row_mut(g);
            acc += &row;
        }
        for (mut r, &c) in sums.outer_iter_mut().zip(&counts) {
            r /= c as f64;
        }
        sums
    }

    /// Same matrix with the given loss values; grouping is kept.
    pub fn map_values(&self, f: impl Fn(usize, usize, f64) -> f64) -> LossMatrix {
        let mut out = self.clone();
        for ((r, c), v) in out.values.indexed_iter_mut() {
            *v = f(r, c, *v);
        }
        out
    }
}

/// Classification of one contrast column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Contrast {
    /// Studentized mean `sqrt(n) * mean / sd`.
    Finite(f64),
    /// Zero spread, positive mean: the focal candidate is worse at every sample.
    FocalWorse,
    /// Zero spread, negative mean: the focal candidate is better at every sample.
    FocalBetter,
    /// Zero spread and zero mean.
    Identical,
}

/// Loss differences between a focal candidate and every competitor, with
/// group-wise centering and studentization scales.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffStats {
    pub focal: usize,
    pub competitors: Vec<usize>,
    /// `n x (M-1)` raw differences `L[i, focal] - L[i, j]`.
    pub xi: Array2<f64>,
    /// `G x (M-1)` within-group means of `xi`.
    pub fold_means: Array2<f64>,
    /// Average of the group means, per competitor.
    pub overall_means: Array1<f64>,
    /// Sample standard deviation (divisor `n - 1`) of the centered columns.
    pub scales: Array1<f64>,
    /// `xi` minus its group mean.
    pub centered: Array2<f64>,
    pub degenerate_mask: Vec<bool>,
    /// Loss magnitude used to judge degeneracy, per competitor.
    pub reference_scale: Array1<f64>,
    pub groups: Vec<usize>,
    pub num_groups: usize,
}

impl DiffStats {
    pub fn n(&self) -> usize {
        self.xi.nrows()
    }

    pub fn num_competitors(&self) -> usize {
        self.competitors.len()
    }

    /// Classifies competitor column `k` (position in `competitors`).
    pub fn contrast(&self, k: usize) -> Contrast {
        let mu = self.overall_means[k];
        if !self.degenerate_mask[k] {
            return Contrast::Finite((self.n() as f64).sqrt() * mu / self.scales[k]);
        }
        let tol = DEGENERACY_RTOL * self.reference_scale[k];
        if mu > tol {
            Contrast::FocalWorse
        } else if mu < -tol {
            Contrast::FocalBetter
        } else {
            Contrast::Identical
        }
    }

    /// Studentized ratio with degenerate columns mapped to their limits
    /// (`+inf`, `-inf`, or `NaN` for identical columns).
    pub fn studentized(&self, k: usize) -> f64 {
        match self.contrast(k) {
            Contrast::Finite(t) => t,
            Contrast::FocalWorse => f64::INFINITY,
            Contrast::FocalBetter => f64::NEG_INFINITY,
            Contrast::Identical => f64::NAN,
        }
    }
}

fn rms(col: ArrayView1<'_, f64>) -> f64 {
    (col.iter().map(|v| v * v).sum::<f64>() / col.len() as f64).sqrt()
}

/// Builds the contrast statistics of candidate `focal` against all others.
pub fn diff_stats(losses: &LossMatrix, focal: usize) -> Result<DiffStats> {
    let m_total = losses.num_candidates();
    if m_total < 2 {
        return Err(CvcError::NoCompetitors);
    }
    if focal >= m_total {
        return Err(CvcError::InvalidConfig(format!(
            "candidate {focal} out of range for {m_total} candidates"
        )));
    }
    let n = losses.n();
    let g_total = losses.num_groups();
    let competitors: Vec<usize> = (0..m_total).filter(|&j| j != focal).collect();
    let k_total = competitors.len();
    let values = losses.values();
    let groups = losses.groups();

    let mut xi = Array2::<f64>::zeros((n, k_total));
    for (i, mut row) in xi.outer_iter_mut().enumerate() {
        let lf = values[[i, focal]];
        for (k, &j) in competitors.iter().enumerate() {
            row[k] = lf - values[[i, j]];
        }
    }

    let mut counts = vec![0usize; g_total];
    let mut fold_means = Array2::<f64>::zeros((g_total, k_total));
    for (row, &g) in xi.outer_iter().zip(groups) {
        counts[g] += 1;
        let mut acc = fold_means.row_mut(g);
        acc += &row;
    }
    for (mut r, &c) in fold_means.outer_iter_mut().zip(&counts) {
        r /= c as f64;
    }
    let overall_means = fold_means.mean_axis(Axis(0)).expect("at least one group");

    let mut centered = xi.clone();
    for (mut row, &g) in centered.outer_iter_mut().zip(groups) {
        row -= &fold_means.row(g);
    }

    let focal_rms = rms(values.column(focal));
    let mut scales = Array1::<f64>::zeros(k_total);
    let mut reference_scale = Array1::<f64>::zeros(k_total);
    let mut degenerate_mask = vec![false; k_total];
    for (k, &j) in competitors.iter().enumerate() {
        let col = centered.column(k);
        let ss: f64 = col.iter().map(|v| v * v).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        scales[k] = sd;
        let reference = focal_rms.max(rms(values.column(j)));
        reference_scale[k] = reference;
        degenerate_mask[k] = sd <= DEGENERACY_RTOL * reference;
    }

    Ok(DiffStats {
        focal,
        competitors,
        xi,
        fold_means,
        overall_means,
        scales,
        centered,
        degenerate_mask,
        reference_scale,
        groups: groups.to_vec(),
        num_groups: g_total,
    })
}
