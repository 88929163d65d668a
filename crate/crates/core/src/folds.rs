//! Fold assignment for V-fold cross-validation and single sample splits.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{CvcError, Result};
use crate::rng::{substream, Phase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    VFold,
    SampleSplit,
}

/// Partition of sample indices into validation groups.
///
/// In V-fold mode the groups partition `0..n` and each group is scored by
/// models fitted on its complement. In sample-split mode there is exactly
/// one group (the test set); its complement is the training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    n: usize,
    mode: PlanMode,
    groups: Vec<Vec<usize>>,
    assignment: Vec<Option<usize>>,
    seed: u64,
}

/// Balanced random partition of `0..n` into `v` folds.
///
/// After a seeded shuffle the first `n mod v` folds receive one extra index.
pub fn make_folds(n: usize, v: usize, seed: u64) -> Result<FoldPlan> {
    if v < 2 {
        return Err(CvcError::InvalidConfig(format!("need at least 2 folds, got {v}")));
    }
    if n < v {
        return Err(CvcError::InvalidConfig(format!(
            "cannot split {n} samples into {v} folds"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut substream(seed, Phase::Folds, n as u64, v as u64));
    let base = n / v;
    let extra = n % v;
    let mut groups = Vec::with_capacity(v);
    let mut assignment = vec![None; n];
    let mut start = 0;
    for fold in 0..v {
        let size = base + usize::from(fold < extra);
        let mut members = order[start..start + size].to_vec();
        members.sort_unstable();
        for &i in &members {
            assignment[i] = Some(fold);
        }
        groups.push(members);
        start += size;
    }
    Ok(FoldPlan {
        n,
        mode: PlanMode::VFold,
        groups,
        assignment,
        seed,
    })
}

/// Single train/test split with `n_train` random training indices.
pub fn make_split(n: usize, n_train: usize, seed: u64) -> Result<FoldPlan> {
    if n_train == 0 || n_train >= n {
        return Err(CvcError::InvalidConfig(format!(
            "training size must be in 1..{n}, got {n_train}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut substream(seed, Phase::Split, n as u64, n_train as u64));
    let mut test = order[n_train..].to_vec();
    test.sort_unstable();
    FoldPlan::from_test_set(n, test, seed)
}

impl FoldPlan {
    /// Sample-split plan with an explicit test set.
    pub fn from_test_set(n: usize, mut test: Vec<usize>, seed: u64) -> Result<FoldPlan> {
        test.sort_unstable();
        test.dedup();
        if test.is_empty() || test.len() >= n || test.last().is_some_and(|&i| i >= n) {
            return Err(CvcError::InvalidConfig(
                "test set must be a nonempty proper subset of 0..n".into(),
            ));
        }
        let mut assignment = vec![None; n];
        for &i in &test {
            assignment[i] = Some(0);
        }
        Ok(FoldPlan {
            n,
            mode: PlanMode::SampleSplit,
            groups: vec![test],
            assignment,
            seed,
        })
    }

    /// V-fold plan from explicit per-sample fold ids in `0..v`.
    pub fn from_assignment(ids: &[usize], seed: u64) -> Result<FoldPlan> {
        let v = ids.iter().copied().max().map_or(0, |m| m + 1);
        if v < 2 {
            return Err(CvcError::InvalidConfig("need at least 2 folds".into()));
        }
        let mut groups = vec![Vec::new(); v];
        for (i, &f) in ids.iter().enumerate() {
            groups[f].push(i);
        }
        if groups.iter().any(Vec::is_empty) {
            return Err(CvcError::InvalidConfig("every fold needs at least one sample".into()));
        }
        Ok(FoldPlan {
            n: ids.len(),
            mode: PlanMode::VFold,
            groups,
            assignment: ids.iter().map(|&f| Some(f)).collect(),
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> PlanMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of validation groups (1 in sample-split mode).
    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn group(&self, v: usize) -> &[usize] {
        &self.groups[v]
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Fold id of sample `i`; `None` for training-only samples in split mode.
    pub fn fold_of(&self, i: usize) -> Option<usize> {
        self.assignment[i]
    }

    /// Indices used to fit the models scored on group `v`.
    pub fn train_indices(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&i| self.assignment[i] != Some(v)).collect()
    }

    /// Samples that receive a validated loss, in increasing index order.
    pub fn scored_rows(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.assignment[i].is_some()).collect()
    }
}
