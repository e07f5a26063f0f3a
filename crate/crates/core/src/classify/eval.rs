//! Evaluation metrics, cross-validated grid search and McNemar's test.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::split::stratified_kfold;
use super::{samples, train_samples, Category, ClassifyError, Hyperparams, LabeledCommit, ModelKind, Sample, TrainedModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_category: BTreeMap<Category, Scores>,
    pub micro_f1: f64,
    /// `confusion[true][predicted]`, canonical category order.
    pub confusion: [[usize; 5]; 5],
}

impl EvalReport {
    pub fn accuracy(&self) -> f64 {
        let total: usize = self.confusion.iter().flatten().sum();
        let hits: usize = (0..5).map(|i| self.confusion[i][i]).sum();
        if total == 0 {
            0.0
        } else {
            hits as f64 / total as f64
        }
    }

    /// Unweighted mean F1 over categories with support.
    pub fn macro_f1(&self) -> f64 {
        let s: Vec<f64> = self.per_category.values().filter(|s| s.support > 0).map(|s| s.f1).collect();
        if s.is_empty() {
            0.0
        } else {
            s.iter().sum::<f64>() / s.len() as f64
        }
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn evaluate_predictions(truth: &[Category], predicted: &[Category]) -> EvalReport {
    assert_eq!(truth.len(), predicted.len(), "truth and predictions differ in length");
    let mut confusion = [[0usize; 5]; 5];
    for (t, p) in truth.iter().zip(predicted) {
        confusion[t.index()][p.index()] += 1;
    }
    let mut per_category = BTreeMap::new();
    for c in 0..5 {
        let tp = confusion[c][c];
        let predicted_c: usize = (0..5).map(|r| confusion[r][c]).sum();
        let support: usize = confusion[c].iter().sum();
        let precision = ratio(tp, predicted_c);
        let recall = ratio(tp, support);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_category.insert(Category::from_index(c), Scores { precision, recall, f1, support });
    }
    let hits: usize = (0..5).map(|i| confusion[i][i]).sum();
    EvalReport {
        per_category,
        micro_f1: ratio(hits, truth.len()),
        confusion,
    }
}

pub fn evaluate(model: &TrainedModel, test_set: &[LabeledCommit]) -> Result<EvalReport, ClassifyError> {
    if test_set.is_empty() {
        return Err(ClassifyError::EmptyTestSet);
    }
    let truth: Vec<Category> = test_set.iter().map(|d| d.label).collect();
    let predicted: Vec<Category> = test_set.par_iter().map(|d| model.predict(&d.vector)).collect();
    Ok(evaluate_predictions(&truth, &predicted))
}

/// Mean micro-F1 over stratified folds for each grid point; the best point
/// wins, ties to the earliest in grid order. Grid points and folds are
/// evaluated in parallel; each fold model is trained with `seed`.
pub fn grid_search_cv(
    kind: ModelKind,
    grid: &[Hyperparams],
    train_set: &[LabeledCommit],
    k_folds: usize,
    seed: u64,
) -> Result<(Hyperparams, f64), ClassifyError> {
    let (best, score, _) = grid_search_cv_scores(kind, grid, train_set, k_folds, seed)?;
    Ok((best, score))
}

/// Like [`grid_search_cv`] but also returns the mean score of every point.
pub fn grid_search_cv_scores(
    kind: ModelKind,
    grid: &[Hyperparams],
    train_set: &[LabeledCommit],
    k_folds: usize,
    seed: u64,
) -> Result<(Hyperparams, f64, Vec<f64>), ClassifyError> {
    if grid.is_empty() {
        return Err(ClassifyError::EmptyGrid);
    }
    for (index, p) in grid.iter().enumerate() {
        if p.kind() != kind {
            return Err(ClassifyError::GridKindMismatch { index, expected: kind, found: p.kind() });
        }
        p.validate()?;
    }
    let labels: Vec<Category> = train_set.iter().map(|d| d.label).collect();
    let folds = stratified_kfold(&labels, k_folds, seed)?;
    let data = samples(train_set);
    let mut held_out = vec![usize::MAX; data.len()];
    for (f, fold) in folds.iter().enumerate() {
        for &i in fold {
            held_out[i] = f;
        }
    }

    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..k_folds).map(move |f| (g, f))).collect();
    let fold_scores: Vec<Result<f64, ClassifyError>> = jobs
        .par_iter()
        .map(|&(g, f)| {
            let fit: Vec<Sample> = (0..data.len()).filter(|&i| held_out[i] != f).map(|i| data[i]).collect();
            let model = train_samples(&grid[g], &fit, seed)?;
            let truth: Vec<Category> = folds[f].iter().map(|&i| data[i].y).collect();
            let pred: Vec<Category> = folds[f].iter().map(|&i| model.predict(data[i].x)).collect();
            Ok(evaluate_predictions(&truth, &pred).micro_f1)
        })
        .collect();

    let mut means = vec![0.0; grid.len()];
    for (&(g, _), s) in jobs.iter().zip(fold_scores) {
        means[g] += s? / k_folds as f64;
    }
    let mut best = 0;
    for g in 1..grid.len() {
        if means[g] > means[best] {
            best = g;
        }
    }
    Ok((grid[best], means[best], means))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McNemarMethod {
    ExactBinomial,
    ChiSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemarResult {
    /// Rows where A is right and B is wrong.
    pub b: usize,
    /// Rows where A is wrong and B is right.
    pub c: usize,
    /// `min(b, c)` for the exact test, the corrected chi-square otherwise.
    pub statistic: f64,
    pub p_value: f64,
    pub method: McNemarMethod,
}

/// Below this many discordant pairs the exact binomial test is used.
pub const MCNEMAR_EXACT_BELOW: usize = 25;

pub fn mcnemar_counts(b: usize, c: usize) -> McNemarResult {
    let n = b + c;
    if n == 0 {
        return McNemarResult { b, c, statistic: 0.0, p_value: 1.0, method: McNemarMethod::ExactBinomial };
    }
    if n < MCNEMAR_EXACT_BELOW {
        let k = b.min(c);
        let mut term = 0.5f64.powi(n as i32);
        let mut tail = 0.0;
        for i in 0..=k {
            tail += term;
            term *= (n - i) as f64 / (i + 1) as f64;
        }
        return McNemarResult {
            b,
            c,
            statistic: k as f64,
            p_value: (2.0 * tail).min(1.0),
            method: McNemarMethod::ExactBinomial,
        };
    }
    let diff = (b as f64 - c as f64).abs() - 1.0;
    let statistic = diff.max(0.0).powi(2) / n as f64;
    let chi = ChiSquared::new(1.0).expect("one degree of freedom");
    McNemarResult {
        b,
        c,
        statistic,
        p_value: chi.sf(statistic).clamp(0.0, 1.0),
        method: McNemarMethod::ChiSquare,
    }
}

/// Compares two classifiers on the same test rows.
pub fn mcnemar(a: &TrainedModel, b: &TrainedModel, test_set: &[LabeledCommit]) -> McNemarResult {
    let (mut only_a, mut only_b) = (0, 0);
    for d in test_set {
        let ra = a.predict(&d.vector) == d.label;
        let rb = b.predict(&d.vector) == d.label;
        match (ra, rb) {
            (true, false) => only_a += 1,
            (false, true) => only_b += 1,
            _ => {}
        }
    }
    mcnemar_counts(only_a, only_b)
}
