//! End-to-end message classification: normalize, featurize, split, tune,
//! train and evaluate, plus the serialized bundle used to classify new
//! commits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{
    evaluate, grid_search_cv, stratified_split_indices, train, Category, ClassifyError, EvalReport, Hyperparams,
    LabeledCommit, ModelKind, TrainedModel,
};
use crate::corpus::CommitRecord;
use crate::features::{fit_tfidf, FeatureError, NgramConfig, TfidfModel};
use crate::textprep::{normalize, NormalizedMessage, StopWordSet};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error("unsupported classifier bundle version {0}")]
    UnsupportedVersion(u32),
    #[error("malformed classifier bundle: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub ngrams: NgramConfig,
    pub test_fraction: f64,
    pub folds: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            ngrams: NgramConfig::default(),
            test_fraction: 0.25,
            folds: 10,
        }
    }
}

pub const BUNDLE_VERSION: u32 = 1;

/// A fitted vectorizer and classifier, ready to label raw messages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierBundle {
    pub version: u32,
    pub tfidf: TfidfModel,
    pub model: TrainedModel,
}

impl ClassifierBundle {
    pub fn classify(&self, message: &str, stops: &StopWordSet) -> Category {
        self.model.predict(&self.tfidf.transform(&normalize(message, stops)))
    }

    pub fn classify_all(&self, messages: &[String]) -> Vec<Category> {
        let stops = StopWordSet::default();
        messages.par_iter().map(|m| self.classify(m, &stops)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bundle serializes")
    }

    pub fn from_json(text: &str) -> Result<ClassifierBundle, PipelineError> {
        let b: ClassifierBundle = serde_json::from_str(text).map_err(|e| PipelineError::Malformed(e.to_string()))?;
        if b.version != BUNDLE_VERSION {
            return Err(PipelineError::UnsupportedVersion(b.version));
        }
        b.model.check_version()?;
        Ok(b)
    }
}

/// Everything produced by [`run`].
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub bundle: ClassifierBundle,
    pub params: Hyperparams,
    /// Mean cross-validated micro-F1 of the chosen point; `None` without a grid search.
    pub cv_score: Option<f64>,
    pub test_report: EvalReport,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    /// Featurized held-out rows, in `test_indices` order.
    pub test_set: Vec<LabeledCommit>,
}

pub fn normalize_all(commits: &[CommitRecord]) -> Vec<NormalizedMessage> {
    let stops = StopWordSet::default();
    commits.par_iter().map(|c| normalize(&c.message, &stops)).collect()
}

/// Splits, fits the vectorizer on the training part, picks hyperparameters
/// by stratified cross-validation when `grid` has more than one point (the
/// single point or the kind's default otherwise), trains on the whole
/// training part and scores the held-out part.
pub fn run(
    commits: &[CommitRecord],
    labels: &[Category],
    kind: ModelKind,
    grid: &[Hyperparams],
    config: &PipelineConfig,
    seed: u64,
) -> Result<PipelineOutcome, PipelineError> {
    assert_eq!(commits.len(), labels.len(), "one label per commit");
    let docs = normalize_all(commits);
    let (train_idx, test_idx) = stratified_split_indices(labels, config.test_fraction, seed)?;
    let train_docs: Vec<NormalizedMessage> = train_idx.iter().map(|&i| docs[i].clone()).collect();
    let tfidf = fit_tfidf(&train_docs, config.ngrams)?;
    let featurize = |idx: &[usize]| -> Vec<LabeledCommit> {
        idx.iter()
            .map(|&i| LabeledCommit {
                commit: commits[i].clone(),
                label: labels[i],
                vector: tfidf.transform(&docs[i]),
            })
            .collect()
    };
    let train_set = featurize(&train_idx);
    let test_set = featurize(&test_idx);
    let (params, cv_score) = match grid {
        [] => (Hyperparams::default_for(kind), None),
        [only] => (*only, None),
        _ => {
            let (best, score) = grid_search_cv(kind, grid, &train_set, config.folds, seed)?;
            (best, Some(score))
        }
    };
    if params.kind() != kind {
        return Err(ClassifyError::GridKindMismatch {
            index: 0,
            expected: kind,
            found: params.kind(),
        }
        .into());
    }
    let model = train(&params, &train_set, seed)?;
    let test_report = evaluate(&model, &test_set)?;
    Ok(PipelineOutcome {
        bundle: ClassifierBundle {
            version: BUNDLE_VERSION,
            tfidf,
            model,
        },
        params,
        cv_score,
        test_report,
        train_indices: train_idx,
        test_indices: test_idx,
        test_set,
    })
}
