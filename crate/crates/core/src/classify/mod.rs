//! Motivation classifiers, data splitting, grid search and evaluation.

pub mod bayes;
pub mod eval;
pub mod knn;
pub mod logistic;
pub mod split;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CommitRecord;
use crate::features::SparseVector;

pub use eval::{evaluate, evaluate_predictions, grid_search_cv, mcnemar, mcnemar_counts, EvalReport, McNemarMethod, McNemarResult, Scores};
pub use split::{stratified_kfold, stratified_split, stratified_split_indices};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("n_neighbors = {k} exceeds the {available} training samples")]
    KTooLarge { k: usize, available: usize },
    #[error("category {category} has {count} member(s); at least 2 are needed")]
    TooFewPerCategory { category: Category, count: usize },
    #[error("{k} folds requested but category {category} has only {count} member(s)")]
    FoldTooSmall { k: usize, category: Category, count: usize },
    #[error("invalid test fraction {0}")]
    InvalidFraction(f64),
    #[error("invalid hyperparameters: {0}")]
    InvalidParams(String),
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
    #[error("unknown model kind {0:?}")]
    UnknownModelKind(String),
    #[error("grid point {index} is a {found} configuration, expected {expected}")]
    GridKindMismatch { index: usize, expected: ModelKind, found: ModelKind },
    #[error("empty grid")]
    EmptyGrid,
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("model file version {0} is not supported")]
    UnsupportedVersion(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Functional,
    BugFix,
    InternalQA,
    ExternalQA,
    CodeSmell,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Functional,
        Category::BugFix,
        Category::InternalQA,
        Category::ExternalQA,
        Category::CodeSmell,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Category {
        Category::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Functional => "Functional",
            Category::BugFix => "BugFix",
            Category::InternalQA => "InternalQA",
            Category::ExternalQA => "ExternalQA",
            Category::CodeSmell => "CodeSmell",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = ClassifyError;

    /// Accepts the canonical names plus spaced and short forms
    /// (`Bug Fix`, `Internal QA`, `External`, `code smell`, ...).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "functional" | "feature" => Category::Functional,
            "bugfix" | "bug" => Category::BugFix,
            "internalqa" | "internal" => Category::InternalQA,
            "externalqa" | "external" => Category::ExternalQA,
            "codesmell" | "smell" => Category::CodeSmell,
            _ => return Err(ClassifyError::UnknownCategory(s.to_owned())),
        })
    }
}

/// Index of the largest count; ties go to the lowest canonical category.
pub(crate) fn plurality(counts: &[usize; 5]) -> Category {
    let mut best = 0;
    for i in 1..5 {
        if counts[i] > counts[best] {
            best = i;
        }
    }
    Category::from_index(best)
}

/// Same rule over real-valued scores.
pub(crate) fn argmax(scores: &[f64]) -> Category {
    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    Category::from_index(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledCommit {
    pub commit: CommitRecord,
    pub label: Category,
    #[serde(default)]
    pub vector: SparseVector,
}

/// Borrowed training row.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub x: &'a SparseVector,
    pub y: Category,
}

pub fn samples(data: &[LabeledCommit]) -> Vec<Sample<'_>> {
    data.iter().map(|d| Sample { x: &d.vector, y: d.label }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    RandomForest,
    DecisionTree,
    LogisticRegression,
    MultinomialNb,
    Knn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::RandomForest,
        ModelKind::DecisionTree,
        ModelKind::LogisticRegression,
        ModelKind::MultinomialNb,
        ModelKind::Knn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::RandomForest => "rf",
            ModelKind::DecisionTree => "dt",
            ModelKind::LogisticRegression => "lr",
            ModelKind::MultinomialNb => "mnb",
            ModelKind::Knn => "knn",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace(['-', '_', ' '], "");
        Ok(match key.as_str() {
            "rf" | "randomforest" => ModelKind::RandomForest,
            "dt" | "decisiontree" | "cart" => ModelKind::DecisionTree,
            "lr" | "logisticregression" | "logistic" => ModelKind::LogisticRegression,
            "mnb" | "nb" | "multinomialnb" | "naivebayes" => ModelKind::MultinomialNb,
            "knn" | "kneighbors" => ModelKind::Knn,
            _ => return Err(ClassifyError::UnknownModelKind(s.to_owned())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    #[default]
    Gini,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Penalty {
    #[default]
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Weights {
    #[default]
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hyperparams {
    RandomForest {
        max_depth: usize,
        n_estimators: usize,
        #[serde(default)]
        criterion: Criterion,
        #[serde(default)]
        bootstrap: bool,
    },
    DecisionTree {
        #[serde(default)]
        criterion: Criterion,
        max_depth: usize,
    },
    LogisticRegression {
        #[serde(default)]
        penalty: Penalty,
        c: f64,
    },
    MultinomialNb {
        alpha: f64,
    },
    Knn {
        n_neighbors: usize,
        #[serde(default)]
        weights: Weights,
    },
}

impl Hyperparams {
    pub fn kind(&self) -> ModelKind {
        match self {
            Hyperparams::RandomForest { .. } => ModelKind::RandomForest,
            Hyperparams::DecisionTree { .. } => ModelKind::DecisionTree,
            Hyperparams::LogisticRegression { .. } => ModelKind::LogisticRegression,
            Hyperparams::MultinomialNb { .. } => ModelKind::MultinomialNb,
            Hyperparams::Knn { .. } => ModelKind::Knn,
        }
    }

    /// Shipped defaults for each model kind.
    pub fn default_for(kind: ModelKind) -> Hyperparams {
        match kind {
            ModelKind::RandomForest => Hyperparams::RandomForest {
                max_depth: 78,
                n_estimators: 500,
                criterion: Criterion::Gini,
                bootstrap: false,
            },
            ModelKind::DecisionTree => Hyperparams::DecisionTree {
                criterion: Criterion::Gini,
                max_depth: 75,
            },
            ModelKind::LogisticRegression => Hyperparams::LogisticRegression {
                penalty: Penalty::L1,
                c: 1.0,
            },
            ModelKind::MultinomialNb => Hyperparams::MultinomialNb { alpha: 2.63 },
            ModelKind::Knn => Hyperparams::Knn {
                n_neighbors: 69,
                weights: Weights::Uniform,
            },
        }
    }

    pub fn validate(&self) -> Result<(), ClassifyError> {
        let bad = |m: &str| Err(ClassifyError::InvalidParams(m.to_owned()));
        match *self {
            Hyperparams::RandomForest { max_depth, n_estimators, .. } => {
                if max_depth == 0 || n_estimators == 0 {
                    return bad("max_depth and n_estimators must be positive");
                }
            }
            Hyperparams::DecisionTree { max_depth, .. } => {
                if max_depth == 0 {
                    return bad("max_depth must be positive");
                }
            }
            Hyperparams::LogisticRegression { c, .. } => {
                if !(c > 0.0 && c.is_finite()) {
                    return bad("c must be a positive finite number");
                }
            }
            Hyperparams::MultinomialNb { alpha } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return bad("alpha must be a positive finite number");
                }
            }
            Hyperparams::Knn { n_neighbors, .. } => {
                if n_neighbors == 0 {
                    return bad("n_neighbors must be positive");
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Forest(tree::Forest),
    Tree(tree::Tree),
    Logistic(logistic::LogisticModel),
    Bayes(bayes::BayesModel),
    Knn(knn::KnnModel),
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Versioned envelope around a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub version: u32,
    pub kind: ModelKind,
    pub params: Hyperparams,
    pub seed: u64,
    pub payload: Payload,
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn predict(&self, x: &SparseVector) -> Category {
        match &self.payload {
            Payload::Forest(m) => m.predict(x),
            Payload::Tree(m) => m.predict(x),
            Payload::Logistic(m) => m.predict(x),
            Payload::Bayes(m) => m.predict(x),
            Payload::Knn(m) => m.predict(x),
        }
    }

    /// Per-feature scores used to rank n-grams for `category`, padded to
    /// `n_features`. Tree models return Gini importances regardless of the
    /// category. k-NN has none.
    pub fn feature_scores(&self, category: Category, n_features: usize) -> Option<Vec<f64>> {
        let mut scores = match &self.payload {
            Payload::Forest(m) => m.feature_importances(),
            Payload::Tree(m) => m.feature_importances(),
            Payload::Logistic(m) => m.coefficients(category).to_vec(),
            Payload::Bayes(m) => m.feature_log_prob(category).to_vec(),
            Payload::Knn(_) => return None,
        };
        let fill = match &self.payload {
            Payload::Bayes(m) => m.unseen_log_prob(category),
            _ => 0.0,
        };
        scores.resize(n_features.max(scores.len()), fill);
        scores.truncate(n_features);
        Some(scores)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<TrainedModel, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn check_version(&self) -> Result<(), ClassifyError> {
        if self.version == MODEL_FORMAT_VERSION {
            Ok(())
        } else {
            Err(ClassifyError::UnsupportedVersion(self.version))
        }
    }
}

/// Number of feature columns implied by the data: one past the largest
/// index present.
pub(crate) fn feature_count(data: &[Sample<'_>]) -> usize {
    data.iter()
        .filter_map(|s| s.x.entries.last().map(|e| e.0 + 1))
        .max()
        .unwrap_or(0)
}

pub fn train_samples(params: &Hyperparams, data: &[Sample<'_>], seed: u64) -> Result<TrainedModel, ClassifyError> {
    params.validate()?;
    if data.is_empty() {
        return Err(ClassifyError::EmptyTrainingSet);
    }
    let payload = match *params {
        Hyperparams::RandomForest { max_depth, n_estimators, bootstrap, .. } => Payload::Forest(tree::Forest::fit(
            data,
            &tree::ForestConfig {
                n_estimators,
                max_depth,
                max_features: tree::MaxFeatures::Sqrt,
                bootstrap,
            },
            seed,
        )),
        Hyperparams::DecisionTree { max_depth, .. } => Payload::Tree(tree::Tree::fit(data, max_depth)),
        Hyperparams::LogisticRegression { c, .. } => Payload::Logistic(logistic::LogisticModel::fit(data, c)),
        Hyperparams::MultinomialNb { alpha } => Payload::Bayes(bayes::BayesModel::fit(data, alpha)),
        Hyperparams::Knn { n_neighbors, .. } => Payload::Knn(knn::KnnModel::fit(data, n_neighbors)?),
    };
    Ok(TrainedModel {
        version: MODEL_FORMAT_VERSION,
        kind: params.kind(),
        params: *params,
        seed,
        payload,
    })
}

/// Trains the model described by `params` on labeled, featurized commits.
pub fn train(params: &Hyperparams, train_set: &[LabeledCommit], seed: u64) -> Result<TrainedModel, ClassifyError> {
    train_samples(params, &samples(train_set), seed)
}

pub fn predict(model: &TrainedModel, x: &SparseVector) -> Category {
    model.predict(x)
}
