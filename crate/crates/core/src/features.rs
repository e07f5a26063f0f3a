//! TF-IDF over lemma n-grams.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{Category, TrainedModel};
use crate::textprep::NormalizedMessage;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("cannot fit a vocabulary on an empty corpus")]
    EmptyCorpus,
    #[error("invalid n-gram range {min_n}..={max_n} (must satisfy 1 <= min <= max <= 3)")]
    InvalidConfig { min_n: usize, max_n: usize },
    #[error("{0} models do not expose feature scores")]
    UnsupportedModel(String),
    #[error("malformed model file: {0}")]
    MalformedModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramConfig {
    pub min_n: usize,
    pub max_n: usize,
    /// `None` keeps every n-gram.
    pub max_features: Option<usize>,
}

impl Default for NgramConfig {
    fn default() -> Self {
        NgramConfig {
            min_n: 1,
            max_n: 2,
            max_features: Some(5000),
        }
    }
}

impl NgramConfig {
    pub fn new(min_n: usize, max_n: usize, max_features: Option<usize>) -> Result<Self, FeatureError> {
        let c = NgramConfig { min_n, max_n, max_features };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.min_n >= 1 && self.min_n <= self.max_n && self.max_n <= 3 {
            Ok(())
        } else {
            Err(FeatureError::InvalidConfig {
                min_n: self.min_n,
                max_n: self.max_n,
            })
        }
    }
}

/// Sparse row sorted by column index. Weights are strictly positive.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Builds a vector from arbitrary pairs: sorts, sums duplicates, drops
    /// non-positive weights.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut m: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, w) in pairs {
            *m.entry(i).or_default() += w;
        }
        SparseVector {
            entries: m.into_iter().filter(|&(_, w)| w > 0.0).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map_or(0.0, |i| self.entries[i].1)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        SparseVector {
            entries: self.entries.iter().map(|&(i, w)| (i, w * factor)).collect(),
        }
    }

    pub fn squared_distance(&self, other: &SparseVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut d) = (0, 0, 0.0);
        loop {
            let step = match (a.get(i), b.get(j)) {
                (Some(&(ia, wa)), Some(&(ib, wb))) => match ia.cmp(&ib) {
                    std::cmp::Ordering::Equal => {
                        i += 1;
                        j += 1;
                        wa - wb
                    }
                    std::cmp::Ordering::Less => {
                        i += 1;
                        wa
                    }
                    std::cmp::Ordering::Greater => {
                        j += 1;
                        wb
                    }
                },
                (Some(&(_, wa)), None) => {
                    i += 1;
                    wa
                }
                (None, Some(&(_, wb))) => {
                    j += 1;
                    wb
                }
                (None, None) => break,
            };
            d += step * step;
        }
        d
    }
}

/// N-grams of one sentence, in order of occurrence.
pub fn sentence_ngrams(tokens: &[String], min_n: usize, max_n: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in min_n..=max_n {
        for w in tokens.windows(n) {
            out.push(w.join(" "));
        }
    }
    out
}

fn doc_ngrams(doc: &NormalizedMessage, config: &NgramConfig) -> Vec<String> {
    doc.sentences
        .iter()
        .flat_map(|s| sentence_ngrams(s, config.min_n, config.max_n))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "TfidfFile", try_from = "TfidfFile")]
pub struct TfidfModel {
    pub config: NgramConfig,
    pub corpus_size: usize,
    /// Column index to n-gram.
    terms: Vec<String>,
    idf: Vec<f64>,
    vocabulary: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct TfidfFile {
    config: NgramConfig,
    corpus_size: usize,
    entries: Vec<(String, usize, f64)>,
}

impl From<TfidfModel> for TfidfFile {
    fn from(m: TfidfModel) -> Self {
        TfidfFile {
            config: m.config,
            corpus_size: m.corpus_size,
            entries: m
                .terms
                .into_iter()
                .zip(m.idf)
                .enumerate()
                .map(|(i, (t, idf))| (t, i, idf))
                .collect(),
        }
    }
}

impl TryFrom<TfidfFile> for TfidfModel {
    type Error = FeatureError;

    fn try_from(f: TfidfFile) -> Result<Self, Self::Error> {
        f.config.validate()?;
        let n = f.entries.len();
        let mut terms = vec![None; n];
        let mut idf = vec![0.0; n];
        for (t, i, w) in f.entries {
            if i >= n || terms[i].is_some() {
                return Err(FeatureError::MalformedModel(format!("index {i} out of range or repeated")));
            }
            if w.is_nan() || w < 1.0 {
                return Err(FeatureError::MalformedModel(format!("idf {w} below 1 for {t:?}")));
            }
            terms[i] = Some(t);
            idf[i] = w;
        }
        let terms: Vec<String> = terms.into_iter().map(Option::unwrap).collect();
        let vocabulary: HashMap<String, usize> =
            terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        if vocabulary.len() != n {
            return Err(FeatureError::MalformedModel("repeated n-gram".into()));
        }
        Ok(TfidfModel {
            config: f.config,
            corpus_size: f.corpus_size,
            terms,
            idf,
            vocabulary,
        })
    }
}

pub fn idf_value(corpus_size: usize, df: usize) -> f64 {
    ((1.0 + corpus_size as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// Fits the vocabulary and idf table. The vocabulary keeps the
/// `max_features` n-grams with the highest raw corpus count (ties go to the
/// lexicographically smaller n-gram); columns are numbered in lexicographic
/// order of the kept n-grams.
pub fn fit_tfidf(docs: &[NormalizedMessage], config: NgramConfig) -> Result<TfidfModel, FeatureError> {
    config.validate()?;
    if docs.is_empty() {
        return Err(FeatureError::EmptyCorpus);
    }
    let mut count: HashMap<String, usize> = HashMap::new();
    let mut df: HashMap<String, usize> = HashMap::new();
    for doc in docs {
        let grams = doc_ngrams(doc, &config);
        let mut seen = HashSet::new();
        for g in grams {
            if seen.insert(g.clone()) {
                *df.entry(g.clone()).or_default() += 1;
            }
            *count.entry(g).or_default() += 1;
        }
    }
    let mut ranked: Vec<(String, usize)> = count.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    if let Some(max) = config.max_features {
        ranked.truncate(max);
    }
    let mut terms: Vec<String> = ranked.into_iter().map(|(t, _)| t).collect();
    terms.sort();
    let idf = terms.iter().map(|t| idf_value(docs.len(), df[t])).collect();
    let vocabulary = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(TfidfModel {
        config,
        corpus_size: docs.len(),
        terms,
        idf,
        vocabulary,
    })
}

impl TfidfModel {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, ngram: &str) -> Option<usize> {
        self.vocabulary.get(ngram).copied()
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get(index).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn transform(&self, doc: &NormalizedMessage) -> SparseVector {
        let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
        for g in doc_ngrams(doc, &self.config) {
            if let Some(&i) = self.vocabulary.get(&g) {
                *tf.entry(i).or_default() += 1.0;
            }
        }
        let weighted: Vec<(usize, f64)> = tf.into_iter().map(|(i, c)| (i, c * self.idf[i])).collect();
        let norm = weighted.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        SparseVector {
            entries: weighted.into_iter().map(|(i, w)| (i, w / norm)).collect(),
        }
    }
}

pub fn transform(model: &TfidfModel, doc: &NormalizedMessage) -> SparseVector {
    model.transform(doc)
}

/// The `k` n-grams the trained model weighs most for `category`; ties go
/// to the lexicographically smaller n-gram.
pub fn top_features(
    model: &TfidfModel,
    trained: &TrainedModel,
    category: Category,
    k: usize,
) -> Result<Vec<String>, FeatureError> {
    let scores = trained
        .feature_scores(category, model.len())
        .ok_or_else(|| FeatureError::UnsupportedModel(trained.kind().name().to_string()))?;
    let mut ranked: Vec<(usize, f64)> = scores.into_iter().enumerate().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| model.terms[a.0].cmp(&model.terms[b.0])));
    Ok(ranked
        .into_iter()
        .take(k)
        .map(|(i, _)| model.terms[i].clone())
        .collect())
}
