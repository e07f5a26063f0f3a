//! Multinomial naive Bayes over real-valued (TF-IDF) feature weights.

use serde::{Deserialize, Serialize};

use super::{argmax, feature_count, Category, Sample};
use crate::features::SparseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesModel {
    pub alpha: f64,
    /// `ln(n_c / n)`; `None` for categories absent from training.
    pub class_log_prior: Vec<Option<f64>>,
    /// `ln((N_cf + alpha) / (N_c + alpha * |V|))` per category and feature.
    pub feature_log_prob: Vec<Vec<f64>>,
    /// Log probability of a feature never seen with the category.
    pub unseen_log_prob: Vec<f64>,
}

impl BayesModel {
    pub fn fit(data: &[Sample<'_>], alpha: f64) -> BayesModel {
        let n_features = feature_count(data);
        let mut class_count = [0usize; 5];
        let mut feature_sum = vec![vec![0.0; n_features]; 5];
        for s in data {
            let c = s.y.index();
            class_count[c] += 1;
            for &(i, w) in &s.x.entries {
                feature_sum[c][i] += w;
            }
        }
        let n = data.len() as f64;
        let mut m = BayesModel {
            alpha,
            class_log_prior: Vec::new(),
            feature_log_prob: Vec::new(),
            unseen_log_prob: Vec::new(),
        };
        for c in 0..5 {
            m.class_log_prior
                .push((class_count[c] > 0).then(|| (class_count[c] as f64 / n).ln()));
            let total: f64 = feature_sum[c].iter().sum::<f64>() + alpha * n_features as f64;
            m.feature_log_prob
                .push(feature_sum[c].iter().map(|&f| ((f + alpha) / total).ln()).collect());
            m.unseen_log_prob.push((alpha / total).ln());
        }
        m
    }

    pub fn joint_log_likelihood(&self, x: &SparseVector) -> Vec<f64> {
        (0..5)
            .map(|c| match self.class_log_prior[c] {
                None => f64::NEG_INFINITY,
                Some(prior) => {
                    prior
                        + x.entries
                            .iter()
                            .map(|&(i, w)| w * self.feature_log_prob[c].get(i).copied().unwrap_or(self.unseen_log_prob[c]))
                            .sum::<f64>()
                }
            })
            .collect()
    }

    pub fn predict(&self, x: &SparseVector) -> Category {
        argmax(&self.joint_log_likelihood(x))
    }

    pub fn feature_log_prob(&self, category: Category) -> &[f64] {
        &self.feature_log_prob[category.index()]
    }

    pub fn unseen_log_prob(&self, category: Category) -> f64 {
        self.unseen_log_prob[category.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn good_bad_toy() {
        // feature 0 = "good", 1 = "bad"
        let good = SparseVector::from_pairs([(0, 2.0)]);
        let bad = SparseVector::from_pairs([(1, 2.0)]);
        let data = [
            Sample { x: &good, y: Category::Functional },
            Sample { x: &bad, y: Category::BugFix },
        ];
        let m = BayesModel::fit(&data, 1.0);
        // P(good | A) = (2 + 1) / (2 + 2) = 3/4, P(good | B) = 1/4
        assert!((m.feature_log_prob[0][0] - 0.75f64.ln()).abs() < 1e-12);
        assert!((m.feature_log_prob[1][0] - 0.25f64.ln()).abs() < 1e-12);
        let q = SparseVector::from_pairs([(0, 1.0)]);
        assert_eq!(m.predict(&q), Category::Functional);
    }

    #[test]
    fn empty_vector_uses_priors() {
        let a = SparseVector::from_pairs([(0, 1.0)]);
        let data = [
            Sample { x: &a, y: Category::CodeSmell },
            Sample { x: &a, y: Category::CodeSmell },
            Sample { x: &a, y: Category::BugFix },
        ];
        let m = BayesModel::fit(&data, 1.0);
        assert_eq!(m.predict(&SparseVector::default()), Category::CodeSmell);
    }
}
