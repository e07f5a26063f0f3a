//! k-nearest neighbours with Euclidean distance on sparse rows.

use serde::{Deserialize, Serialize};

use super::{plurality, Category, ClassifyError, Sample};
use crate::features::SparseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub n_neighbors: usize,
    pub vectors: Vec<SparseVector>,
    pub labels: Vec<Category>,
}

impl KnnModel {
    pub fn fit(data: &[Sample<'_>], n_neighbors: usize) -> Result<KnnModel, ClassifyError> {
        if n_neighbors > data.len() {
            return Err(ClassifyError::KTooLarge {
                k: n_neighbors,
                available: data.len(),
            });
        }
        Ok(KnnModel {
            n_neighbors,
            vectors: data.iter().map(|s| s.x.clone()).collect(),
            labels: data.iter().map(|s| s.y).collect(),
        })
    }

    /// Indices of the `k` nearest training rows; equal distances go to the
    /// lower index.
    pub fn neighbors(&self, x: &SparseVector) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = self
            .vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (v.squared_distance(x), i))
            .collect();
        let k = self.n_neighbors.min(d.len());
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < d.len() {
            d.select_nth_unstable_by(k, cmp);
            d.truncate(k);
        }
        d.sort_by(cmp);
        d.into_iter().map(|(_, i)| i).collect()
    }

    /// Plurality of the neighbours' labels; ties go to the lowest canonical
    /// category.
    pub fn predict(&self, x: &SparseVector) -> Category {
        let mut votes = [0; 5];
        for i in self.neighbors(x) {
            votes[self.labels[i].index()] += 1;
        }
        plurality(&votes)
    }
}
