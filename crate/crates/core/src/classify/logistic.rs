//! One-vs-rest L1-regularized logistic regression.
//!
//! Each binary model minimizes
//! `(1/n) * sum(logloss) + (1/(C*n)) * |w|_1`
//! with FISTA (accelerated proximal gradient). The intercept is not
//! penalized.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{argmax, feature_count, Category, Sample};
use crate::features::SparseVector;

pub const TOLERANCE: f64 = 1e-4;
pub const MAX_ITER: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    /// One weight row per category in canonical order.
    pub coef: Vec<Vec<f64>>,
    pub intercept: Vec<f64>,
    /// Categories absent from training never win.
    pub present: Vec<bool>,
    pub iterations: Vec<usize>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn dot(w: &[f64], x: &SparseVector) -> f64 {
    x.entries.iter().map(|&(i, v)| w.get(i).copied().unwrap_or(0.0) * v).sum()
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Returns `(weights, intercept, iterations)`.
pub fn fit_binary(xs: &[&SparseVector], targets: &[f64], c: f64, n_features: usize) -> (Vec<f64>, f64, usize) {
    let n = xs.len() as f64;
    let lambda = 1.0 / (c * n);
    // Lipschitz bound of the mean logistic loss gradient
    let lipschitz = 0.25 * xs.iter().map(|x| x.norm().powi(2) + 1.0).fold(0.0, f64::max);
    let step = 1.0 / lipschitz;

    let mut w = vec![0.0; n_features];
    let mut b = 0.0;
    let mut yw = w.clone();
    let mut yb = b;
    let mut t = 1.0f64;
    let mut grad = vec![0.0; n_features];
    let mut iterations = MAX_ITER;
    for iter in 0..MAX_ITER {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_b = 0.0;
        for (x, &target) in xs.iter().zip(targets) {
            let r = sigmoid(dot(&yw, x) + yb) - target;
            for &(i, v) in &x.entries {
                grad[i] += r * v;
            }
            grad_b += r;
        }
        let mut change: f64 = 0.0;
        let w_new: Vec<f64> = yw
            .iter()
            .zip(&grad)
            .map(|(&y, &g)| soft_threshold(y - step * g / n, step * lambda))
            .collect();
        let b_new = yb - step * grad_b / n;
        let t_new = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let momentum = (t - 1.0) / t_new;
        for i in 0..n_features {
            change = change.max((w_new[i] - w[i]).abs());
            yw[i] = w_new[i] + momentum * (w_new[i] - w[i]);
        }
        change = change.max((b_new - b).abs());
        yb = b_new + momentum * (b_new - b);
        w = w_new;
        b = b_new;
        t = t_new;
        if change < TOLERANCE {
            iterations = iter + 1;
            break;
        }
    }
    (w, b, iterations)
}

impl LogisticModel {
    pub fn fit(data: &[Sample<'_>], c: f64) -> LogisticModel {
        let n_features = feature_count(data);
        let xs: Vec<&SparseVector> = data.iter().map(|s| s.x).collect();
        let fits: Vec<(Vec<f64>, f64, usize, bool)> = Category::ALL
            .par_iter()
            .map(|&cat| {
                let targets: Vec<f64> = data.iter().map(|s| if s.y == cat { 1.0 } else { 0.0 }).collect();
                if !targets.contains(&1.0) {
                    return (vec![0.0; n_features], 0.0, 0, false);
                }
                let (w, b, it) = fit_binary(&xs, &targets, c, n_features);
                (w, b, it, true)
            })
            .collect();
        let mut m = LogisticModel {
            coef: Vec::new(),
            intercept: Vec::new(),
            present: Vec::new(),
            iterations: Vec::new(),
        };
        for (w, b, it, present) in fits {
            m.coef.push(w);
            m.intercept.push(b);
            m.iterations.push(it);
            m.present.push(present);
        }
        m
    }

    pub fn decision_function(&self, x: &SparseVector) -> Vec<f64> {
        (0..5)
            .map(|c| {
                if self.present[c] {
                    dot(&self.coef[c], x) + self.intercept[c]
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect()
    }

    pub fn predict(&self, x: &SparseVector) -> Category {
        argmax(&self.decision_function(x))
    }

    pub fn coefficients(&self, category: Category) -> &[f64] {
        &self.coef[category.index()]
    }
}
