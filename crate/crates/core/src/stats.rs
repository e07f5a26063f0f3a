//! Mann-Whitney U (Wilcoxon rank-sum) test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("both samples need at least one value (got {0} and {1})")]
    EmptySample(usize, usize),
    #[error("samples must not contain NaN")]
    NotANumber,
    #[error("exact enumeration is limited to samples of at most {max} values each")]
    TooLargeForExact { max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    /// `x` is stochastically larger than `y`.
    Greater,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankTestResult {
    /// U of the first sample.
    pub u_statistic: f64,
    pub p_value: f64,
    pub alternative: Alternative,
    pub method: Method,
}

/// Largest per-sample size for which the exact distribution is enumerated.
pub const EXACT_MAX: usize = 8;

/// Midranks (1-based) of the pooled sample and the tie-group sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// Every subset sum of size `k` of `values`, as doubled integers.
fn subset_sums(values: &[i64], k: usize) -> Vec<i64> {
    fn go(values: &[i64], k: usize, start: usize, acc: i64, out: &mut Vec<i64>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..=values.len() - k {
            go(values, k - 1, i + 1, acc + values[i], out);
        }
    }
    let mut out = Vec::new();
    go(values, k, 0, 0, &mut out);
    out
}

fn validate(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.is_empty() || y.is_empty() {
        return Err(StatsError::EmptySample(x.len(), y.len()));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(StatsError::NotANumber);
    }
    Ok(())
}

/// Mann-Whitney U test with the method chosen automatically: exact when
/// both samples have at most [`EXACT_MAX`] values, normal approximation
/// otherwise.
pub fn mann_whitney_u(x: &[f64], y: &[f64], alternative: Alternative) -> Result<RankTestResult, StatsError> {
    mann_whitney_u_with(x, y, alternative, None)
}

/// Same test under its other name.
pub fn wilcoxon_rank_sum(x: &[f64], y: &[f64], alternative: Alternative) -> Result<RankTestResult, StatsError> {
    mann_whitney_u(x, y, alternative)
}

/// `method` overrides the automatic choice.
pub fn mann_whitney_u_with(
    x: &[f64],
    y: &[f64],
    alternative: Alternative,
    method: Option<Method>,
) -> Result<RankTestResult, StatsError> {
    validate(x, y)?;
    let (n1, n2) = (x.len(), y.len());
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    // doubled ranks are integers
    let doubled: Vec<i64> = ranks.iter().map(|r| (r * 2.0).round() as i64).collect();
    let r1: i64 = doubled[..n1].iter().sum();
    let offset = (n1 * (n1 + 1)) as i64;
    let u = (r1 - offset) as f64 / 2.0;

    let auto = if n1 <= EXACT_MAX && n2 <= EXACT_MAX {
        Method::Exact
    } else {
        Method::NormalApprox
    };
    let method = method.unwrap_or(auto);
    let p = match method {
        Method::Exact => {
            if n1 > EXACT_MAX || n2 > EXACT_MAX {
                return Err(StatsError::TooLargeForExact { max: EXACT_MAX });
            }
            let sums = subset_sums(&doubled, n1);
            let total = sums.len() as f64;
            let ge = sums.iter().filter(|&&s| s >= r1).count() as f64 / total;
            match alternative {
                Alternative::Greater => ge,
                Alternative::TwoSided => {
                    let le = sums.iter().filter(|&&s| s <= r1).count() as f64 / total;
                    (2.0 * ge.min(le)).min(1.0)
                }
            }
        }
        Method::NormalApprox => {
            let (a, b) = (n1 as f64, n2 as f64);
            let n = a + b;
            let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0)).max(1.0);
            let var = a * b / 12.0 * ((n + 1.0) - tie_term);
            if var <= 0.0 {
                1.0
            } else {
                let sd = var.sqrt();
                let mu = a * b / 2.0;
                let normal = Normal::new(0.0, 1.0).expect("standard normal");
                match alternative {
                    Alternative::Greater => normal.sf((u - mu - 0.5) / sd),
                    Alternative::TwoSided => (2.0 * normal.sf(((u - mu).abs() - 0.5) / sd)).min(1.0),
                }
            }
        }
    };
    Ok(RankTestResult {
        u_statistic: u,
        p_value: p.clamp(0.0, 1.0),
        alternative,
        method,
    })
}
