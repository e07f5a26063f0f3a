use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{CommitRecord, ElementLevel, ProjectRef, RefactoringCommit, RefactoringKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub project_count: usize,
    pub total_commits: usize,
    pub refactoring_commits: usize,
    pub refactoring_operations: usize,
    pub per_element_counts: BTreeMap<ElementLevel, usize>,
    pub per_kind_counts: BTreeMap<RefactoringKind, usize>,
    /// Population standard deviation across projects, keyed by metric
    /// (`total_commits`, `refactoring_commits`, `refactoring_operations`,
    /// and one key per element level).
    pub per_project_stddevs: BTreeMap<String, f64>,
}

fn population_stddev(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Projects are the union of `projects` and any project id seen in the
/// commit lists, so per-project deviations include zero-count projects.
pub fn compute_corpus_stats(
    projects: &[ProjectRef],
    commits: &[CommitRecord],
    refcommits: &[RefactoringCommit],
) -> CorpusStats {
    let ids: BTreeSet<&str> = projects
        .iter()
        .map(|p| p.project_id.as_str())
        .chain(commits.iter().map(|c| c.project_id.as_str()))
        .chain(refcommits.iter().map(|r| r.commit.project_id.as_str()))
        .collect();
    let slot: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let n = ids.len();

    let metrics = ["total_commits", "refactoring_commits", "refactoring_operations"];
    let mut per_project: BTreeMap<String, Vec<f64>> = metrics
        .iter()
        .map(|m| m.to_string())
        .chain(ElementLevel::ALL.iter().map(|l| l.name().to_string()))
        .map(|m| (m, vec![0.0; n]))
        .collect();

    for c in commits {
        per_project.get_mut("total_commits").unwrap()[slot[c.project_id.as_str()]] += 1.0;
    }

    let mut per_element_counts: BTreeMap<ElementLevel, usize> =
        ElementLevel::ALL.iter().map(|&l| (l, 0)).collect();
    let mut per_kind_counts: BTreeMap<RefactoringKind, usize> =
        RefactoringKind::ALL.iter().map(|&k| (k, 0)).collect();
    let mut operations = 0;
    for rc in refcommits {
        let p = slot[rc.commit.project_id.as_str()];
        per_project.get_mut("refactoring_commits").unwrap()[p] += 1.0;
        for op in &rc.operations {
            operations += 1;
            *per_element_counts.get_mut(&op.element_level).unwrap() += 1;
            *per_kind_counts.get_mut(&op.kind).unwrap() += 1;
            per_project.get_mut("refactoring_operations").unwrap()[p] += 1.0;
            per_project.get_mut(op.element_level.name()).unwrap()[p] += 1.0;
        }
    }

    CorpusStats {
        project_count: n,
        total_commits: commits.len(),
        refactoring_commits: refcommits.len(),
        refactoring_operations: operations,
        per_element_counts,
        per_kind_counts,
        per_project_stddevs: per_project
            .into_iter()
            .map(|(k, v)| (k, population_stddev(&v)))
            .collect(),
    }
}
