//! Summary tables and figures: category distribution, refactoring kinds in
//! production vs. test files, SAR label split and pattern significance.

mod svg;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::classify::Category;
use crate::corpus::{RefactoringCommit, RefactoringKind, Sha};
use crate::sarpatterns::LabelCounts;
use crate::stats::RankTestResult;
use crate::testdetect::FileKind;

pub use svg::{pie_chart, stacked_bars};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("path {path} of commit {sha} has no file classification")]
    UnclassifiedPath { sha: String, path: String },
    #[error("commit {0} has no category label")]
    UnlabeledCommit(String),
    #[error("{0} reports have no plot form")]
    NoPlot(&'static str),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Plot,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "plot" | "svg" => Ok(Format::Plot),
            other => Err(format!("unknown report format {other:?} (expected csv, json or plot)")),
        }
    }
}

/// `count / total` as a percentage, 0 for an empty total.
pub fn percentage(count: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

fn pct2(p: f64) -> String {
    format!("{p:.2}")
}

fn round2(p: f64) -> Value {
    json!((p * 100.0).round() / 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Share {
    pub count: u64,
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryDistribution {
    /// Every category, including empty ones.
    pub per_category: BTreeMap<Category, Share>,
    pub total: u64,
}

pub fn category_distribution(labels: &[Category]) -> CategoryDistribution {
    let mut counts = [0u64; 5];
    for l in labels {
        counts[l.index()] += 1;
    }
    let total = labels.len() as u64;
    CategoryDistribution {
        per_category: Category::ALL
            .iter()
            .map(|&c| {
                let count = counts[c.index()];
                (c, Share { count, percentage: percentage(count, total) })
            })
            .collect(),
        total,
    }
}

/// How an operation touching both kinds of file is attributed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribution {
    /// Test if any involved path is a test file.
    #[default]
    Any,
    /// Test if strictly more involved paths are test files than production files.
    Majority,
}

impl std::str::FromStr for Attribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "any" => Ok(Attribution::Any),
            "majority" => Ok(Attribution::Majority),
            other => Err(format!("unknown attribution {other:?} (expected any or majority)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProdTestMatrix {
    /// Observed cells only; the percentage is within the
    /// `(category, file kind)` column.
    pub cells: BTreeMap<(RefactoringKind, Category, FileKind), Share>,
    /// Operations left out because none of their paths is a classifiable
    /// Java file.
    pub skipped: u64,
}

impl ProdTestMatrix {
    pub fn count(&self, kind: RefactoringKind, category: Category, file: FileKind) -> u64 {
        self.cells.get(&(kind, category, file)).map_or(0, |s| s.count)
    }

    pub fn column_total(&self, category: Category, file: FileKind) -> u64 {
        self.cells
            .iter()
            .filter(|((_, c, f), _)| *c == category && *f == file)
            .map(|(_, s)| s.count)
            .sum()
    }

    pub fn total(&self) -> u64 {
        self.cells.values().map(|s| s.count).sum()
    }
}

/// Attributes every refactoring operation to its kind, its commit's
/// category and the kind of file it touched. `file_kinds` must cover every
/// involved path; unparseable files are ignored and an operation whose
/// paths are all ignored is counted in `skipped`.
pub fn prod_test_matrix(
    refcommits: &[RefactoringCommit],
    labels: &BTreeMap<Sha, Category>,
    file_kinds: &BTreeMap<String, FileKind>,
    attribution: Attribution,
) -> Result<ProdTestMatrix, ReportError> {
    let mut counts: BTreeMap<(RefactoringKind, Category, FileKind), u64> = BTreeMap::new();
    let mut skipped = 0;
    for r in refcommits {
        let sha = &r.commit.sha;
        let category = *labels.get(sha).ok_or_else(|| ReportError::UnlabeledCommit(sha.to_string()))?;
        for op in &r.operations {
            let (mut tests, mut prods) = (0usize, 0usize);
            for path in &op.involved_paths {
                match file_kinds.get(path) {
                    Some(FileKind::Test) => tests += 1,
                    Some(FileKind::Production) => prods += 1,
                    Some(FileKind::Unparseable) => {}
                    None => {
                        return Err(ReportError::UnclassifiedPath {
                            sha: sha.to_string(),
                            path: path.clone(),
                        })
                    }
                }
            }
            if tests + prods == 0 {
                skipped += 1;
                continue;
            }
            let is_test = match attribution {
                Attribution::Any => tests > 0,
                Attribution::Majority => tests > prods,
            };
            let file = if is_test { FileKind::Test } else { FileKind::Production };
            *counts.entry((op.kind, category, file)).or_default() += 1;
        }
    }
    let mut columns: BTreeMap<(Category, FileKind), u64> = BTreeMap::new();
    for (&(_, c, f), &n) in &counts {
        *columns.entry((c, f)).or_default() += n;
    }
    let cells = counts
        .into_iter()
        .map(|(key, count)| {
            let total = columns[&(key.1, key.2)];
            (key, Share { count, percentage: percentage(count, total) })
        })
        .collect();
    Ok(ProdTestMatrix { cells, skipped })
}

/// One row of a pattern significance table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSignificance {
    pub pattern: String,
    pub refactoring_matches: u64,
    pub non_refactoring_matches: u64,
    pub test: RankTestResult,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Categories(CategoryDistribution),
    ProdTest(ProdTestMatrix),
    LabelSplit(BTreeMap<RefactoringKind, LabelCounts>),
    Significance(Vec<PatternSignificance>),
}

impl Report {
    /// Base name of the emitted files.
    pub fn name(&self) -> &'static str {
        match self {
            Report::Categories(_) => "categories",
            Report::ProdTest(_) => "prodtest",
            Report::LabelSplit(_) => "labelsplit",
            Report::Significance(_) => "significance",
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Categories(d) => {
                out.push_str("category,count,percentage\n");
                for (c, s) in &d.per_category {
                    let _ = writeln!(out, "{},{},{}", c.name(), s.count, pct2(s.percentage));
                }
            }
            Report::ProdTest(m) => {
                out.push_str("refactoring_kind,category,file_kind,count,column_percentage\n");
                for ((k, c, f), s) in &m.cells {
                    let _ = writeln!(out, "{},{},{},{},{}", k.name(), c.name(), f.name(), s.count, pct2(s.percentage));
                }
            }
            Report::LabelSplit(split) => {
                out.push_str("refactoring_kind,labeled,unlabeled,labeled_percentage,unlabeled_percentage\n");
                for (k, l) in split {
                    let (lp, up) = l.percentages();
                    let _ = writeln!(out, "{},{},{},{},{}", k.name(), l.labeled, l.unlabeled, pct2(lp), pct2(up));
                }
            }
            Report::Significance(rows) => {
                out.push_str("pattern,refactoring_matches,non_refactoring_matches,u_statistic,p_value,significant\n");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{:?},{}",
                        csv_field(&r.pattern),
                        r.refactoring_matches,
                        r.non_refactoring_matches,
                        r.test.u_statistic,
                        r.test.p_value,
                        r.significant
                    );
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let value = match self {
            Report::Categories(d) => {
                let per: Map<String, Value> = d
                    .per_category
                    .iter()
                    .map(|(c, s)| (c.name().to_owned(), json!({"count": s.count, "percentage": round2(s.percentage)})))
                    .collect();
                json!({"per_category": per, "total": d.total})
            }
            Report::ProdTest(m) => {
                let cells: Vec<Value> = m
                    .cells
                    .iter()
                    .map(|((k, c, f), s)| {
                        json!({
                            "category": c.name(),
                            "column_percentage": round2(s.percentage),
                            "count": s.count,
                            "file_kind": f.name(),
                            "refactoring_kind": k.name(),
                        })
                    })
                    .collect();
                json!({"cells": cells, "skipped": m.skipped, "total": m.total()})
            }
            Report::LabelSplit(split) => {
                let per: Map<String, Value> = split
                    .iter()
                    .map(|(k, l)| {
                        let (lp, up) = l.percentages();
                        (
                            k.name().to_owned(),
                            json!({
                                "labeled": l.labeled,
                                "labeled_percentage": round2(lp),
                                "unlabeled": l.unlabeled,
                                "unlabeled_percentage": round2(up),
                            }),
                        )
                    })
                    .collect();
                Value::Object(per)
            }
            Report::Significance(rows) => Value::Array(
                rows.iter()
                    .map(|r| {
                        json!({
                            "non_refactoring_matches": r.non_refactoring_matches,
                            "p_value": r.test.p_value,
                            "pattern": r.pattern,
                            "refactoring_matches": r.refactoring_matches,
                            "significant": r.significant,
                            "u_statistic": r.test.u_statistic,
                        })
                    })
                    .collect(),
            ),
        };
        let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
        s.push('\n');
        s
    }

    /// Pie chart for the category distribution, stacked bars for the
    /// production/test split and the label split.
    pub fn to_svg(&self) -> Result<String, ReportError> {
        match self {
            Report::Categories(d) => {
                let slices: Vec<(String, u64)> = d.per_category.iter().map(|(c, s)| (c.name().to_owned(), s.count)).collect();
                Ok(pie_chart("Classified commits per category", &slices))
            }
            Report::ProdTest(m) => {
                let mut rows: BTreeMap<String, Vec<u64>> = BTreeMap::new();
                for ((_, c, f), s) in &m.cells {
                    let row = rows.entry(c.name().to_owned()).or_insert_with(|| vec![0, 0]);
                    row[usize::from(*f == FileKind::Test)] += s.count;
                }
                let rows: Vec<(String, Vec<u64>)> = rows.into_iter().collect();
                Ok(stacked_bars("Refactorings in production and test files", &["production", "test"], &rows))
            }
            Report::LabelSplit(split) => {
                let rows: Vec<(String, Vec<u64>)> = split
                    .iter()
                    .map(|(k, l)| (k.name().to_owned(), vec![l.labeled, l.unlabeled]))
                    .collect();
                Ok(stacked_bars("Operations by commit label", &["labeled", "unlabeled"], &rows))
            }
            Report::Significance(_) => Err(ReportError::NoPlot("significance")),
        }
    }

    /// Writes `<name>.<ext>` into `dir` (created if missing) and returns its path.
    pub fn emit(&self, format: Format, dir: &Path) -> Result<PathBuf, ReportError> {
        let (ext, body) = match format {
            Format::Csv => ("csv", self.to_csv()),
            Format::Json => ("json", self.to_json()),
            Format::Plot => ("svg", self.to_svg()?),
        };
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| ReportError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        let path = dir.join(format!("{}.{ext}", self.name()));
        fs::write(&path, body).map_err(io(&path))?;
        Ok(path)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}
