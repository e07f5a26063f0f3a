//! Self-affirmed refactoring (SAR) phrase patterns: catalog, matcher,
//! per-project occurrence vectors, significance flags and labeled/unlabeled
//! splits.

mod matcher;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CommitRecord, RefactoringCommit, RefactoringKind};
use crate::stats::{mann_whitney_u, Alternative, RankTestResult};

pub use matcher::{message_words, Matcher};

const SHIPPED_CATALOG: &str = include_str!("../../data/sar_catalog.tsv");

/// Note attached to catalog rows that were reported as significant.
pub const SIGNIFICANT_NOTE: &str = "paper-significant";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SarError {
    #[error("malformed template {template:?}: {reason}")]
    MalformedTemplate { template: String, reason: String },
    #[error("catalog line {line}: {reason}")]
    MalformedCatalog { line: usize, reason: String },
    #[error("unknown pattern scope {0:?}")]
    UnknownScope(String),
    #[error("{patterns} patterns but {pairs} occurrence pairs")]
    LengthMismatch { patterns: usize, pairs: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scope {
    #[serde(rename = "generic")]
    Generic,
    BugFix,
    CodeSmell,
    ExternalQA,
    Functional,
    InternalQA,
}

impl Scope {
    pub fn name(self) -> &'static str {
        match self {
            Scope::Generic => "generic",
            Scope::BugFix => "BugFix",
            Scope::CodeSmell => "CodeSmell",
            Scope::ExternalQA => "ExternalQA",
            Scope::Functional => "Functional",
            Scope::InternalQA => "InternalQA",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scope {
    type Err = SarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "generic" => Scope::Generic,
            "bugfix" => Scope::BugFix,
            "codesmell" => Scope::CodeSmell,
            "externalqa" | "external" => Scope::ExternalQA,
            "functional" => Scope::Functional,
            "internalqa" | "internal" => Scope::InternalQA,
            _ => return Err(SarError::UnknownScope(s.to_owned())),
        })
    }
}

/// One word of a template: exact word, or a prefix when `prefix` is set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordTemplate {
    pub stem: String,
    pub prefix: bool,
}

impl WordTemplate {
    pub fn matches(&self, word: &str) -> bool {
        if self.prefix {
            word.starts_with(&self.stem)
        } else {
            word == self.stem
        }
    }
}

impl fmt::Display for WordTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.stem, if self.prefix { "*" } else { "" })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarPattern {
    /// Template as written in the catalog.
    pub text: String,
    pub template: Vec<WordTemplate>,
    /// Further word sequences that also count as a match (split forms of
    /// fused CamelCase words).
    pub alternatives: Vec<Vec<WordTemplate>>,
    pub scope: Scope,
    pub note: Option<String>,
    pub significant: Option<bool>,
}

impl SarPattern {
    /// Every accepted word sequence, primary first.
    pub fn forms(&self) -> impl Iterator<Item = &[WordTemplate]> {
        std::iter::once(self.template.as_slice()).chain(self.alternatives.iter().map(Vec::as_slice))
    }

    pub fn is_note_significant(&self) -> bool {
        self.note.as_deref() == Some(SIGNIFICANT_NOTE)
    }

    /// Normalized template, e.g. `clean* up`.
    pub fn display_template(&self) -> String {
        self.template.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
    }
}

fn has_camel_hump(word: &str) -> bool {
    word.chars().zip(word.chars().skip(1)).any(|(a, b)| a.is_lowercase() && b.is_uppercase())
}

fn camel_split(word: &str) -> Vec<String> {
    let mut parts = vec![String::new()];
    let mut prev_lower = false;
    for c in word.chars() {
        if prev_lower && c.is_uppercase() {
            parts.push(String::new());
        }
        prev_lower = c.is_lowercase();
        parts.last_mut().unwrap().push(c);
    }
    parts
}

fn word_template(raw: &str, template: &str) -> Result<WordTemplate, SarError> {
    let malformed = |reason: &str| SarError::MalformedTemplate {
        template: template.to_owned(),
        reason: reason.to_owned(),
    };
    let lower = raw.to_lowercase();
    let (stem, prefix) = match lower.strip_suffix('*') {
        Some(s) => (s, true),
        None => (lower.as_str(), false),
    };
    if stem.contains('*') {
        return Err(malformed("'*' may only end a word"));
    }
    if stem.is_empty() {
        return Err(malformed("empty word"));
    }
    if !stem.chars().all(|c| c.is_ascii_lowercase()) {
        return Err(malformed("words may only contain the letters a-z"));
    }
    Ok(WordTemplate {
        stem: stem.to_owned(),
        prefix,
    })
}

/// Compiles one template. Letters are lowercased and every other character
/// except `*` separates words; a trailing `*` turns a word into a prefix.
/// A CamelCase word such as `CleanUp` matches the fused word `cleanup` and,
/// as an alternative, the split words `clean up`.
pub fn compile_pattern(text: &str) -> Result<SarPattern, SarError> {
    let raw_words: Vec<&str> = text
        .split(|c: char| !(c.is_alphabetic() || c == '*'))
        .filter(|w| !w.is_empty())
        .collect();
    if raw_words.is_empty() {
        return Err(SarError::MalformedTemplate {
            template: text.to_owned(),
            reason: "empty template".into(),
        });
    }
    let template = raw_words
        .iter()
        .map(|w| word_template(w, text))
        .collect::<Result<Vec<_>, _>>()?;
    let mut alternatives = Vec::new();
    if raw_words.iter().any(|w| has_camel_hump(w)) {
        let split: Vec<WordTemplate> = raw_words
            .iter()
            .flat_map(|w| {
                if has_camel_hump(w) {
                    camel_split(w)
                } else {
                    vec![w.to_string()]
                }
            })
            .map(|w| word_template(&w, text))
            .collect::<Result<_, _>>()?;
        alternatives.push(split);
    }
    Ok(SarPattern {
        text: text.to_owned(),
        template,
        alternatives,
        scope: Scope::Generic,
        note: None,
        significant: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternCatalog {
    pub version: String,
    pub patterns: Vec<SarPattern>,
}

impl PatternCatalog {
    /// Parses `scope<TAB>template[<TAB>note]` lines; `#` starts a comment
    /// line. Rows are kept in file order, repeats included.
    pub fn parse(text: &str, version: &str) -> Result<PatternCatalog, SarError> {
        let mut patterns = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(scope), Some(template)) = (fields.next(), fields.next()) else {
                return Err(SarError::MalformedCatalog {
                    line: n + 1,
                    reason: "expected scope<TAB>template".into(),
                });
            };
            let mut p = compile_pattern(template).map_err(|e| SarError::MalformedCatalog {
                line: n + 1,
                reason: e.to_string(),
            })?;
            p.scope = scope.parse().map_err(|e: SarError| SarError::MalformedCatalog {
                line: n + 1,
                reason: e.to_string(),
            })?;
            p.note = fields.next().map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned);
            patterns.push(p);
        }
        Ok(PatternCatalog {
            version: version.to_owned(),
            patterns,
        })
    }

    pub fn shipped() -> PatternCatalog {
        PatternCatalog::parse(SHIPPED_CATALOG, "sar-catalog-1").expect("shipped catalog parses")
    }

    /// The single-pattern set `refactor*`.
    pub fn keyword_only() -> PatternCatalog {
        PatternCatalog {
            version: "keyword".into(),
            patterns: vec![compile_pattern("refactor*").expect("valid template")],
        }
    }

    pub fn from_patterns(version: &str, patterns: Vec<SarPattern>) -> PatternCatalog {
        PatternCatalog {
            version: version.to_owned(),
            patterns,
        }
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn matcher(&self) -> Matcher {
        Matcher::new(&self.patterns)
    }
}

/// Indices (into `catalog.patterns`) of the patterns found in `message`.
/// Each pattern is reported at most once.
pub fn scan_message(message: &str, catalog: &PatternCatalog) -> BTreeSet<usize> {
    catalog.matcher().scan(message)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceVector {
    pub pattern: usize,
    /// Matching commits per project, in [`OccurrenceTable::projects`] order.
    pub per_project: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceTable {
    /// Canonical (sorted) project order shared by every vector.
    pub projects: Vec<String>,
    /// `(refactoring, non-refactoring)` vectors, one pair per pattern.
    pub pairs: Vec<(OccurrenceVector, OccurrenceVector)>,
}

fn count_matches(matcher: &Matcher, n_patterns: usize, slot: &BTreeMap<&str, usize>, commits: &[&CommitRecord]) -> Vec<Vec<u64>> {
    let hits: Vec<(usize, BTreeSet<usize>)> = commits
        .par_iter()
        .map(|c| (slot[c.project_id.as_str()], matcher.scan(&c.message)))
        .collect();
    let mut counts = vec![vec![0u64; slot.len()]; n_patterns];
    for (p, found) in hits {
        for pat in found {
            counts[pat][p] += 1;
        }
    }
    counts
}

/// Per-project counts of commits whose message matches each pattern, for
/// the refactoring and the non-refactoring corpus. The project universe is
/// the sorted union of project ids in both corpora.
pub fn occurrence_vectors(
    catalog: &PatternCatalog,
    refactoring: &[RefactoringCommit],
    nonrefactoring: &[CommitRecord],
) -> OccurrenceTable {
    let projects: BTreeSet<&str> = refactoring
        .iter()
        .map(|r| r.commit.project_id.as_str())
        .chain(nonrefactoring.iter().map(|c| c.project_id.as_str()))
        .collect();
    occurrence_vectors_over(catalog, refactoring, nonrefactoring, &projects.into_iter().map(str::to_owned).collect::<Vec<_>>())
}

/// Same as [`occurrence_vectors`] over an explicit project list; projects
/// are sorted and commits of unlisted projects ignored.
pub fn occurrence_vectors_over(
    catalog: &PatternCatalog,
    refactoring: &[RefactoringCommit],
    nonrefactoring: &[CommitRecord],
    projects: &[String],
) -> OccurrenceTable {
    let mut projects = projects.to_vec();
    projects.sort();
    projects.dedup();
    let slot: BTreeMap<&str, usize> = projects.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
    let matcher = catalog.matcher();
    let keep = |c: &&CommitRecord| slot.contains_key(c.project_id.as_str());
    let refs: Vec<&CommitRecord> = refactoring.iter().map(|r| &r.commit).filter(keep).collect();
    let nons: Vec<&CommitRecord> = nonrefactoring.iter().filter(keep).collect();
    let a = count_matches(&matcher, catalog.len(), &slot, &refs);
    let b = count_matches(&matcher, catalog.len(), &slot, &nons);
    let pairs = a
        .into_iter()
        .zip(b)
        .enumerate()
        .map(|(pattern, (x, y))| {
            (
                OccurrenceVector { pattern, per_project: x },
                OccurrenceVector { pattern, per_project: y },
            )
        })
        .collect();
    OccurrenceTable { projects, pairs }
}

/// One-sided Mann-Whitney test per pattern (refactoring greater than
/// non-refactoring); sets `significant` on every pattern. Returns the
/// flagged catalog and the per-pattern test results.
pub fn significance_filter(
    catalog: &PatternCatalog,
    table: &OccurrenceTable,
    alpha: f64,
) -> Result<(PatternCatalog, Vec<RankTestResult>), SarError> {
    if table.pairs.len() != catalog.len() {
        return Err(SarError::LengthMismatch {
            patterns: catalog.len(),
            pairs: table.pairs.len(),
        });
    }
    let results: Vec<RankTestResult> = table
        .pairs
        .par_iter()
        .map(|(x, y)| {
            let xs: Vec<f64> = x.per_project.iter().map(|&v| v as f64).collect();
            let ys: Vec<f64> = y.per_project.iter().map(|&v| v as f64).collect();
            mann_whitney_u(&xs, &ys, Alternative::Greater).unwrap_or(RankTestResult {
                u_statistic: 0.0,
                p_value: 1.0,
                alternative: Alternative::Greater,
                method: crate::stats::Method::Exact,
            })
        })
        .collect();
    let mut flagged = catalog.clone();
    for (p, r) in flagged.patterns.iter_mut().zip(&results) {
        p.significant = Some(r.p_value < alpha);
    }
    Ok((flagged, results))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub labeled: u64,
    pub unlabeled: u64,
}

impl LabelCounts {
    pub fn total(&self) -> u64 {
        self.labeled + self.unlabeled
    }

    /// `(labeled %, unlabeled %)`; both 0 when there are no operations.
    pub fn percentages(&self) -> (f64, f64) {
        let t = self.total();
        if t == 0 {
            (0.0, 0.0)
        } else {
            let l = 100.0 * self.labeled as f64 / t as f64;
            (l, 100.0 - l)
        }
    }
}

/// Whether each refactoring commit matches at least one pattern.
pub fn labeled_commits(refcommits: &[RefactoringCommit], patterns: &PatternCatalog) -> Vec<bool> {
    let matcher = patterns.matcher();
    refcommits.par_iter().map(|r| matcher.matches_any(&r.commit.message)).collect()
}

/// Operations per refactoring kind, split by whether their commit's message
/// matches any pattern of `patterns`. Every kind is present.
pub fn label_split(refcommits: &[RefactoringCommit], patterns: &PatternCatalog) -> BTreeMap<RefactoringKind, LabelCounts> {
    let labeled = labeled_commits(refcommits, patterns);
    let mut out: BTreeMap<RefactoringKind, LabelCounts> =
        RefactoringKind::ALL.iter().map(|&k| (k, LabelCounts::default())).collect();
    for (r, &l) in refcommits.iter().zip(&labeled) {
        for op in &r.operations {
            let e = out.get_mut(&op.kind).expect("every kind present");
            if l {
                e.labeled += 1;
            } else {
                e.unlabeled += 1;
            }
        }
    }
    out
}
