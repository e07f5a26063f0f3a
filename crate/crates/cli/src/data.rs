//! CSV and JSON files exchanged between subcommands.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use refdoc_core::classify::Category;
use refdoc_core::corpus::{CommitRecord, RefactoringCommit, Sha};
use refdoc_core::testdetect::FileKind;
use serde::{Deserialize, Serialize};

/// A commit message row: `sha,project_id,message[,label]`. Extra columns
/// are ignored, so `commits.csv` from `mine` is accepted as well.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MessageRow {
    pub sha: String,
    pub project_id: String,
    #[serde(default)]
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

pub fn read_messages(path: &Path) -> Result<Vec<MessageRow>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    reader
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.with_context(|| format!("{} row {}", path.display(), i + 1)))
        .collect()
}

pub fn to_commit(row: &MessageRow) -> Result<CommitRecord> {
    Ok(CommitRecord {
        project_id: row.project_id.clone(),
        sha: Sha::parse(row.sha.trim())?,
        author_id: String::new(),
        timestamp: 0,
        message: row.message.clone(),
        changed_paths: Vec::new(),
    })
}

pub fn label_of(row: &MessageRow) -> Result<Option<Category>> {
    match row.label.as_deref().map(str::trim) {
        None | Some("") => Ok(None),
        Some(l) => Ok(Some(l.parse().with_context(|| format!("label of commit {}", row.sha))?)),
    }
}

/// Rows that must all carry labels.
pub fn labeled_commits(rows: &[MessageRow]) -> Result<(Vec<CommitRecord>, Vec<Category>)> {
    let mut commits = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for row in rows {
        let Some(label) = label_of(row)? else {
            bail!("commit {} has no label", row.sha);
        };
        commits.push(to_commit(row)?);
        labels.push(label);
    }
    Ok((commits, labels))
}

pub fn write_messages(path: &Path, rows: &[MessageRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Full commit rows as written by `mine`.
#[derive(Debug, Serialize, Deserialize)]
struct CommitRow {
    project_id: String,
    sha: String,
    author_id: String,
    timestamp: i64,
    message: String,
    /// `;`-separated.
    changed_paths: String,
}

pub fn write_commits(path: &Path, commits: &[CommitRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for c in commits {
        w.serialize(CommitRow {
            project_id: c.project_id.clone(),
            sha: c.sha.to_string(),
            author_id: c.author_id.clone(),
            timestamp: c.timestamp,
            message: c.message.clone(),
            changed_paths: c.changed_paths.join(";"),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_commits(path: &Path) -> Result<Vec<CommitRecord>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<CommitRow>().enumerate() {
        let row = row.with_context(|| format!("{} row {}", path.display(), i + 1))?;
        out.push(CommitRecord {
            project_id: row.project_id,
            sha: Sha::parse(&row.sha)?,
            author_id: row.author_id,
            timestamp: row.timestamp,
            message: row.message,
            changed_paths: row.changed_paths.split(';').filter(|p| !p.is_empty()).map(str::to_owned).collect(),
        });
    }
    Ok(out)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn read_refactorings(path: &Path) -> Result<Vec<RefactoringCommit>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileKindRow {
    pub project_id: String,
    pub path: String,
    pub kind: FileKind,
    /// `reason:line:method` entries separated by `;`.
    #[serde(default)]
    pub evidence: String,
}

pub fn write_file_kinds(path: &Path, rows: &[FileKindRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_file_kinds(path: &Path) -> Result<Vec<FileKindRow>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    reader
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.with_context(|| format!("{} row {}", path.display(), i + 1)))
        .collect()
}

/// `sha -> category` from a message CSV with a label column.
pub fn read_labels(path: &Path) -> Result<BTreeMap<Sha, Category>> {
    let mut out = BTreeMap::new();
    for row in read_messages(path)? {
        if let Some(label) = label_of(&row)? {
            out.insert(Sha::parse(row.sha.trim())?, label);
        }
    }
    Ok(out)
}
