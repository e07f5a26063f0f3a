use std::path::PathBuf;

use git2::{Commit, Oid, Repository, Sort};

use super::{normalize_author, CommitRecord, CorpusError, ProjectRef, Sha};

/// Commits reachable from a project's default branch, parents first.
pub struct CommitStream {
    repo: Option<Repository>,
    oids: std::vec::IntoIter<Oid>,
    project_id: String,
    origin: String,
}

impl std::fmt::Debug for CommitStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CommitStream")
            .field("project_id", &self.project_id)
            .field("remaining", &self.oids.len())
            .finish()
    }
}

impl CommitStream {
    fn empty(project: &ProjectRef) -> Self {
        CommitStream {
            repo: None,
            oids: Vec::new().into_iter(),
            project_id: project.project_id.clone(),
            origin: project.origin.clone(),
        }
    }

    fn unreadable(&self, e: git2::Error) -> CorpusError {
        CorpusError::UnreadableRepo {
            origin: self.origin.clone(),
            reason: e.message().to_owned(),
        }
    }

    fn record(&self, repo: &Repository, oid: Oid) -> Result<CommitRecord, CorpusError> {
        let commit = repo.find_commit(oid).map_err(|e| self.unreadable(e))?;
        let author = commit.author();
        let author_id = normalize_author(
            &String::from_utf8_lossy(author.name_bytes()),
            &String::from_utf8_lossy(author.email_bytes()),
        );
        Ok(CommitRecord {
            project_id: self.project_id.clone(),
            sha: Sha::parse(&oid.to_string())?,
            author_id,
            timestamp: commit.time().seconds().max(0),
            message: String::from_utf8_lossy(commit.message_bytes()).into_owned(),
            changed_paths: changed_paths(repo, &commit).map_err(|e| self.unreadable(e))?,
        })
    }
}

impl Iterator for CommitStream {
    type Item = Result<CommitRecord, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        let oid = self.oids.next()?;
        let repo = self.repo.as_ref()?;
        Some(self.record(repo, oid))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.oids.size_hint()
    }
}

/// Paths touched by a commit relative to its first parent.
fn changed_paths(repo: &Repository, commit: &Commit<'_>) -> Result<Vec<String>, git2::Error> {
    let tree = commit.tree()?;
    let parent_tree = match commit.parent(0) {
        Ok(parent) => Some(parent.tree()?),
        Err(_) => None,
    };
    let diff = repo.diff_tree_to_tree(parent_tree.as_ref(), Some(&tree), None)?;
    let mut paths: Vec<String> = diff
        .deltas()
        .filter_map(|d| d.new_file().path().or_else(|| d.old_file().path()))
        .map(|p| p.to_string_lossy().into_owned())
        .collect();
    paths.sort();
    paths.dedup();
    Ok(paths)
}

fn is_remote(origin: &str) -> bool {
    origin.contains("://") || origin.starts_with("git@")
}

fn open(project: &ProjectRef) -> Result<Repository, CorpusError> {
    let unreadable = |e: git2::Error| CorpusError::UnreadableRepo {
        origin: project.origin.clone(),
        reason: e.message().to_owned(),
    };
    if project.origin.trim().is_empty() {
        return Err(CorpusError::UnreadableRepo {
            origin: String::new(),
            reason: "empty origin".into(),
        });
    }
    if !is_remote(&project.origin) {
        return Repository::open(&project.origin).map_err(unreadable);
    }
    let dir: PathBuf = std::env::temp_dir().join("refdoc-clones").join(
        project
            .project_id
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
            .collect::<String>(),
    );
    if dir.exists() {
        return Repository::open(&dir).map_err(unreadable);
    }
    git2::build::RepoBuilder::new()
        .bare(true)
        .clone(&project.origin, &dir)
        .map_err(unreadable)
}

fn branch_tip(repo: &Repository, branch: &str) -> Option<Oid> {
    if branch.is_empty() {
        return repo.head().ok()?.target();
    }
    [
        format!("refs/heads/{branch}"),
        format!("refs/remotes/origin/{branch}"),
    ]
    .iter()
    .find_map(|name| repo.refname_to_id(name).ok())
}

/// Opens the project's repository and lists every commit reachable from its
/// default branch in topological order, ties broken by commit time, parents
/// before children. Remote origins are cloned into the system temp dir.
///
/// A repository without commits yields an empty stream.
pub fn ingest_repository(project: &ProjectRef) -> Result<CommitStream, CorpusError> {
    let repo = open(project)?;
    if repo.is_empty().unwrap_or(false) {
        return Ok(CommitStream::empty(project));
    }
    let tip = branch_tip(&repo, &project.default_branch).ok_or_else(|| CorpusError::UnknownBranch {
        origin: project.origin.clone(),
        branch: project.default_branch.clone(),
    })?;
    let unreadable = |e: git2::Error| CorpusError::UnreadableRepo {
        origin: project.origin.clone(),
        reason: e.message().to_owned(),
    };
    let oids = {
        let mut walk = repo.revwalk().map_err(unreadable)?;
        walk.set_sorting(Sort::TOPOLOGICAL | Sort::TIME | Sort::REVERSE)
            .map_err(unreadable)?;
        walk.push(tip).map_err(unreadable)?;
        walk.collect::<Result<Vec<Oid>, _>>().map_err(unreadable)?
    };
    Ok(CommitStream {
        repo: Some(repo),
        oids: oids.into_iter(),
        project_id: project.project_id.clone(),
        origin: project.origin.clone(),
    })
}

/// Reads file contents at given commits of one repository.
pub struct RepoFiles {
    repo: Repository,
    origin: String,
}

impl RepoFiles {
    pub fn open(project: &ProjectRef) -> Result<RepoFiles, CorpusError> {
        Ok(RepoFiles {
            repo: open(project)?,
            origin: project.origin.clone(),
        })
    }

    /// `path` as of `sha`, or as of its first parent when the commit
    /// deleted it; `None` when neither tree has the file.
    pub fn read(&self, sha: &Sha, path: &str) -> Result<Option<Vec<u8>>, CorpusError> {
        let unreadable = |e: git2::Error| CorpusError::UnreadableRepo {
            origin: self.origin.clone(),
            reason: e.message().to_owned(),
        };
        let oid = Oid::from_str(sha.as_str()).map_err(unreadable)?;
        let commit = self.repo.find_commit(oid).map_err(unreadable)?;
        let mut trees = vec![commit.tree().map_err(unreadable)?];
        if let Ok(parent) = commit.parent(0) {
            trees.push(parent.tree().map_err(unreadable)?);
        }
        for tree in trees {
            if let Ok(entry) = tree.get_path(std::path::Path::new(path)) {
                if let Ok(blob) = self.repo.find_blob(entry.id()) {
                    return Ok(Some(blob.content().to_vec()));
                }
            }
        }
        Ok(None)
    }
}
