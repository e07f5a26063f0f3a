//! Reader for Refactoring Miner's JSON output.
//!
//! ```json
//! {"commits": [{"sha1": "...", "refactorings": [
//!     {"type": "Extract Method", "description": "...",
//!      "leftSideLocations": [{"filePath": "..."}],
//!      "rightSideLocations": [{"filePath": "..."}]}]}]}
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;

use super::{CorpusError, KindTable, RefactoringKind, RefactoringOperation, Sha};

#[derive(Deserialize)]
struct Payload {
    commits: Vec<RawCommit>,
}

#[derive(Deserialize)]
struct RawCommit {
    sha1: String,
    #[serde(default)]
    refactorings: Vec<RawRefactoring>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawRefactoring {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    left_side_locations: Vec<RawLocation>,
    #[serde(default)]
    right_side_locations: Vec<RawLocation>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawLocation {
    file_path: Option<String>,
}

/// Parses a payload with the shipped kind table.
pub fn parse_refminer_json(
    payload: &[u8],
) -> Result<BTreeMap<Sha, Vec<RefactoringOperation>>, CorpusError> {
    parse_refminer_json_with(payload, &KindTable::default())
}

pub fn parse_refminer_json_with(
    payload: &[u8],
    table: &KindTable,
) -> Result<BTreeMap<Sha, Vec<RefactoringOperation>>, CorpusError> {
    let text = std::str::from_utf8(payload).map_err(|e| CorpusError::MalformedJson(e.to_string()))?;
    let payload: Payload =
        serde_json::from_str(text).map_err(|e| CorpusError::MalformedJson(e.to_string()))?;

    let mut out: BTreeMap<Sha, Vec<RefactoringOperation>> = BTreeMap::new();
    for commit in payload.commits {
        if commit.refactorings.is_empty() {
            continue;
        }
        let sha = Sha::parse(&commit.sha1.to_ascii_lowercase())
            .map_err(|_| CorpusError::MalformedJson(format!("bad sha1 {:?}", commit.sha1)))?;
        let ops = out.entry(sha).or_default();
        for raw in commit.refactorings {
            let kind: RefactoringKind = raw.kind.parse()?;
            let mut paths: Vec<String> = raw
                .left_side_locations
                .iter()
                .chain(&raw.right_side_locations)
                .filter_map(|l| l.file_path.clone())
                .collect();
            paths.sort();
            paths.dedup();
            ops.push(RefactoringOperation {
                kind,
                description: raw.description,
                element_level: table.level(kind),
                involved_paths: paths,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ElementLevel;

    fn sha(c: char) -> String {
        c.to_string().repeat(40)
    }

    #[test]
    fn single_extract_method() {
        let json = format!(
            r#"{{"commits":[{{"repository":"r","sha1":"{}","url":"u","refactorings":[
                {{"type":"Extract Method","description":"Extract Method a() from b()",
                  "leftSideLocations":[{{"filePath":"src/A.java","startLine":1}}],
                  "rightSideLocations":[{{"filePath":"src/A.java"}}]}}]}}]}}"#,
            sha('a')
        );
        let map = parse_refminer_json(json.as_bytes()).unwrap();
        assert_eq!(map.len(), 1);
        let ops = &map[&Sha::parse(&sha('a')).unwrap()];
        assert_eq!(ops[0].kind, RefactoringKind::ExtractMethod);
        assert_eq!(ops[0].element_level, ElementLevel::Method);
        assert_eq!(ops[0].involved_paths, vec!["src/A.java".to_string()]);
    }

    #[test]
    fn empty_refactoring_list_omitted() {
        let json = format!(
            r#"{{"commits":[{{"sha1":"{}","refactorings":[]}},{{"sha1":"{}"}}]}}"#,
            sha('a'),
            sha('b')
        );
        assert!(parse_refminer_json(json.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn unknown_kind_names_offender() {
        let json = format!(
            r#"{{"commits":[{{"sha1":"{}","refactorings":[{{"type":"Change Return Type"}}]}}]}}"#,
            sha('a')
        );
        match parse_refminer_json(json.as_bytes()) {
            Err(CorpusError::UnknownRefactoringKind(name)) => assert_eq!(name, "Change Return Type"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(
            parse_refminer_json(b"{\"commits\": ["),
            Err(CorpusError::MalformedJson(_))
        ));
        assert!(matches!(
            parse_refminer_json(&[0xff, 0xfe]),
            Err(CorpusError::MalformedJson(_))
        ));
    }
}
