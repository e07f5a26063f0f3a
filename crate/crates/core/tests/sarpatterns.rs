use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use refdoc_core::corpus::{CommitRecord, RefactoringCommit, Sha};
use refdoc_core::sarpatterns::{labeled_commits, PatternCatalog, SarPattern};

/// Builds the oracle regex straight from the catalog text: one alternative
/// for the words as written and, for CamelCase words, one for the split
/// form. Words are joined by runs of non-letters.
fn oracle(text: &str) -> Regex {
    let words: Vec<&str> = text.split(|c: char| !(c.is_ascii_alphabetic() || c == '*')).filter(|w| !w.is_empty()).collect();
    let word_re = |w: &str| {
        let lower = w.to_lowercase();
        match lower.strip_suffix('*') {
            Some(stem) => format!("{stem}[a-z]*"),
            None => lower,
        }
    };
    let seq = |ws: &[String]| ws.iter().map(|w| word_re(w)).collect::<Vec<_>>().join("[^a-z]+");
    let fused: Vec<String> = words.iter().map(|w| w.to_string()).collect();
    let mut alts = vec![seq(&fused)];
    let split: Vec<String> = words
        .iter()
        .flat_map(|w| {
            let mut parts = vec![String::new()];
            let chars: Vec<char> = w.chars().collect();
            for (i, &c) in chars.iter().enumerate() {
                if i > 0 && chars[i - 1].is_ascii_lowercase() && c.is_ascii_uppercase() {
                    parts.push(String::new());
                }
                parts.last_mut().unwrap().push(c);
            }
            parts
        })
        .collect();
    if split != fused {
        alts.push(seq(&split));
    }
    Regex::new(&format!("(?:^|[^a-z])(?:{})(?:[^a-z]|$)", alts.join("|"))).unwrap()
}

fn oracle_matches(re: &Regex, message: &str) -> bool {
    re.is_match(&message.to_lowercase())
}

/// Message vocabulary built from the chosen patterns' own words, their
/// extensions and truncations, plus distractors.
fn vocabulary(patterns: &[&SarPattern]) -> Vec<String> {
    let mut v: Vec<String> = vec!["the", "of", "and", "a", "unit", "tests", "x"].into_iter().map(String::from).collect();
    for p in patterns {
        for form in p.forms() {
            for w in form {
                v.push(w.stem.clone());
                v.push(format!("{}ed", w.stem));
                v.push(format!("{}ing", w.stem));
                v.push(w.stem.to_uppercase());
                if w.stem.len() > 2 {
                    v.push(w.stem[..w.stem.len() - 1].to_string());
                }
                v.push(format!("pre{}", w.stem));
            }
        }
    }
    v
}

const SEPARATORS: [&str; 9] = [" ", "  ", "-", ", ", ".\n", "/", "_", "3", " (é) "];

#[test]
fn matcher_agrees_with_regex_oracle() {
    let catalog = PatternCatalog::shipped();
    // 50 patterns spread over the catalog, plus every CamelCase row
    let step = catalog.len() / 44;
    let mut chosen: Vec<usize> = (0..44).map(|i| i * step).collect();
    for (i, p) in catalog.patterns.iter().enumerate() {
        if !p.alternatives.is_empty() && !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    chosen.truncate(50);
    assert_eq!(chosen.len(), 50);
    let subset = PatternCatalog::from_patterns("subset", chosen.iter().map(|&i| catalog.patterns[i].clone()).collect());
    let regexes: Vec<Regex> = subset.patterns.iter().map(|p| oracle(&p.text)).collect();
    let vocab = vocabulary(&subset.patterns.iter().collect::<Vec<_>>());
    let matcher = subset.matcher();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut discrepancies = Vec::new();
    let mut hits = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..10);
        let mut message = String::new();
        for k in 0..n {
            if k > 0 {
                message.push_str(SEPARATORS.choose(&mut rng).unwrap());
            }
            message.push_str(vocab.choose(&mut rng).unwrap());
        }
        let found = matcher.scan(&message);
        for (j, re) in regexes.iter().enumerate() {
            let expected = oracle_matches(re, &message);
            hits += usize::from(expected);
            if expected != found.contains(&j) {
                discrepancies.push((message.clone(), subset.patterns[j].text.clone()));
            }
        }
    }
    assert!(discrepancies.is_empty(), "{} discrepancies, first: {:?}", discrepancies.len(), &discrepancies[..discrepancies.len().min(5)]);
    // the corpus exercises both outcomes
    assert!(hits > 1000, "only {hits} matches");
}

fn refcommit(i: usize, message: String) -> RefactoringCommit {
    RefactoringCommit {
        commit: CommitRecord {
            project_id: "p".into(),
            sha: Sha::parse(&format!("{i:040x}")).unwrap(),
            author_id: String::new(),
            timestamp: 0,
            message,
            changed_paths: vec![],
        },
        operations: vec![],
    }
}

proptest! {
    #[test]
    fn keyword_labeled_subset_of_sar_labeled(messages in prop::collection::vec("[a-zA-Z .,-]{0,40}|.*[Rr]efactor[a-z]* .*", 0..30)) {
        let commits: Vec<RefactoringCommit> = messages.into_iter().enumerate().map(|(i, m)| refcommit(i, m)).collect();
        let keyword = labeled_commits(&commits, &PatternCatalog::keyword_only());
        let sar = labeled_commits(&commits, &PatternCatalog::shipped());
        for (k, s) in keyword.iter().zip(&sar) {
            prop_assert!(!k || *s);
        }
    }
}
