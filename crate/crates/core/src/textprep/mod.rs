//! Commit-message normalization.
//!
//! Each sentence goes through contraction expansion, noise stripping,
//! tokenization, stop-word removal and lemmatization. Lemmas that land on a
//! stop word (`refactored` -> `refactor`) are dropped as well.

mod lemma;

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use lemma::{lemmatize, Lemmatizer};

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");
const CUSTOM_STOPWORDS: &str = include_str!("../../data/stopwords_custom.txt");
const CONTRACTIONS: &str = include_str!("../../data/contractions.tsv");

/// Custom stop words every [`StopWordSet`] carries.
pub const REQUIRED_CUSTOM: [&str; 15] = [
    "git", "code", "refactor", "svn", "gitsvnid", "signedoffby", "reviewedon", "testedby", "us",
    "id", "changeid", "lot", "small", "thing", "way",
];

fn word_list(text: &str) -> impl Iterator<Item = String> + '_ {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopWordSet {
    pub default_words: BTreeSet<String>,
    pub custom_words: BTreeSet<String>,
}

impl StopWordSet {
    /// `custom` is extended with [`REQUIRED_CUSTOM`].
    pub fn new<I, J>(default: I, custom: J) -> Self
    where
        I: IntoIterator<Item = String>,
        J: IntoIterator<Item = String>,
    {
        let mut custom_words: BTreeSet<String> = custom.into_iter().collect();
        custom_words.extend(REQUIRED_CUSTOM.iter().map(|w| w.to_string()));
        StopWordSet {
            default_words: default.into_iter().collect(),
            custom_words,
        }
    }

    /// Parses one-word-per-line lists; `#` starts a comment line.
    pub fn from_lists(default: &str, custom: &str) -> Self {
        StopWordSet::new(word_list(default), word_list(custom))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.default_words.contains(word) || self.custom_words.contains(word)
    }
}

impl Default for StopWordSet {
    fn default() -> Self {
        StopWordSet::from_lists(DEFAULT_STOPWORDS, CUSTOM_STOPWORDS)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedMessage {
    pub original: String,
    /// Lemmas per sentence.
    pub sentences: Vec<Vec<String>>,
    pub lemmas: Vec<String>,
}

fn contraction_table() -> &'static HashMap<String, String> {
    static TABLE: OnceLock<HashMap<String, String>> = OnceLock::new();
    TABLE.get_or_init(|| {
        CONTRACTIONS
            .lines()
            .filter(|l| !l.starts_with('#'))
            .filter_map(|l| l.split_once('\t'))
            .map(|(k, v)| (k.to_owned(), v.to_owned()))
            .collect()
    })
}

fn is_word_char(c: char) -> bool {
    c.is_alphabetic() || c == '\'' || c == '\u{2019}'
}

/// Replaces contractions (`I'm` -> `I am`), keeping the case of the first
/// letter. Curly apostrophes are accepted.
pub fn expand_contractions(text: &str) -> String {
    let table = contraction_table();
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while !rest.is_empty() {
        let word_len = rest
            .char_indices()
            .find(|&(_, c)| !is_word_char(c))
            .map_or(rest.len(), |(i, _)| i);
        if word_len == 0 {
            let c = rest.chars().next().unwrap();
            out.push(c);
            rest = &rest[c.len_utf8()..];
            continue;
        }
        let word = &rest[..word_len];
        let key = word.replace('\u{2019}', "'").to_lowercase();
        match table.get(&key) {
            Some(expansion) => {
                let upper = word.chars().next().is_some_and(char::is_uppercase);
                let mut chars = expansion.chars();
                if let Some(first) = chars.next() {
                    if upper {
                        out.extend(first.to_uppercase());
                    } else {
                        out.push(first);
                    }
                    out.push_str(chars.as_str());
                }
            }
            None => out.push_str(word),
        }
        rest = &rest[word_len..];
    }
    out
}

fn is_url(token: &str) -> bool {
    let lower = token.to_lowercase();
    lower.contains("://")
        || lower
            .trim_start_matches(|c: char| !c.is_alphanumeric())
            .starts_with("www.")
}

/// Drops URLs, then lowercases and keeps only `a-z` runs of two or more
/// letters, separated by single spaces.
pub fn strip_noise(text: &str) -> String {
    let kept: String = text
        .split_whitespace()
        .filter(|t| !is_url(t))
        .flat_map(|t| t.to_lowercase().chars().chain(std::iter::once(' ')).collect::<Vec<_>>())
        .map(|c| if c.is_ascii_lowercase() { c } else { ' ' })
        .collect();
    kept.split_whitespace()
        .filter(|w| w.len() >= 2)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_owned).collect()
}

pub fn remove_stopwords<S: AsRef<str>>(tokens: &[S], stops: &StopWordSet) -> Vec<String> {
    tokens
        .iter()
        .map(AsRef::as_ref)
        .filter(|t| !stops.contains(t))
        .map(str::to_owned)
        .collect()
}

/// Splits at newlines and at `.`, `!` or `?` followed by whitespace or the
/// end of the text. Dots inside tokens (`v1.2`, URLs) do not split.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        let boundary = match c {
            '\n' => true,
            '.' | '!' | '?' => chars.peek().is_none_or(|&(_, next)| next.is_whitespace()),
            _ => false,
        };
        if boundary {
            out.push(&text[start..i]);
            start = i + c.len_utf8();
        }
    }
    out.push(&text[start..]);
    out.retain(|s| !s.trim().is_empty());
    out
}

/// Runs the pipeline on one sentence.
pub fn normalize_sentence(sentence: &str, stops: &StopWordSet) -> Vec<String> {
    let tokens = tokenize(&strip_noise(&expand_contractions(sentence)));
    let lemmas = lemmatize(&remove_stopwords(&tokens, stops));
    lemmas
        .into_iter()
        .filter(|l| l.len() >= 2 && !stops.contains(l))
        .collect()
}

pub fn normalize(message: &str, stops: &StopWordSet) -> NormalizedMessage {
    let sentences: Vec<Vec<String>> = split_sentences(message)
        .into_iter()
        .map(|s| normalize_sentence(s, stops))
        .filter(|s| !s.is_empty())
        .collect();
    NormalizedMessage {
        original: message.to_owned(),
        lemmas: sentences.concat(),
        sentences,
    }
}
