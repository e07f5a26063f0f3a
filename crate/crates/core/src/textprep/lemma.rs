//! Rule and lexicon lemmatizer.
//!
//! Lookup order: irregular table, lexicon (identity), suffix rules. Suffix
//! rules propose candidate lemmas and the first one found in the lexicon
//! wins; otherwise a Porter-style fallback picks one. A rule result that
//! would itself be rewritten again is rejected, so every output is a fixed
//! point of [`Lemmatizer::lemma`].

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

const IRREGULAR: &str = include_str!("../../data/lemma_irregular.tsv");
const LEXICON: &str = include_str!("../../data/lemma_lexicon.txt");

#[derive(Debug, Clone)]
pub struct Lemmatizer {
    irregular: HashMap<String, String>,
    lexicon: HashSet<String>,
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

impl Lemmatizer {
    /// Builds a lemmatizer from an irregular table (`form<TAB>lemma`) and a
    /// lexicon of base forms. Irregular lemmas join the lexicon and irregular
    /// inflected forms leave it.
    pub fn from_tables(irregular: &str, lexicon: &str) -> Self {
        let irregular: HashMap<String, String> = data_lines(irregular)
            .filter_map(|l| l.split_once('\t'))
            .map(|(k, v)| (k.trim().to_owned(), v.trim().to_owned()))
            .collect();
        let mut lexicon: HashSet<String> = data_lines(lexicon).map(str::to_owned).collect();
        lexicon.extend(irregular.values().cloned());
        // inflected forms listed as irregular are not base forms
        lexicon.retain(|w| irregular.get(w).is_none_or(|l| l == w));
        Lemmatizer { irregular, lexicon }
    }

    pub fn shipped() -> &'static Lemmatizer {
        static SHIPPED: OnceLock<Lemmatizer> = OnceLock::new();
        SHIPPED.get_or_init(|| Lemmatizer::from_tables(IRREGULAR, LEXICON))
    }

    pub fn lemma(&self, word: &str) -> String {
        if let Some(l) = self.irregular.get(word) {
            return l.clone();
        }
        if self.lexicon.contains(word) {
            return word.to_owned();
        }
        match self.rule(word) {
            Some(l) if self.is_fixed_point(&l) => l,
            _ => word.to_owned(),
        }
    }

    fn is_fixed_point(&self, word: &str) -> bool {
        if word.len() < 2 {
            return false;
        }
        if self.lexicon.contains(word) {
            return true;
        }
        if self.irregular.contains_key(word) {
            return false;
        }
        self.rule(word).is_none_or(|again| again == word)
    }

    fn known(&self, w: &str) -> bool {
        self.lexicon.contains(w)
    }

    fn first_known(&self, candidates: &[String]) -> Option<String> {
        candidates.iter().find(|c| self.known(c)).cloned()
    }

    fn rule(&self, w: &str) -> Option<String> {
        let n = w.len();
        if n >= 5 && w.ends_with("ies") {
            let stem = &w[..n - 3];
            let cands = [format!("{stem}ie"), format!("{stem}y")];
            return Some(self.first_known(&cands).unwrap_or_else(|| cands[1].clone()));
        }
        if n >= 4 && w.ends_with("es") {
            let minus_s = w[..n - 1].to_owned();
            let minus_es = w[..n - 2].to_owned();
            if let Some(l) = self.first_known(&[minus_s.clone(), minus_es.clone()]) {
                return Some(l);
            }
            let sibilant = ["s", "x", "z", "ch", "sh"].iter().any(|e| minus_es.ends_with(e));
            return Some(if sibilant { minus_es } else { minus_s });
        }
        if n >= 4 && w.ends_with('s') && !["ss", "us", "is"].iter().any(|e| w.ends_with(e)) {
            return Some(w[..n - 1].to_owned());
        }
        if n >= 5 && w.ends_with("ied") {
            return Some(format!("{}y", &w[..n - 3]));
        }
        if n >= 4 && w.ends_with("ed") {
            return self.verb_stem(&w[..n - 2]);
        }
        if n >= 5 && w.ends_with("ing") {
            return self.verb_stem(&w[..n - 3]);
        }
        None
    }

    /// Base form for a stem left after removing `-ed` or `-ing`.
    fn verb_stem(&self, stem: &str) -> Option<String> {
        if !stem.chars().any(is_vowel) {
            return None;
        }
        let undoubled = undouble(stem);
        let mut cands = vec![format!("{stem}e"), stem.to_owned()];
        if let Some(u) = &undoubled {
            cands.push(u.clone());
        }
        if let Some(l) = self.first_known(&cands) {
            return Some(l);
        }
        if let Some(u) = undoubled {
            return Some(u);
        }
        if ["at", "bl", "iz", "yz", "v", "c"].iter().any(|e| stem.ends_with(e)) || short_cvc(stem) {
            return Some(format!("{stem}e"));
        }
        Some(stem.to_owned())
    }
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// `runn` -> `run`; `l`, `s` and `z` doubles are kept (`install`, `pass`).
fn undouble(stem: &str) -> Option<String> {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 3 && b[n - 1] == b[n - 2] && !is_vowel(b[n - 1] as char) && !b"lsz".contains(&b[n - 1]) {
        Some(stem[..n - 1].to_owned())
    } else {
        None
    }
}

/// Single-syllable consonant-vowel-consonant stems (`hop`, `nam`) take a
/// silent `e` back.
fn short_cvc(stem: &str) -> bool {
    let b: Vec<char> = stem.chars().collect();
    let n = b.len();
    if !(3..=4).contains(&n) {
        return false;
    }
    let vowels = b.iter().filter(|c| is_vowel(**c)).count();
    vowels == 1
        && !is_vowel(b[n - 1])
        && is_vowel(b[n - 2])
        && !is_vowel(b[n - 3])
        && !matches!(b[n - 1], 'w' | 'x' | 'y')
}

/// Lemmatizes each token with the shipped tables.
pub fn lemmatize<S: AsRef<str>>(tokens: &[S]) -> Vec<String> {
    let lem = Lemmatizer::shipped();
    tokens.iter().map(|t| lem.lemma(t.as_ref())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_and_dictionary_forms() {
        assert_eq!(lemmatize(&["moved", "classes", "running"]), vec!["move", "class", "run"]);
    }

    #[test]
    fn irregular_table() {
        assert_eq!(lemmatize(&["better"]), vec!["good"]);
        assert_eq!(lemmatize(&["wrote", "children"]), vec!["write", "child"]);
    }

    #[test]
    fn irregular_lemmas_are_not_rewritten() {
        let lem = Lemmatizer::shipped();
        for v in lem.irregular.values() {
            assert_eq!(&lem.lemma(v), v);
        }
    }

    #[test]
    fn lexicon_entries_are_fixed_points() {
        let lem = Lemmatizer::shipped();
        for w in &lem.lexicon {
            assert_eq!(&lem.lemma(w), w);
        }
    }

    #[test]
    fn base_words_with_suffix_letters_survive() {
        assert_eq!(lemmatize(&["status", "process", "string", "need", "always"]),
            vec!["status", "process", "string", "need", "always"]);
    }

    #[test]
    fn fallback_rules_without_lexicon() {
        let lem = Lemmatizer::from_tables("", "");
        assert_eq!(lem.lemma("hopped"), "hop");
        assert_eq!(lem.lemma("hoped"), "hope");
        assert_eq!(lem.lemma("optimized"), "optimize");
        assert_eq!(lem.lemma("boxes"), "box");
        assert_eq!(lem.lemma("libraries"), "library");
        assert_eq!(lem.lemma("applied"), "apply");
        assert_eq!(lem.lemma("tests"), "test");
        assert_eq!(lem.lemma("string"), "string");
    }

    #[test]
    fn unstable_rule_result_is_rejected() {
        // "embedded" -> "embed" would itself lose "ed", so without a lexicon
        // entry the word is kept as is
        let lem = Lemmatizer::from_tables("", "");
        assert_eq!(lem.lemma("embedded"), "embedded");
        assert_eq!(Lemmatizer::shipped().lemma("embedded"), "embed");
    }
}
