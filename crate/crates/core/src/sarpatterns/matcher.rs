use std::collections::{BTreeSet, HashMap};

use super::{SarPattern, WordTemplate};

/// Lowercased message split into maximal runs of the letters `a-z`;
/// everything else separates words.
pub fn message_words(message: &str) -> Vec<String> {
    let lower = message.to_lowercase();
    lower
        .split(|c: char| !c.is_ascii_lowercase())
        .filter(|w| !w.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Pattern forms indexed by their first word, for scanning many messages.
#[derive(Debug, Clone)]
pub struct Matcher {
    forms: Vec<(usize, Vec<WordTemplate>)>,
    exact_first: HashMap<String, Vec<usize>>,
    prefix_first: HashMap<String, Vec<usize>>,
    pattern_count: usize,
}

impl Matcher {
    pub fn new(patterns: &[SarPattern]) -> Matcher {
        let mut m = Matcher {
            forms: Vec::new(),
            exact_first: HashMap::new(),
            prefix_first: HashMap::new(),
            pattern_count: patterns.len(),
        };
        for (i, p) in patterns.iter().enumerate() {
            for form in p.forms() {
                let id = m.forms.len();
                let first = &form[0];
                let index = if first.prefix { &mut m.prefix_first } else { &mut m.exact_first };
                index.entry(first.stem.clone()).or_default().push(id);
                m.forms.push((i, form.to_vec()));
            }
        }
        m
    }

    pub fn pattern_count(&self) -> usize {
        self.pattern_count
    }

    fn form_at(&self, form: usize, words: &[String], start: usize) -> bool {
        let t = &self.forms[form].1;
        start + t.len() <= words.len() && t.iter().zip(&words[start..]).all(|(t, w)| t.matches(w))
    }

    fn candidates<'a>(&'a self, word: &'a str) -> impl Iterator<Item = usize> + 'a {
        let exact = self.exact_first.get(word).into_iter().flatten();
        let prefixes = (1..=word.len())
            .filter_map(move |k| self.prefix_first.get(&word[..k]))
            .flatten();
        exact.chain(prefixes).copied()
    }

    /// Indices of the patterns present in `message`.
    pub fn scan(&self, message: &str) -> BTreeSet<usize> {
        let words = message_words(message);
        let mut found = BTreeSet::new();
        for start in 0..words.len() {
            for form in self.candidates(&words[start]) {
                let pattern = self.forms[form].0;
                if !found.contains(&pattern) && self.form_at(form, &words, start) {
                    found.insert(pattern);
                }
            }
        }
        found
    }

    pub fn matches_any(&self, message: &str) -> bool {
        let words = message_words(message);
        (0..words.len()).any(|s| self.candidates(&words[s]).any(|f| self.form_at(f, &words, s)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_split_on_non_letters() {
        assert_eq!(message_words("Re-packaged v2.0 (GUI)"), vec!["re", "packaged", "v", "gui"]);
        assert!(message_words("123 !!").is_empty());
    }
}
