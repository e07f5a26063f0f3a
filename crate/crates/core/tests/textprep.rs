use proptest::prelude::*;
use refdoc_core::textprep::{
    expand_contractions, lemmatize, normalize, remove_stopwords, split_sentences, strip_noise,
    tokenize, StopWordSet,
};

#[test]
fn golden_lemmas() {
    let text = include_str!("fixtures/lemma_golden.tsv");
    let rows: Vec<(&str, &str)> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split_once('\t').unwrap())
        .collect();
    assert_eq!(rows.len(), 50);
    let words: Vec<&str> = rows.iter().map(|r| r.0).collect();
    let got = lemmatize(&words);
    let mismatches: Vec<String> = rows
        .iter()
        .zip(&got)
        .filter(|((_, want), got)| want != got)
        .map(|((w, want), got)| format!("{w}: want {want}, got {got}"))
        .collect();
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}

fn message() -> impl Strategy<Value = String> {
    let word = prop_oneof![
        "[a-zA-Z]{1,10}",
        Just("I'm".to_string()),
        Just("don't".to_string()),
        Just("https://example.org/x".to_string()),
        Just("#123".to_string()),
        Just("refactored".to_string()),
        Just("classes".to_string()),
        Just("git-svn-id:".to_string()),
        "[0-9]{1,4}",
    ];
    let sep = prop_oneof![Just(" "), Just(". "), Just("\n"), Just("! "), Just(", "), Just("-")];
    prop::collection::vec((word, sep), 0..20)
        .prop_map(|v| v.into_iter().map(|(w, s)| format!("{w}{s}")).collect())
}

proptest! {
    #[test]
    fn lemma_alphabet(m in message()) {
        let stops = StopWordSet::default();
        for l in normalize(&m, &stops).lemmas {
            prop_assert!(l.len() >= 2 && l.bytes().all(|b| b.is_ascii_lowercase()), "{l}");
            prop_assert!(!stops.contains(&l));
        }
    }

    #[test]
    fn normalize_idempotent(m in message()) {
        let stops = StopWordSet::default();
        let once = normalize(&m, &stops).lemmas;
        let twice = normalize(&once.join(" "), &stops).lemmas;
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn sentencewise_composition(m in message()) {
        let stops = StopWordSet::default();
        let expected: Vec<Vec<String>> = split_sentences(&m)
            .into_iter()
            .map(|s| {
                let tokens = tokenize(&strip_noise(&expand_contractions(s)));
                lemmatize(&remove_stopwords(&tokens, &stops))
                    .into_iter()
                    .filter(|l| !stops.contains(l))
                    .collect::<Vec<_>>()
            })
            .filter(|s: &Vec<String>| !s.is_empty())
            .collect();
        prop_assert_eq!(normalize(&m, &stops).sentences, expected);
    }

    #[test]
    fn contractions_idempotent(m in message()) {
        let once = expand_contractions(&m);
        prop_assert_eq!(expand_contractions(&once), once);
    }
}
