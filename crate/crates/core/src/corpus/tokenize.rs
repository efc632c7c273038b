/// Splits `text` into lowercased runs of Unicode alphanumeric characters.
///
/// Everything else (punctuation, symbols, whitespace) separates tokens.
/// The same tokenizer feeds BM25, window counting and the baseline
/// classifier, so counts agree across stages.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Number of tokens `tokenize` would produce, without allocating them.
pub fn token_count(text: &str) -> usize {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strips_punctuation_and_lowercases() {
        assert_eq!(
            tokenize("Roselle, for Hypertension!"),
            vec!["roselle", "for", "hypertension"]
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  ,.;  ").is_empty());
    }

    #[test]
    fn splits_on_separators() {
        assert_eq!(tokenize("130/86 mmHg"), vec!["130", "86", "mmhg"]);
    }

    #[test]
    fn unicode_letters_are_kept() {
        assert_eq!(
            tokenize("Ärzte sagen: ÉTUDE"),
            vec!["ärzte", "sagen", "étude"]
        );
    }

    proptest! {
        #[test]
        fn deterministic_and_count_consistent(s in "\\PC{0,80}") {
            let a = tokenize(&s);
            prop_assert_eq!(&a, &tokenize(&s));
            prop_assert_eq!(a.len(), token_count(&s));
            for t in &a {
                prop_assert!(!t.is_empty());
            }
        }
    }
}
