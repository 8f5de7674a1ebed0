use super::DictionaryBundle;

/// Removes effective stopwords, keeping order. Protected words are never
/// stopwords, so they always survive.
pub fn remove_stopwords(tokens: &[String], dicts: &DictionaryBundle) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !dicts.is_stopword(t))
        .cloned()
        .collect()
}

/// Replaces each token by its lemma when the table has one.
pub fn lemmatize(tokens: &[String], dicts: &DictionaryBundle) -> Vec<String> {
    tokens
        .iter()
        .map(|t| dicts.lemma(t).map_or_else(|| t.clone(), str::to_string))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn bundle(stop: &[&str], protected: &[&str], lemmas: &[(&str, &str)]) -> DictionaryBundle {
        DictionaryBundle::new(
            Vec::<(String, f64)>::new(),
            Vec::<String>::new(),
            lemmas.iter().map(|(a, b)| (a.to_string(), b.to_string())),
            toks(stop),
            toks(protected),
        )
        .unwrap()
    }

    #[test]
    fn protected_survive_stoplist() {
        let d = bundle(&["el", "de", "bien", "verdad"], &["bien", "verdad"], &[]);
        assert_eq!(
            remove_stopwords(&toks(&["el", "bien", "de", "verdad"]), &d),
            toks(&["bien", "verdad"])
        );
        assert!(remove_stopwords(&[], &d).is_empty());
    }

    #[test]
    fn lemma_lookup() {
        let d = bundle(&[], &[], &[("juegos", "juego")]);
        assert_eq!(lemmatize(&toks(&["juegos"]), &d), toks(&["juego"]));
        assert_eq!(lemmatize(&toks(&["mesa"]), &d), toks(&["mesa"]));
    }

    proptest! {
        #[test]
        fn stopword_removal_is_set_difference(
            tokens in proptest::collection::vec("[a-d]{1,2}", 50),
            stop in proptest::collection::vec("[a-d]{1,2}", 0..10),
            protected in proptest::collection::vec("[a-d]{1,2}", 0..5),
        ) {
            let d = bundle(
                &stop.iter().map(String::as_str).collect::<Vec<_>>(),
                &protected.iter().map(String::as_str).collect::<Vec<_>>(),
                &[],
            );
            let expected: Vec<String> = tokens
                .iter()
                .filter(|t| !stop.contains(t) || protected.contains(t))
                .cloned()
                .collect();
            prop_assert_eq!(remove_stopwords(&tokens, &d), expected);
        }

        #[test]
        fn lemmatize_matches_map_lookup(
            tokens in proptest::collection::vec("[a-c]{1,2}", 30),
            table in proptest::collection::btree_map("[a-c]{1,2}", "[x-z]{3}", 0..8),
        ) {
            let pairs: Vec<(&str, &str)> = table.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let d = bundle(&[], &[], &pairs);
            let lookup: BTreeMap<String, String> = table.clone();
            let expected: Vec<String> = tokens
                .iter()
                .map(|t| lookup.get(t).cloned().unwrap_or_else(|| t.clone()))
                .collect();
            prop_assert_eq!(lemmatize(&tokens, &d), expected);
        }
    }
}
