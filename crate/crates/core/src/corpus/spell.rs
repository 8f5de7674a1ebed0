use std::collections::{BTreeMap, HashMap};

use super::{CorpusError, DictionaryBundle};

/// Levenshtein distance over Unicode scalar values.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Output of orthographic correction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Correction {
    pub tokens: Vec<String>,
    /// Number of token occurrences that were replaced.
    pub corrected_count: usize,
    /// Distinct token types that were replaced, with their replacement.
    pub replacements: BTreeMap<String, String>,
}

/// Dictionary-based corrector using a symmetric deletion index: every
/// lexicon word is indexed under all strings reachable by up to
/// `max_edit_distance` character deletions, and a query only verifies words
/// sharing one of its own deletion variants.
#[derive(Debug, Clone)]
pub struct SpellCorrector {
    words: Vec<(String, f64)>,
    deletes: HashMap<String, Vec<u32>>,
    max_edit_distance: usize,
    confusions: Vec<(String, String)>,
}

impl SpellCorrector {
    pub fn new(dicts: &DictionaryBundle, max_edit_distance: usize) -> Result<Self, CorpusError> {
        if dicts.frequencies().is_empty() {
            return Err(CorpusError::EmptyDictionary);
        }
        let mut lexicon: BTreeMap<&str, f64> = dicts
            .frequencies()
            .iter()
            .map(|(w, f)| (w.as_str(), *f))
            .collect();
        for w in dicts.custom() {
            lexicon.entry(w.as_str()).or_insert(0.0);
        }

        let words: Vec<(String, f64)> = lexicon.into_iter().map(|(w, f)| (w.to_string(), f)).collect();
        let mut deletes: HashMap<String, Vec<u32>> = HashMap::new();
        for (id, (w, _)) in words.iter().enumerate() {
            for variant in deletion_variants(w, max_edit_distance) {
                deletes.entry(variant).or_default().push(id as u32);
            }
        }
        for ids in deletes.values_mut() {
            ids.sort_unstable();
            ids.dedup();
        }

        Ok(SpellCorrector {
            words,
            deletes,
            max_edit_distance,
            confusions: dicts.confusions().to_vec(),
        })
    }

    pub fn max_edit_distance(&self) -> usize {
        self.max_edit_distance
    }

    /// Best replacement for an unrecognized token: the most frequent lexicon
    /// word within the edit budget, ties broken lexicographically. Rewriting a
    /// known OCR confusion costs one edit.
    pub fn suggest(&self, token: &str) -> Option<&str> {
        let mut best: Option<u32> = None;
        let mut consider = |id: u32| {
            best = match best {
                None => Some(id),
                Some(b) if self.better(id, b) => Some(id),
                keep => keep,
            };
        };

        for id in self.lookup(token, self.max_edit_distance) {
            consider(id);
        }
        if self.max_edit_distance >= 1 {
            for variant in confusion_variants(token, &self.confusions) {
                for id in self.lookup(&variant, self.max_edit_distance - 1) {
                    consider(id);
                }
            }
        }
        best.map(|id| self.words[id as usize].0.as_str())
    }

    fn better(&self, a: u32, b: u32) -> bool {
        let (wa, fa) = &self.words[a as usize];
        let (wb, fb) = &self.words[b as usize];
        match fa.total_cmp(fb) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => wa < wb,
        }
    }

    fn lookup(&self, query: &str, budget: usize) -> Vec<u32> {
        let mut found = Vec::new();
        for variant in deletion_variants(query, budget) {
            if let Some(ids) = self.deletes.get(&variant) {
                found.extend(ids.iter().copied());
            }
        }
        found.sort_unstable();
        found.dedup();
        found.retain(|&id| edit_distance(query, &self.words[id as usize].0) <= budget);
        found
    }

    /// Replaces every unrecognized token by its suggestion, when one exists.
    pub fn correct(&self, tokens: &[String], dicts: &DictionaryBundle) -> Correction {
        let mut cache: HashMap<&str, Option<&str>> = HashMap::new();
        let mut out = Correction {
            tokens: Vec::with_capacity(tokens.len()),
            ..Default::default()
        };
        for token in tokens {
            if dicts.is_recognized(token) {
                out.tokens.push(token.clone());
                continue;
            }
            let suggestion = *cache
                .entry(token.as_str())
                .or_insert_with(|| self.suggest(token));
            match suggestion {
                Some(s) if s != token => {
                    out.corrected_count += 1;
                    out.replacements.insert(token.clone(), s.to_string());
                    out.tokens.push(s.to_string());
                }
                _ => out.tokens.push(token.clone()),
            }
        }
        out
    }
}

/// All strings obtained from `word` by deleting up to `max` characters,
/// including `word` itself.
fn deletion_variants(word: &str, max: usize) -> Vec<String> {
    let mut out = vec![word.to_string()];
    let mut frontier = vec![word.chars().collect::<Vec<char>>()];
    for _ in 0..max {
        let mut next = Vec::new();
        for chars in &frontier {
            for i in 0..chars.len() {
                let mut v = chars.clone();
                v.remove(i);
                next.push(v);
            }
        }
        next.sort_unstable();
        next.dedup();
        out.extend(next.iter().map(|v| v.iter().collect::<String>()));
        frontier = next;
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Variants of `token` with exactly one confusion artifact rewritten.
fn confusion_variants(token: &str, confusions: &[(String, String)]) -> Vec<String> {
    let mut out = Vec::new();
    for (artifact, intended) in confusions {
        if artifact.is_empty() {
            continue;
        }
        for (pos, _) in token.match_indices(artifact.as_str()) {
            let mut v = String::with_capacity(token.len());
            v.push_str(&token[..pos]);
            v.push_str(intended);
            v.push_str(&token[pos + artifact.len()..]);
            out.push(v);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Corrects unrecognized tokens against `dicts`.
///
/// Tokens found in the frequency dictionary, the custom dictionary or the
/// protected list are left alone. Each remaining token is replaced by the
/// most frequent dictionary word within `max_edit_distance` edits, if any.
pub fn correct_orthography(
    tokens: &[String],
    dicts: &DictionaryBundle,
    max_edit_distance: usize,
) -> Result<Correction, CorpusError> {
    let corrector = SpellCorrector::new(dicts, max_edit_distance)?;
    Ok(corrector.correct(tokens, dicts))
}

/// Fraction of token occurrences recognized by `dicts`; 1.0 for no tokens.
pub fn recognition_ratio(tokens: &[String], dicts: &DictionaryBundle) -> f64 {
    if tokens.is_empty() {
        return 1.0;
    }
    let hits = tokens.iter().filter(|t| dicts.is_recognized(t)).count();
    hits as f64 / tokens.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn bundle(freq: &[(&str, f64)]) -> DictionaryBundle {
        DictionaryBundle::new(
            freq.iter().map(|(w, f)| (w.to_string(), *f)),
            Vec::<String>::new(),
            Vec::<(String, String)>::new(),
            Vec::<String>::new(),
            Vec::<String>::new(),
        )
        .unwrap()
    }

    /// Brute force: scan the whole lexicon.
    fn oracle(token: &str, dicts: &DictionaryBundle, max: usize) -> Option<String> {
        let mut best: Option<(&String, f64)> = None;
        for (w, f) in dicts.frequencies() {
            let direct = edit_distance(token, w);
            let via_confusion = confusion_variants(token, dicts.confusions())
                .iter()
                .map(|v| edit_distance(v, w) + 1)
                .min()
                .unwrap_or(usize::MAX);
            if direct.min(via_confusion) > max {
                continue;
            }
            best = match best {
                Some((bw, bf)) if bf > *f || (bf == *f && bw < w) => Some((bw, bf)),
                _ => Some((w, *f)),
            };
        }
        best.map(|(w, _)| w.clone())
    }

    #[test]
    fn levenshtein_basics() {
        assert_eq!(edit_distance("", "abc"), 3);
        assert_eq!(edit_distance("kitten", "sitting"), 3);
        assert_eq!(edit_distance("filosofia", "filosofía"), 1);
        assert_eq!(edit_distance("lvl", "m"), 3);
    }

    #[test]
    fn ocr_artifact_rewritten() {
        let d = bundle(&[("m", 5.0), ("mundo", 10.0), ("mm", 1.0)]);
        let c = correct_orthography(&toks(&["lvl", "mundo"]), &d, 2).unwrap();
        assert_eq!(c.tokens, toks(&["m", "mundo"]));
        assert_eq!(c.corrected_count, 1);
    }

    #[test]
    fn recognized_tokens_untouched() {
        let d = bundle(&[("mundo", 10.0), ("razón", 3.0)]);
        let c = correct_orthography(&toks(&["mundo", "razón"]), &d, 2).unwrap();
        assert_eq!(c.tokens, toks(&["mundo", "razón"]));
        assert_eq!(c.corrected_count, 0);
    }

    #[test]
    fn restores_accent() {
        let d = bundle(&[("filosofía", 7.0), ("filosofo", 2.0), ("mundo", 10.0)]);
        let c = correct_orthography(&toks(&["filosofia"]), &d, 2).unwrap();
        assert_eq!(c.tokens, toks(&["filosofía"]));
        assert_eq!(c.corrected_count, 1);
        assert_eq!(oracle("filosofia", &d, 2).as_deref(), Some("filosofía"));
    }

    #[test]
    fn empty_dictionary_is_an_error() {
        let d = bundle(&[]);
        assert!(matches!(
            correct_orthography(&toks(&["x"]), &d, 2),
            Err(CorpusError::EmptyDictionary)
        ));
    }

    #[test]
    fn ties_break_lexicographically() {
        let d = bundle(&[("casa", 1.0), ("cosa", 1.0)]);
        let c = correct_orthography(&toks(&["cxsa"]), &d, 2).unwrap();
        assert_eq!(c.tokens, toks(&["casa"]));
    }

    #[test]
    fn recognition_ratio_counts() {
        let d = bundle(&[("a1", 1.0), ("b1", 1.0), ("c1", 1.0)]);
        assert_eq!(recognition_ratio(&[], &d), 1.0);
        assert_eq!(recognition_ratio(&toks(&["a1", "b1", "c1", "zz"]), &d), 0.75);
    }

    proptest! {
        #[test]
        fn index_matches_brute_force(
            words in proptest::collection::vec("[a-e]{1,6}", 1..30),
            freqs in proptest::collection::vec(1u32..5, 30),
            query in "[a-e]{1,7}",
        ) {
            let entries: Vec<(&str, f64)> = words.iter().zip(&freqs).map(|(w, f)| (w.as_str(), *f as f64)).collect();
            let d = bundle(&entries);
            let corrector = SpellCorrector::new(&d, 2).unwrap();
            prop_assert_eq!(corrector.suggest(&query).map(str::to_string), oracle(&query, &d, 2));
        }
    }
}
