use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use super::CorpusError;

/// Common OCR misreadings, as (artifact, intended) pairs. Rewriting one
/// artifact counts as a single edit during correction.
pub const DEFAULT_OCR_CONFUSIONS: &[(&str, &str)] =
    &[("lvl", "m"), ("rn", "m"), ("vv", "w"), ("cl", "d")];

/// Lexicons used by the preprocessing stages. Immutable once built.
///
/// Construction enforces two invariants: protected words are never effective
/// stopwords, and protected words are never rewritten by lemmatization.
#[derive(Debug, Clone, Default)]
pub struct DictionaryBundle {
    frequency: BTreeMap<String, f64>,
    custom: BTreeSet<String>,
    lemmas: BTreeMap<String, String>,
    stopwords: BTreeSet<String>,
    protected: BTreeSet<String>,
    confusions: Vec<(String, String)>,
}

impl DictionaryBundle {
    /// Builds a bundle from raw counts. Counts are converted to relative
    /// frequencies; negative or non-finite counts are rejected.
    pub fn new<F, C, L, S, P>(
        frequency_counts: F,
        custom: C,
        lemmas: L,
        stopwords: S,
        protected: P,
    ) -> Result<Self, CorpusError>
    where
        F: IntoIterator<Item = (String, f64)>,
        C: IntoIterator<Item = String>,
        L: IntoIterator<Item = (String, String)>,
        S: IntoIterator<Item = String>,
        P: IntoIterator<Item = String>,
    {
        let mut counts: BTreeMap<String, f64> = BTreeMap::new();
        for (token, count) in frequency_counts {
            if !(count.is_finite() && count >= 0.0) {
                return Err(CorpusError::Parse {
                    path: "<frequency>".into(),
                    line: 0,
                    message: format!("invalid count {count} for `{token}`"),
                });
            }
            *counts.entry(token.to_lowercase()).or_insert(0.0) += count;
        }
        let total: f64 = counts.values().sum();
        let frequency = counts
            .into_iter()
            .map(|(t, c)| (t, if total > 0.0 { c / total } else { 0.0 }))
            .collect();

        let protected: BTreeSet<String> = protected.into_iter().map(|t| t.to_lowercase()).collect();
        let stopwords = stopwords
            .into_iter()
            .map(|t| t.to_lowercase())
            .filter(|t| !protected.contains(t))
            .collect();
        let lemmas = lemmas
            .into_iter()
            .map(|(s, l)| (s.to_lowercase(), l.to_lowercase()))
            .filter(|(s, _)| !protected.contains(s))
            .collect();

        Ok(DictionaryBundle {
            frequency,
            custom: custom.into_iter().map(|t| t.to_lowercase()).collect(),
            lemmas,
            stopwords,
            protected,
            confusions: DEFAULT_OCR_CONFUSIONS
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        })
    }

    /// Loads a bundle from the on-disk formats: two-column `token count` and
    /// `surface lemma` files, and one-token-per-line lists. Any path may be
    /// absent, yielding an empty component.
    pub fn from_files(
        frequency: Option<&Path>,
        custom: Option<&Path>,
        lemmas: Option<&Path>,
        stopwords: Option<&Path>,
        protected: Option<&Path>,
    ) -> Result<Self, CorpusError> {
        let frequency = match frequency {
            Some(p) => read_pairs(p)?
                .into_iter()
                .map(|(line, t, c)| {
                    c.parse::<f64>()
                        .ok()
                        .filter(|c| c.is_finite() && *c >= 0.0)
                        .map(|c| (t, c))
                        .ok_or_else(|| CorpusError::Parse {
                            path: p.display().to_string(),
                            line,
                            message: format!("expected a nonnegative count, got `{c}`"),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => Vec::new(),
        };
        let lemmas = match lemmas {
            Some(p) => read_pairs(p)?.into_iter().map(|(_, s, l)| (s, l)).collect(),
            None => Vec::new(),
        };
        let list = |p: Option<&Path>| -> Result<Vec<String>, CorpusError> {
            match p {
                Some(p) => read_list(p),
                None => Ok(Vec::new()),
            }
        };
        Self::new(
            frequency,
            list(custom)?,
            lemmas,
            list(stopwords)?,
            list(protected)?,
        )
    }

    /// Replaces the OCR confusion table.
    pub fn with_confusions<I>(mut self, confusions: I) -> Self
    where
        I: IntoIterator<Item = (String, String)>,
    {
        self.confusions = confusions
            .into_iter()
            .map(|(a, b)| (a.to_lowercase(), b.to_lowercase()))
            .collect();
        self
    }

    /// Drops lemma entries whose target would not survive the pipeline
    /// (too short, or an effective stopword) and resolves lemma chains to
    /// their final form, so that lemmatizing twice equals lemmatizing once.
    pub(crate) fn sanitize_lemmas(&mut self, min_len: usize) {
        let mut resolved = BTreeMap::new();
        for surface in self.lemmas.keys() {
            let mut target = &self.lemmas[surface];
            let mut seen = BTreeSet::from([surface.as_str()]);
            while let Some(next) = self.lemmas.get(target) {
                if !seen.insert(target.as_str()) {
                    break;
                }
                target = next;
            }
            if target.chars().count() >= min_len && !self.is_stopword(target) {
                resolved.insert(surface.clone(), target.clone());
            }
        }
        self.lemmas = resolved;
    }

    pub fn frequency(&self, token: &str) -> Option<f64> {
        self.frequency.get(token).copied()
    }

    pub fn frequencies(&self) -> &BTreeMap<String, f64> {
        &self.frequency
    }

    pub fn custom(&self) -> &BTreeSet<String> {
        &self.custom
    }

    pub fn lemma(&self, token: &str) -> Option<&str> {
        self.lemmas.get(token).map(String::as_str)
    }

    pub fn lemmas(&self) -> &BTreeMap<String, String> {
        &self.lemmas
    }

    pub fn confusions(&self) -> &[(String, String)] {
        &self.confusions
    }

    /// Effective stopwords (the configured list minus protected words).
    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn protected(&self) -> &BTreeSet<String> {
        &self.protected
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    pub fn is_protected(&self, token: &str) -> bool {
        self.protected.contains(token)
    }

    /// A token is recognized when it appears in the frequency dictionary, the
    /// custom dictionary, the protected list, or is a lemma target.
    pub fn is_recognized(&self, token: &str) -> bool {
        self.frequency.contains_key(token)
            || self.custom.contains(token)
            || self.protected.contains(token)
    }

    /// Lemma targets are added to the custom lexicon, so that lemmatized
    /// output is recognized on a second pass.
    pub(crate) fn absorb_lemma_targets(&mut self) {
        let targets: Vec<String> = self.lemmas.values().cloned().collect();
        self.custom.extend(targets);
    }
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect())
}

fn read_list(path: &Path) -> Result<Vec<String>, CorpusError> {
    Ok(read_lines(path)?.into_iter().map(|(_, l)| l).collect())
}

fn read_pairs(path: &Path) -> Result<Vec<(usize, String, String)>, CorpusError> {
    read_lines(path)?
        .into_iter()
        .map(|(line, l)| {
            let mut cols = l
                .split(|c: char| c == '\t' || c == ',' || c.is_whitespace())
                .filter(|c| !c.is_empty());
            match (cols.next(), cols.next(), cols.next()) {
                (Some(a), Some(b), None) => Ok((line, a.to_string(), b.to_string())),
                _ => Err(CorpusError::Parse {
                    path: path.display().to_string(),
                    line,
                    message: format!("expected two columns, got `{l}`"),
                }),
            }
        })
        .collect()
}
