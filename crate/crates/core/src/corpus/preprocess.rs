use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    lemmatize, normalize_and_tokenize, recognition_ratio, remove_stopwords, strip_markup,
    CleanDocument, CorpusError, DictionaryBundle, RawDocument, SourceKind, SpellCorrector,
    DEFAULT_MIN_TOKEN_LEN,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreprocessOptions {
    pub min_token_len: usize,
    pub max_edit_distance: usize,
    /// Skip orthographic correction entirely when false.
    pub correct: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            min_token_len: DEFAULT_MIN_TOKEN_LEN,
            max_edit_distance: 2,
            correct: true,
        }
    }
}

/// Per-document statistics gathered while cleaning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentReport {
    pub id: String,
    pub year: i32,
    /// Tokens after punctuation and short-token removal.
    pub word_count: usize,
    pub recognized_before: f64,
    pub recognized_after: f64,
    pub corrected_count: usize,
    pub replacements: BTreeMap<String, String>,
    /// Tokens left after the full pipeline.
    pub clean_length: usize,
}

/// The complete per-document cleaning pipeline.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    dicts: DictionaryBundle,
    corrector: Option<SpellCorrector>,
    options: PreprocessOptions,
}

impl Preprocessor {
    pub fn new(mut dicts: DictionaryBundle, options: PreprocessOptions) -> Result<Self, CorpusError> {
        dicts.sanitize_lemmas(options.min_token_len);
        dicts.absorb_lemma_targets();
        let corrector = if options.correct {
            Some(SpellCorrector::new(&dicts, options.max_edit_distance)?)
        } else {
            None
        };
        Ok(Preprocessor {
            dicts,
            corrector,
            options,
        })
    }

    pub fn dictionaries(&self) -> &DictionaryBundle {
        &self.dicts
    }

    pub fn options(&self) -> &PreprocessOptions {
        &self.options
    }

    /// Visible text of a raw document.
    pub fn plain_text(doc: &RawDocument) -> String {
        match doc.source_kind {
            SourceKind::Markup => strip_markup(&doc.text),
            SourceKind::Plain => doc.text.clone(),
        }
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        normalize_and_tokenize(text, self.options.min_token_len)
    }

    /// Runs every stage after tokenization: correction, stopword removal and
    /// lemmatization. Corrections shorter than the minimum token length are
    /// dropped. Applying this twice gives the same result as applying it once.
    pub fn clean_tokens(&self, tokens: &[String]) -> Vec<String> {
        self.clean_tokens_with_report(tokens).0
    }

    fn clean_tokens_with_report(&self, tokens: &[String]) -> (Vec<String>, super::Correction) {
        let corrected = match &self.corrector {
            Some(c) => c.correct(tokens, &self.dicts),
            None => super::Correction {
                tokens: tokens.to_vec(),
                ..Default::default()
            },
        };
        let long_enough: Vec<String> = corrected
            .tokens
            .iter()
            .filter(|t| t.chars().count() >= self.options.min_token_len)
            .cloned()
            .collect();
        let kept = remove_stopwords(&long_enough, &self.dicts);
        (lemmatize(&kept, &self.dicts), corrected)
    }

    pub fn process(&self, doc: &RawDocument) -> (CleanDocument, DocumentReport) {
        let tokens = self.tokenize(&Self::plain_text(doc));
        let recognized_before = recognition_ratio(&tokens, &self.dicts);
        let (clean, correction) = self.clean_tokens_with_report(&tokens);
        let report = DocumentReport {
            id: doc.id.clone(),
            year: doc.year,
            word_count: tokens.len(),
            recognized_before,
            recognized_after: recognition_ratio(&correction.tokens, &self.dicts),
            corrected_count: correction.corrected_count,
            replacements: correction.replacements,
            clean_length: clean.len(),
        };
        let clean = CleanDocument {
            id: doc.id.clone(),
            year: doc.year,
            tokens: clean,
            corrected_count: correction.corrected_count,
        };
        (clean, report)
    }

    /// Processes documents in parallel; output order follows input order.
    pub fn process_all(&self, docs: &[RawDocument]) -> Vec<(CleanDocument, DocumentReport)> {
        docs.par_iter().map(|d| self.process(d)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Language;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn preprocessor() -> Preprocessor {
        let dicts = DictionaryBundle::new(
            vec![
                ("mundo".to_string(), 50.0),
                ("filosofía".to_string(), 20.0),
                ("razón".to_string(), 30.0),
                ("los".to_string(), 100.0),
                ("juegos".to_string(), 5.0),
            ],
            s(&["kantiano"]),
            vec![("juegos".to_string(), "juego".to_string())],
            s(&["los", "del", "bien"]),
            s(&["bien", "verdad"]),
        )
        .unwrap();
        Preprocessor::new(dicts, PreprocessOptions::default()).unwrap()
    }

    #[test]
    fn full_pipeline_on_markup() {
        let p = preprocessor();
        let doc = RawDocument {
            id: "d1".into(),
            year: 1990,
            language: Language::Spanish,
            source_kind: SourceKind::Markup,
            text: "<p>Los <b>juegos</b> del mundo: la filosofia, el bien y la verdad</p>".into(),
            metadata: Default::default(),
        };
        let (clean, report) = p.process(&doc);
        assert_eq!(clean.tokens, s(&["juego", "mundo", "filosofía", "bien", "verdad"]));
        assert_eq!(clean.corrected_count, 1);
        assert_eq!(report.word_count, 7);
        assert!(report.recognized_after >= report.recognized_before);
    }

    #[test]
    fn second_pass_is_identity() {
        let p = preprocessor();
        let once = p.clean_tokens(&s(&["juegos", "mundoo", "razon", "xyzzy", "verdad", "los"]));
        assert_eq!(p.clean_tokens(&once), once);
    }
}
