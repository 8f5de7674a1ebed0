use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{infer_document, FittedModel, ModelError, PROB_FLOOR};
use crate::corpus::TimeSlicedCorpus;

/// Name of the coherence measure, recorded next to every score.
pub const COHERENCE_VARIANT: &str = "umass_document_cooccurrence";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub variant: String,
    pub top_n: usize,
    pub per_topic: Vec<f64>,
    pub average: f64,
}

/// Average negative log-likelihood per held-out token.
///
/// Each held-out document's proportions are inferred against its slice's
/// topics (slices are matched by label, words by token), then every token
/// is scored under `sum_k theta_k beta_k[w]`.
pub fn log_perplexity(model: &FittedModel, heldout: &TimeSlicedCorpus) -> Result<f64, ModelError> {
    let word_map: Vec<u32> = heldout
        .vocabulary
        .tokens()
        .iter()
        .map(|tok| {
            model
                .vocabulary
                .index_of(tok)
                .ok_or_else(|| ModelError::VocabularyMismatch(tok.clone()))
        })
        .collect::<Result<_, _>>()?;
    let slice_map: Vec<usize> = heldout
        .slices
        .iter()
        .map(|s| {
            model
                .slice_index(&s.label)
                .ok_or_else(|| ModelError::SliceMismatch(s.label.clone()))
        })
        .collect::<Result<_, _>>()?;

    let jobs: Vec<(usize, Vec<(u32, u32)>)> = heldout
        .documents()
        .map(|(t, d)| {
            let row = d.counts.iter().map(|&(w, n)| (word_map[w as usize], n)).collect();
            (slice_map[t], row)
        })
        .collect();

    let per_doc: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|(t, row)| {
            let log_beta: Vec<&[f64]> = model
                .chains
                .iter()
                .map(|c| c.natural_params[*t].as_slice())
                .collect();
            let inference = infer_document(row, &log_beta, &model.alpha_path[*t], model.hyper.a2, None);
            let theta = super::softmax(&inference.eta).expect("finite proportions");
            let mut ll = 0.0;
            let mut n_total = 0.0;
            for &(w, n) in row {
                let p: f64 = theta
                    .iter()
                    .zip(&log_beta)
                    .map(|(th, lb)| th * lb[w as usize].exp())
                    .sum();
                ll += n as f64 * p.max(PROB_FLOOR).ln();
                n_total += n as f64;
            }
            (ll, n_total)
        })
        .collect();

    let (ll, n): (f64, f64) = per_doc
        .iter()
        .fold((0.0, 0.0), |(a, b), (l, c)| (a + l, b + c));
    if n == 0.0 {
        return Err(ModelError::EmptySlice);
    }
    Ok(-ll / n)
}

/// Indices of the `top_n` most probable words of each topic, averaged over
/// slices. Ties go to the lower index.
pub fn top_words(model: &FittedModel, top_n: usize) -> Vec<Vec<u32>> {
    model
        .chains
        .iter()
        .map(|chain| {
            let avg = chain.time_averaged();
            let mut idx: Vec<u32> = (0..avg.len() as u32).collect();
            idx.sort_by(|&a, &b| avg[b as usize].total_cmp(&avg[a as usize]).then(a.cmp(&b)));
            idx.truncate(top_n);
            idx
        })
        .collect()
}

/// Document co-occurrence coherence of each topic's top words.
///
/// For top words `w_1..w_n` (most probable first) a topic scores
/// `sum_{i>j} ln((D(w_i, w_j) + 1) / D(w_j))`, where `D` counts documents of
/// `corpus` containing the word(s). A `D(w_j)` of zero counts as one.
/// `top_n` below 2 is raised to 2.
pub fn topic_coherence(model: &FittedModel, corpus: &TimeSlicedCorpus, top_n: usize) -> CoherenceReport {
    let top_n = top_n.max(2);
    let tops = top_words(model, top_n);
    let wanted: HashSet<u32> = tops.iter().flatten().copied().collect();

    let mut single: HashMap<u32, u32> = HashMap::new();
    let mut pair: HashMap<(u32, u32), u32> = HashMap::new();
    for (_, doc) in corpus.documents() {
        let present: Vec<u32> = doc
            .counts
            .iter()
            .filter(|&&(w, n)| n > 0 && wanted.contains(&w))
            .map(|&(w, _)| w)
            .collect();
        for (i, &a) in present.iter().enumerate() {
            *single.entry(a).or_insert(0) += 1;
            for &b in &present[i + 1..] {
                *pair.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
    }

    let per_topic: Vec<f64> = tops
        .iter()
        .map(|words| {
            let mut score = 0.0;
            for i in 1..words.len() {
                for j in 0..i {
                    let (a, b) = (words[i], words[j]);
                    let joint = pair.get(&(a.min(b), a.max(b))).copied().unwrap_or(0) as f64;
                    let df = single.get(&b).copied().unwrap_or(0).max(1) as f64;
                    score += ((joint + 1.0) / df).ln();
                }
            }
            score
        })
        .collect();
    let average = if per_topic.is_empty() {
        0.0
    } else {
        per_topic.iter().sum::<f64>() / per_topic.len() as f64
    };
    CoherenceReport {
        variant: COHERENCE_VARIANT.to_string(),
        top_n,
        per_topic,
        average,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{SliceRule, SlicedDocument, TimeSlice, Vocabulary};
    use crate::model::{DocTopics, Hyperparams, TopicChain, TrainLog};

    fn corpus(docs: Vec<Vec<(u32, u32)>>, v: usize) -> TimeSlicedCorpus {
        TimeSlicedCorpus {
            vocabulary: Vocabulary::from((0..v).map(|i| format!("w{i}")).collect::<Vec<_>>()),
            slices: vec![TimeSlice {
                label: "2000".into(),
                start_year: 2000,
                end_year: 2000,
                documents: docs
                    .into_iter()
                    .enumerate()
                    .map(|(i, counts)| SlicedDocument {
                        id: format!("d{i}"),
                        year: 2000,
                        counts,
                        out_of_vocabulary: 0,
                    })
                    .collect(),
            }],
            slice_rule: SliceRule {
                first_year: 2000,
                bin_years: 1,
                min_df: 0,
                dropped_periods: vec![],
                empty_documents: vec![],
            },
        }
    }

    fn model(topics: Vec<Vec<f64>>, v: usize) -> FittedModel {
        let k = topics.len();
        FittedModel {
            hyper: Hyperparams {
                num_topics: k,
                ..Default::default()
            },
            vocabulary: Vocabulary::from((0..v).map(|i| format!("w{i}")).collect::<Vec<_>>()),
            slice_labels: vec!["2000".into()],
            chains: topics
                .into_iter()
                .map(|p| TopicChain {
                    natural_params: vec![p.iter().map(|x| x.ln()).collect()],
                })
                .collect(),
            alpha_path: vec![vec![0.0; k]],
            docs: Vec::<DocTopics>::new(),
            train_log: TrainLog::default(),
        }
    }

    #[test]
    fn single_topic_perplexity_is_cross_entropy() {
        let m = model(vec![vec![0.5, 0.3, 0.2]], 3);
        let c = corpus(vec![vec![(0, 2), (2, 3)]], 3);
        let expected = -(2.0 * 0.5f64.ln() + 3.0 * 0.2f64.ln()) / 5.0;
        assert!((log_perplexity(&m, &c).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn perplexity_mismatches() {
        let m = model(vec![vec![0.5, 0.5]], 2);
        let mut c = corpus(vec![vec![(0, 1)]], 3);
        assert!(matches!(log_perplexity(&m, &c), Err(ModelError::VocabularyMismatch(t)) if t == "w2"));
        c.vocabulary = Vocabulary::from(vec!["w1".to_string()]);
        c.slices[0].label = "1999".into();
        assert!(matches!(log_perplexity(&m, &c), Err(ModelError::SliceMismatch(_))));
    }

    #[test]
    fn always_cooccurring_pair() {
        let m = model(vec![vec![0.6, 0.3, 0.1]], 3);
        let c = corpus(vec![vec![(0, 1), (1, 2)], vec![(0, 3), (1, 1)], vec![(2, 1)]], 3);
        let r = topic_coherence(&m, &c, 2);
        assert!((r.per_topic[0] - (3.0f64 / 2.0).ln()).abs() < 1e-12);
        assert_eq!(r.variant, COHERENCE_VARIANT);
    }

    #[test]
    fn never_cooccurring_pair() {
        let m = model(vec![vec![0.6, 0.3, 0.1]], 3);
        let c = corpus(vec![vec![(0, 1)], vec![(0, 1)], vec![(1, 1)]], 3);
        let r = topic_coherence(&m, &c, 2);
        // w0 ranks first, so D(w_j) = D(w0) = 2
        assert!((r.per_topic[0] - (0.5f64).ln()).abs() < 1e-12);
    }
}
