use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use super::{softmax, DocTopics, FittedModel, Hyperparams, ModelError, TopicChain, TrainLog};
use crate::corpus::{SliceRule, SlicedDocument, TimeSlice, TimeSlicedCorpus, Vocabulary};

/// Draws one index from unnormalized nonnegative weights by inverse CDF.
pub fn sample_categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
            acc += w;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

/// Draws a probability vector from `Dirichlet(alpha)` by normalizing
/// independent `Gamma(alpha_i, 1)` draws. Draws are taken in log space so
/// small `alpha_i` never underflow to an all-zero vector.
pub fn sample_dirichlet<R: Rng + ?Sized>(alpha: &[f64], rng: &mut R) -> Result<Vec<f64>, ModelError> {
    if alpha.is_empty() || alpha.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(ModelError::NonPositiveAlpha);
    }
    if alpha.len() == 1 {
        return Ok(vec![1.0]);
    }
    let mut log_draws = Vec::with_capacity(alpha.len());
    for &a in alpha {
        // Gamma(a) = Gamma(a + 1) * U^(1/a) for a < 1
        let (shape, boost) = if a < 1.0 {
            let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            (a + 1.0, u.ln() / a)
        } else {
            (a, 0.0)
        };
        let g: f64 = Gamma::new(shape, 1.0)
            .map_err(|_| ModelError::NonPositiveAlpha)?
            .sample(rng);
        log_draws.push(g.max(f64::MIN_POSITIVE).ln() + boost);
    }
    softmax(&log_draws)
}

/// Generates `n_words` word indices: each word picks a topic from `theta`
/// and then a word from that topic's distribution.
pub fn generate_lda_document<R: Rng + ?Sized>(
    theta: &[f64],
    betas: &[Vec<f64>],
    n_words: usize,
    rng: &mut R,
) -> Result<Vec<usize>, ModelError> {
    if theta.len() != betas.len() || theta.is_empty() {
        return Err(ModelError::DimensionMismatch(format!(
            "{} topic proportions for {} topics",
            theta.len(),
            betas.len()
        )));
    }
    let v = betas[0].len();
    if betas.iter().any(|b| b.len() != v) {
        return Err(ModelError::DimensionMismatch(
            "topics have different vocabulary sizes".into(),
        ));
    }
    Ok((0..n_words)
        .map(|_| {
            let k = sample_categorical(theta, rng);
            sample_categorical(&betas[k], rng)
        })
        .collect())
}

/// Sizes of a synthetic dynamic-topic-model corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorShape {
    pub vocab_size: usize,
    pub num_slices: usize,
    pub docs_per_slice: usize,
    pub words_per_doc: usize,
    /// Standard deviation of the first-slice topic natural parameters.
    pub initial_topic_sd: f64,
    /// Year of the first slice; slice `t` covers year `first_year + t`.
    pub first_year: i32,
}

impl Default for GeneratorShape {
    fn default() -> Self {
        GeneratorShape {
            vocab_size: 30,
            num_slices: 5,
            docs_per_slice: 200,
            words_per_doc: 60,
            initial_topic_sd: 2.0,
            first_year: 2000,
        }
    }
}

/// Samples a corpus from the dynamic topic model, returning it together with
/// the ground-truth parameters that produced it.
///
/// The first slice's topic parameters are `N(0, initial_topic_sd^2 I)` and its
/// mean proportions are `N(alpha0, delta2 I)`; later slices follow the
/// Gaussian random walks. Zero variances are allowed here (they produce
/// constant chains) even though fitting requires positive ones.
pub fn generate_dtm_corpus<R: Rng + ?Sized>(
    hyper: &Hyperparams,
    shape: &GeneratorShape,
    rng: &mut R,
) -> Result<(TimeSlicedCorpus, FittedModel), ModelError> {
    let k = hyper.num_topics;
    let GeneratorShape {
        vocab_size: v,
        num_slices: t_count,
        docs_per_slice,
        words_per_doc,
        ..
    } = *shape;
    if k == 0 || v == 0 || t_count == 0 || docs_per_slice == 0 || words_per_doc == 0 {
        return Err(ModelError::DimensionMismatch("all sizes must be at least 1".into()));
    }
    hyper.validate_variances(true)?;
    let alpha0 = hyper.alpha0.expand(k)?;

    let gauss = |sd: f64| Normal::new(0.0, sd).map_err(|e| ModelError::InvalidHyperparams(e.to_string()));
    let init = gauss(shape.initial_topic_sd)?;
    let topic_step = gauss(hyper.sigma2.sqrt())?;
    let alpha_step = gauss(hyper.delta2.sqrt())?;
    let doc_noise = gauss(hyper.a2.sqrt())?;

    let mut chains = Vec::with_capacity(k);
    for _ in 0..k {
        let mut params: Vec<Vec<f64>> = Vec::with_capacity(t_count);
        params.push((0..v).map(|_| init.sample(rng)).collect());
        for t in 1..t_count {
            let next = params[t - 1].iter().map(|b| b + topic_step.sample(rng)).collect();
            params.push(next);
        }
        chains.push(TopicChain {
            natural_params: params,
        });
    }

    let mut alpha_path: Vec<Vec<f64>> = Vec::with_capacity(t_count);
    let mut prev = alpha0;
    for _ in 0..t_count {
        let next: Vec<f64> = prev.iter().map(|a| a + alpha_step.sample(rng)).collect();
        alpha_path.push(next.clone());
        prev = next;
    }

    let vocabulary = Vocabulary::from((0..v).map(|i| format!("w{i:05}")).collect::<Vec<_>>());
    let mut slices = Vec::with_capacity(t_count);
    let mut docs = Vec::new();
    for t in 0..t_count {
        let betas: Vec<Vec<f64>> = chains.iter().map(|c| c.probabilities(t)).collect();
        let year = shape.first_year + t as i32;
        let mut documents = Vec::with_capacity(docs_per_slice);
        for d in 0..docs_per_slice {
            let eta: Vec<f64> = alpha_path[t].iter().map(|a| a + doc_noise.sample(rng)).collect();
            let theta = softmax(&eta)?;
            let words = generate_lda_document(&theta, &betas, words_per_doc, rng)?;
            let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
            for w in words {
                *counts.entry(w as u32).or_insert(0) += 1;
            }
            let id = format!("s{t:03}-d{d:05}");
            documents.push(SlicedDocument {
                id: id.clone(),
                year,
                counts: counts.into_iter().collect(),
                out_of_vocabulary: 0,
            });
            docs.push(DocTopics {
                id,
                year,
                slice: t,
                eta,
                theta,
            });
        }
        slices.push(TimeSlice {
            label: year.to_string(),
            start_year: year,
            end_year: year,
            documents,
        });
    }

    let slice_labels = slices.iter().map(|s| s.label.clone()).collect();
    let corpus = TimeSlicedCorpus {
        vocabulary: vocabulary.clone(),
        slices,
        slice_rule: SliceRule {
            first_year: shape.first_year,
            bin_years: 1,
            min_df: 0,
            dropped_periods: Vec::new(),
            empty_documents: Vec::new(),
        },
    };
    let truth = FittedModel {
        hyper: hyper.clone(),
        vocabulary,
        slice_labels,
        chains,
        alpha_path,
        docs,
        train_log: TrainLog::default(),
    };
    Ok((corpus, truth))
}
