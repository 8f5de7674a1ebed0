//! Latent Dirichlet allocation and dynamic topic models.
//!
//! A dynamic topic model links one LDA-like model per time slice through
//! Gaussian random walks on natural parameters:
//!
//! * each topic's word parameters drift as `beta[k][t] ~ N(beta[k][t-1], sigma2 I)`;
//! * the mean topic proportions drift as `alpha[t] ~ N(alpha[t-1], delta2 I)`;
//! * a document in slice `t` draws `eta ~ N(alpha[t], a2 I)` and uses
//!   `softmax(eta)` as its topic proportions, picking each word from
//!   `softmax(beta[k][t])` after choosing a topic `k`.
//!
//! [`fit_dtm`] runs mean-field variational EM: per-document logistic-normal
//! updates alternate with Kalman smoothing along each chain.

mod archive;
mod dtm;
mod kalman;
mod lda;
mod matching;
mod metrics;
mod sampling;
mod softmax;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{TimeSlicedCorpus, Vocabulary};

pub use archive::{corpus_fingerprint, ModelHeader, MODEL_FORMAT_VERSION};
pub use dtm::{fit_dtm, infer_document, DocumentInference};
pub use kalman::{smooth_random_walk, SmoothedChain};
pub use lda::{fit_lda, CountMatrix, LdaFit, LdaOptions};
pub use matching::{best_matching, cosine_similarity, matched_cosines};
pub use metrics::{log_perplexity, top_words, topic_coherence, CoherenceReport, COHERENCE_VARIANT};
pub use sampling::{
    generate_dtm_corpus, generate_lda_document, sample_categorical, sample_dirichlet,
    GeneratorShape,
};
pub use softmax::{log_softmax, log_sum_exp, softmax};

/// Probabilities are floored at this value before taking logarithms.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("input contains a non-finite value")]
    NonFiniteInput,
    #[error("Dirichlet parameters must be positive")]
    NonPositiveAlpha,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("slice has no documents")]
    EmptySlice,
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("word `{0}` is not in the model vocabulary")]
    VocabularyMismatch(String),
    #[error("slice `{0}` is not part of the model")]
    SliceMismatch(String),
    #[error("LDA did not converge after {} iterations", .0.iterations)]
    LdaNonConvergence(Box<LdaFit>),
    #[error("DTM did not converge after {} iterations", .0.train_log.iterations)]
    NonConvergence(Box<FittedModel>),
    #[error("model archive: {0}")]
    Archive(String),
}

/// Mean of the first-slice topic proportions, either shared by all topics or
/// given per topic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alpha0 {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Alpha0 {
    pub fn expand(&self, k: usize) -> Result<Vec<f64>, ModelError> {
        match self {
            Alpha0::Scalar(a) => Ok(vec![*a; k]),
            Alpha0::Vector(v) if v.len() == k => Ok(v.clone()),
            Alpha0::Vector(v) => Err(ModelError::DimensionMismatch(format!(
                "alpha0 has {} entries for {k} topics",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub num_topics: usize,
    /// Step variance of the topic-word chains.
    pub sigma2: f64,
    /// Step variance of the topic-proportion chain.
    pub delta2: f64,
    /// Variance of document proportions around the slice mean.
    pub a2: f64,
    pub alpha0: Alpha0,
    pub seed: u64,
    pub max_iters: usize,
    /// Relative bound change below which fitting stops.
    pub tolerance: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            num_topics: 10,
            sigma2: 0.005,
            delta2: 0.01,
            a2: 1.0,
            alpha0: Alpha0::Scalar(0.0),
            seed: 0,
            max_iters: 100,
            tolerance: 1e-4,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.num_topics < 2 {
            return Err(ModelError::InvalidHyperparams(format!(
                "need at least 2 topics, got {}",
                self.num_topics
            )));
        }
        self.validate_variances(false)?;
        self.alpha0.expand(self.num_topics)?;
        if self.max_iters == 0 || !(self.tolerance > 0.0) {
            return Err(ModelError::InvalidHyperparams(
                "max_iters and tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    fn validate_variances(&self, allow_zero: bool) -> Result<(), ModelError> {
        for (name, v) in [("sigma2", self.sigma2), ("delta2", self.delta2), ("a2", self.a2)] {
            let ok = v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
            if !ok {
                return Err(ModelError::InvalidHyperparams(format!("{name} = {v}")));
            }
        }
        Ok(())
    }
}

/// Natural parameters of one topic, one vector per time slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicChain {
    pub natural_params: Vec<Vec<f64>>,
}

impl TopicChain {
    pub fn probabilities(&self, slice: usize) -> Vec<f64> {
        softmax(&self.natural_params[slice]).expect("finite natural parameters")
    }

    /// Word probabilities averaged uniformly over slices.
    pub fn time_averaged(&self) -> Vec<f64> {
        let t = self.natural_params.len() as f64;
        let mut avg = vec![0.0; self.natural_params.first().map_or(0, Vec::len)];
        for s in 0..self.natural_params.len() {
            for (a, p) in avg.iter_mut().zip(self.probabilities(s)) {
                *a += p / t;
            }
        }
        avg
    }
}

/// Inferred topic proportions of one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocTopics {
    pub id: String,
    pub year: i32,
    pub slice: usize,
    pub eta: Vec<f64>,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainLog {
    pub iterations: usize,
    pub converged: bool,
    /// Bound after each outer iteration.
    pub bounds: Vec<f64>,
    /// Relative bound change after each outer iteration.
    pub deltas: Vec<f64>,
    pub final_bound: f64,
}

/// Per-slice topic-word tables and per-document topic proportions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub hyper: Hyperparams,
    pub vocabulary: Vocabulary,
    pub slice_labels: Vec<String>,
    pub chains: Vec<TopicChain>,
    /// Mean topic proportions (natural parameters), one vector per slice.
    pub alpha_path: Vec<Vec<f64>>,
    pub docs: Vec<DocTopics>,
    pub train_log: TrainLog,
}

impl FittedModel {
    pub fn num_topics(&self) -> usize {
        self.chains.len()
    }

    pub fn num_slices(&self) -> usize {
        self.slice_labels.len()
    }

    /// `K x V` topic-word probabilities for one slice.
    pub fn topic_word(&self, slice: usize) -> Vec<Vec<f64>> {
        self.chains.iter().map(|c| c.probabilities(slice)).collect()
    }

    pub fn slice_index(&self, label: &str) -> Option<usize> {
        self.slice_labels.iter().position(|l| l == label)
    }

    /// Checks that `corpus` has the slice structure this model was fit on.
    pub fn matches_corpus(&self, corpus: &TimeSlicedCorpus) -> bool {
        corpus.slices.len() == self.slice_labels.len()
            && corpus
                .slices
                .iter()
                .zip(&self.slice_labels)
                .all(|(s, l)| &s.label == l)
            && corpus.vocabulary == self.vocabulary
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperparam_validation() {
        let mut h = Hyperparams::default();
        assert!(h.validate().is_ok());
        h.num_topics = 1;
        assert!(h.validate().is_err());
        h.num_topics = 3;
        h.sigma2 = 0.0;
        assert!(h.validate().is_err());
        h.sigma2 = 0.1;
        h.alpha0 = Alpha0::Vector(vec![0.0; 2]);
        assert!(matches!(h.validate(), Err(ModelError::DimensionMismatch(_))));
    }
}
