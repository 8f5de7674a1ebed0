//! On-disk model layout:
//!
//! ```text
//! <dir>/model.json   header, vocabulary, slice labels, alpha path, document table
//! <dir>/beta.bin     topic natural parameters, little-endian f64, K x T x V
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{DocTopics, FittedModel, Hyperparams, ModelError, TopicChain, TrainLog};
use crate::corpus::{TimeSlicedCorpus, Vocabulary};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MODEL_FILE: &str = "model.json";
const BETA_FILE: &str = "beta.bin";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHeader {
    pub format_version: u32,
    /// SHA-256 of the training corpus archive, hex encoded.
    pub corpus_hash: String,
    pub hyperparams: Hyperparams,
    pub train_log: TrainLog,
    pub num_topics: usize,
    pub num_slices: usize,
    pub vocab_size: usize,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    header: ModelHeader,
    vocabulary: Vocabulary,
    slice_labels: Vec<String>,
    alpha_path: Vec<Vec<f64>>,
    docs: Vec<DocTopics>,
}

/// SHA-256 of the corpus' JSON serialization.
pub fn corpus_fingerprint(corpus: &TimeSlicedCorpus) -> String {
    let json = serde_json::to_vec(corpus).expect("corpus serializes");
    hex::encode(Sha256::digest(&json))
}

fn archive_err(path: &Path, e: impl std::fmt::Display) -> ModelError {
    ModelError::Archive(format!("{}: {e}", path.display()))
}

impl FittedModel {
    pub fn save(&self, dir: &Path, corpus_hash: &str) -> Result<(), ModelError> {
        fs::create_dir_all(dir).map_err(|e| archive_err(dir, e))?;
        let file = ModelFile {
            header: ModelHeader {
                format_version: MODEL_FORMAT_VERSION,
                corpus_hash: corpus_hash.to_string(),
                hyperparams: self.hyper.clone(),
                train_log: self.train_log.clone(),
                num_topics: self.num_topics(),
                num_slices: self.num_slices(),
                vocab_size: self.vocabulary.len(),
            },
            vocabulary: self.vocabulary.clone(),
            slice_labels: self.slice_labels.clone(),
            alpha_path: self.alpha_path.clone(),
            docs: self.docs.clone(),
        };
        let path = dir.join(MODEL_FILE);
        let json = serde_json::to_vec_pretty(&file).map_err(|e| archive_err(&path, e))?;
        fs::write(&path, json).map_err(|e| archive_err(&path, e))?;

        let mut bytes = Vec::with_capacity(8 * self.num_topics() * self.num_slices() * self.vocabulary.len());
        for chain in &self.chains {
            for slice in &chain.natural_params {
                for x in slice {
                    bytes.extend_from_slice(&x.to_le_bytes());
                }
            }
        }
        let path = dir.join(BETA_FILE);
        fs::write(&path, bytes).map_err(|e| archive_err(&path, e))
    }

    pub fn load(dir: &Path) -> Result<(FittedModel, ModelHeader), ModelError> {
        let path = dir.join(MODEL_FILE);
        let text = fs::read(&path).map_err(|e| archive_err(&path, e))?;
        let file: ModelFile = serde_json::from_slice(&text).map_err(|e| archive_err(&path, e))?;
        let h = &file.header;
        if h.format_version != MODEL_FORMAT_VERSION {
            return Err(archive_err(
                &path,
                format!("unsupported format version {}", h.format_version),
            ));
        }
        if h.vocab_size != file.vocabulary.len() || h.num_slices != file.slice_labels.len() {
            return Err(archive_err(&path, "header sizes disagree with contents"));
        }

        let path = dir.join(BETA_FILE);
        let bytes = fs::read(&path).map_err(|e| archive_err(&path, e))?;
        let (k, t, v) = (h.num_topics, h.num_slices, h.vocab_size);
        if bytes.len() != 8 * k * t * v {
            return Err(archive_err(
                &path,
                format!("expected {} bytes for {k}x{t}x{v}, found {}", 8 * k * t * v, bytes.len()),
            ));
        }
        let mut values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
        let chains = (0..k)
            .map(|_| TopicChain {
                natural_params: (0..t).map(|_| values.by_ref().take(v).collect()).collect(),
            })
            .collect();

        let header = file.header.clone();
        let model = FittedModel {
            hyper: file.header.hyperparams,
            vocabulary: file.vocabulary,
            slice_labels: file.slice_labels,
            chains,
            alpha_path: file.alpha_path,
            docs: file.docs,
            train_log: file.header.train_log,
        };
        Ok((model, header))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_dtm_corpus, GeneratorShape};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_bitwise() {
        let hyper = Hyperparams {
            num_topics: 3,
            ..Default::default()
        };
        let shape = GeneratorShape {
            docs_per_slice: 3,
            num_slices: 2,
            ..Default::default()
        };
        let (corpus, mut model) =
            generate_dtm_corpus(&hyper, &shape, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        model.train_log.bounds = vec![-1234.5678901234567, 0.1 + 0.2];
        let dir = tempfile::tempdir().unwrap();
        let hash = corpus_fingerprint(&corpus);
        model.save(dir.path(), &hash).unwrap();
        let (loaded, header) = FittedModel::load(dir.path()).unwrap();
        assert_eq!(header.corpus_hash, hash);
        assert_eq!(loaded, model);
        for (a, b) in loaded.chains.iter().zip(&model.chains) {
            for (x, y) in a.natural_params.iter().flatten().zip(b.natural_params.iter().flatten()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn truncated_beta_is_rejected() {
        let hyper = Hyperparams {
            num_topics: 2,
            ..Default::default()
        };
        let shape = GeneratorShape {
            docs_per_slice: 1,
            num_slices: 1,
            ..Default::default()
        };
        let (_, model) = generate_dtm_corpus(&hyper, &shape, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        model.save(dir.path(), "x").unwrap();
        let beta = dir.path().join(BETA_FILE);
        let bytes = fs::read(&beta).unwrap();
        fs::write(&beta, &bytes[..bytes.len() - 8]).unwrap();
        assert!(matches!(FittedModel::load(dir.path()), Err(ModelError::Archive(_))));
    }
}
