//! Sweeps over the number of topics and random seeds, and ranks the results.

use std::collections::HashSet;
use std::io::Write;
use std::time::Instant;

use log::{info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TimeSlicedCorpus;
use crate::model::{fit_dtm, log_perplexity, topic_coherence, FittedModel, Hyperparams, ModelError, COHERENCE_VARIANT};
use crate::taxonomy::{assign_all, empty_topics, unassigned_documents};

#[derive(Debug, Error)]
pub enum SelectionError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no rows to rank")]
    NoRows,
    #[error("could not build worker pool: {0}")]
    Pool(String),
    #[error("writing report: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing report: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub k_values: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Fraction of each slice's documents held out for perplexity.
    pub heldout_fraction: f64,
    /// Seed of the held-out split, shared by every cell.
    pub holdout_seed: u64,
    pub assignment_mass: f64,
    pub coherence_top_n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            k_values: (50..=150).step_by(10).collect(),
            seeds: vec![1, 2, 3],
            heldout_fraction: 0.1,
            holdout_seed: 0,
            assignment_mass: 0.5,
            coherence_top_n: 10,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), SelectionError> {
        let bad = |m: &str| Err(SelectionError::InvalidGrid(m.to_string()));
        if self.k_values.is_empty() || self.k_values.iter().any(|&k| k < 2) {
            return bad("k_values must be non-empty and at least 2");
        }
        if self.seeds.is_empty() {
            return bad("seeds must be non-empty");
        }
        if !(self.heldout_fraction > 0.0 && self.heldout_fraction < 1.0) {
            return bad("heldout_fraction must be in (0, 1)");
        }
        if !(self.assignment_mass > 0.0 && self.assignment_mass <= 1.0) {
            return bad("assignment_mass must be in (0, 1]");
        }
        if self.coherence_top_n < 2 {
            return bad("coherence_top_n must be at least 2");
        }
        Ok(())
    }
}

/// Holds out about `fraction` of each slice's documents, chosen at random
/// from `seed`. Every slice keeps at least one training document.
pub fn holdout_split(corpus: &TimeSlicedCorpus, fraction: f64, seed: u64) -> (TimeSlicedCorpus, TimeSlicedCorpus) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut held: HashSet<String> = HashSet::new();
    for slice in &corpus.slices {
        let m = slice.documents.len();
        let n = ((m as f64 * fraction).round() as usize).min(m.saturating_sub(1));
        let mut idx: Vec<usize> = (0..m).collect();
        idx.shuffle(&mut rng);
        held.extend(idx[..n].iter().map(|&i| slice.documents[i].id.clone()));
    }
    corpus.partition(|_, d| !held.contains(&d.id))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "message", rename_all = "snake_case")]
pub enum CellStatus {
    Converged,
    NotConverged,
    Failed(String),
}

impl CellStatus {
    fn as_str(&self) -> &str {
        match self {
            CellStatus::Converged => "converged",
            CellStatus::NotConverged => "not_converged",
            CellStatus::Failed(_) => "failed",
        }
    }
}

/// Metrics of one `(K, seed)` cell. Metric fields are `None` for failed cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCellMetrics {
    pub k: usize,
    pub seed: u64,
    pub status: CellStatus,
    pub coherence: Option<f64>,
    /// Held-out log perplexity: mean negative log-likelihood per word.
    pub perplexity: Option<f64>,
    pub empty_topics: Option<usize>,
    pub unassigned_docs: Option<usize>,
    pub wall_time_secs: f64,
}

impl GridCellMetrics {
    fn failed(k: usize, seed: u64, message: String, wall_time_secs: f64) -> Self {
        GridCellMetrics {
            k,
            seed,
            status: CellStatus::Failed(message),
            coherence: None,
            perplexity: None,
            empty_topics: None,
            unassigned_docs: None,
            wall_time_secs,
        }
    }

    fn metric_vector(&self) -> Option<[f64; 4]> {
        Some([
            self.coherence?,
            self.perplexity?,
            self.empty_topics? as f64,
            self.unassigned_docs? as f64,
        ])
    }
}

/// Hooks for callers that persist models or skip cells computed earlier.
pub trait GridObserver: Sync {
    /// Metrics from an earlier run of this cell, if any.
    fn cached(&self, _k: usize, _seed: u64) -> Option<GridCellMetrics> {
        None
    }
    fn finished(&self, _metrics: &GridCellMetrics, _model: Option<&FittedModel>) {}
}

impl GridObserver for () {}

/// Fits and scores one cell. Coherence is measured on `full`, perplexity on
/// `heldout`, and the assignment counts on the training documents.
pub fn evaluate_cell(
    train: &TimeSlicedCorpus,
    heldout: &TimeSlicedCorpus,
    full: &TimeSlicedCorpus,
    grid: &GridSpec,
    hyper: &Hyperparams,
) -> (GridCellMetrics, Option<FittedModel>) {
    let start = Instant::now();
    let (k, seed) = (hyper.num_topics, hyper.seed);
    let (model, status) = match fit_dtm(train, hyper) {
        Ok(m) => (m, CellStatus::Converged),
        Err(ModelError::NonConvergence(m)) => (*m, CellStatus::NotConverged),
        Err(e) => {
            let metrics = GridCellMetrics::failed(k, seed, e.to_string(), start.elapsed().as_secs_f64());
            return (metrics, None);
        }
    };
    let coherence = topic_coherence(&model, full, grid.coherence_top_n).average;
    let perplexity = match log_perplexity(&model, heldout) {
        Ok(p) => p,
        Err(e) => {
            let metrics = GridCellMetrics::failed(k, seed, e.to_string(), start.elapsed().as_secs_f64());
            return (metrics, Some(model));
        }
    };
    let assignments = match assign_all(&model, grid.assignment_mass) {
        Ok(a) => a,
        Err(e) => {
            let metrics = GridCellMetrics::failed(k, seed, e.to_string(), start.elapsed().as_secs_f64());
            return (metrics, Some(model));
        }
    };
    let metrics = GridCellMetrics {
        k,
        seed,
        status,
        coherence: Some(coherence),
        perplexity: Some(perplexity),
        empty_topics: Some(empty_topics(&assignments).len()),
        unassigned_docs: Some(unassigned_documents(&model, &assignments).len()),
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    (metrics, Some(model))
}

/// Runs every `(K, seed)` cell on at most `workers` threads and returns one
/// row per cell, ordered as `k_values` x `seeds`. Failed cells are reported,
/// never fatal.
pub fn run_grid(
    corpus: &TimeSlicedCorpus,
    grid: &GridSpec,
    hyper_base: &Hyperparams,
    workers: usize,
    observer: &dyn GridObserver,
) -> Result<Vec<GridCellMetrics>, SelectionError> {
    grid.validate()?;
    let (train, heldout) = holdout_split(corpus, grid.heldout_fraction, grid.holdout_seed);
    let cells: Vec<(usize, u64)> = grid
        .k_values
        .iter()
        .flat_map(|&k| grid.seeds.iter().map(move |&s| (k, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| SelectionError::Pool(e.to_string()))?;
    let rows = pool.install(|| {
        cells
            .par_iter()
            .map(|&(k, seed)| {
                if let Some(cached) = observer.cached(k, seed) {
                    info!("grid cell K={k} seed={seed}: reusing earlier result");
                    return cached;
                }
                let hyper = Hyperparams {
                    num_topics: k,
                    seed,
                    ..hyper_base.clone()
                };
                let (metrics, model) = evaluate_cell(&train, &heldout, corpus, grid, &hyper);
                match &metrics.status {
                    CellStatus::Failed(msg) => warn!("grid cell K={k} seed={seed} failed: {msg}"),
                    CellStatus::NotConverged => warn!("grid cell K={k} seed={seed} did not converge"),
                    CellStatus::Converged => info!("grid cell K={k} seed={seed} done"),
                }
                observer.finished(&metrics, model.as_ref());
                metrics
            })
            .collect()
    });
    Ok(rows)
}

/// Weight of each metric in the composite score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RankWeights {
    pub coherence: f64,
    pub perplexity: f64,
    pub empty_topics: f64,
    pub unassigned_docs: f64,
}

impl Default for RankWeights {
    fn default() -> Self {
        RankWeights {
            coherence: 1.0,
            perplexity: 1.0,
            empty_topics: 1.0,
            unassigned_docs: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedRow {
    pub rank: usize,
    /// `None` for failed cells, which rank last.
    pub score: Option<f64>,
    /// z-scores of coherence, perplexity, empty topics and unassigned documents.
    pub z: Option<[f64; 4]>,
    pub metrics: GridCellMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedReport {
    pub weights: RankWeights,
    pub coherence_variant: String,
    pub rows: Vec<RankedRow>,
}

/// Orders rows by a weighted sum of z-scored metrics: coherence counts
/// positively, the other three negatively. z-scores use the population
/// standard deviation over successful rows; a constant metric scores zero.
/// Ties go to smaller `K`, then smaller seed.
pub fn rank_models(rows: &[GridCellMetrics], weights: &RankWeights) -> Result<RankedReport, SelectionError> {
    if rows.is_empty() {
        return Err(SelectionError::NoRows);
    }
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| a.k.cmp(&b.k).then(a.seed.cmp(&b.seed)));

    let vectors: Vec<[f64; 4]> = sorted.iter().filter_map(GridCellMetrics::metric_vector).collect();
    let n = vectors.len() as f64;
    let mut mean = [0.0; 4];
    let mut sd = [0.0; 4];
    for j in 0..4 {
        mean[j] = vectors.iter().map(|v| v[j]).sum::<f64>() / n;
        sd[j] = (vectors.iter().map(|v| (v[j] - mean[j]).powi(2)).sum::<f64>() / n).sqrt();
    }
    let signed = [
        weights.coherence,
        -weights.perplexity,
        -weights.empty_topics,
        -weights.unassigned_docs,
    ];

    let mut ranked: Vec<RankedRow> = sorted
        .into_iter()
        .map(|m| {
            let z = m.metric_vector().map(|v| {
                let mut z = [0.0; 4];
                for j in 0..4 {
                    z[j] = if sd[j] > 0.0 { (v[j] - mean[j]) / sd[j] } else { 0.0 };
                }
                z
            });
            let score = z.map(|z| z.iter().zip(&signed).map(|(a, b)| a * b).sum());
            RankedRow {
                rank: 0,
                score,
                z,
                metrics: m,
            }
        })
        .collect();
    // stable sort keeps the (K, seed) order among equal scores
    ranked.sort_by(|a, b| match (a.score, b.score) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    for (i, row) in ranked.iter_mut().enumerate() {
        row.rank = i + 1;
    }
    Ok(RankedReport {
        weights: *weights,
        coherence_variant: COHERENCE_VARIANT.to_string(),
        rows: ranked,
    })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// One CSV row per cell. Wall time is left out so reruns compare equal.
pub fn write_grid_csv<W: Write>(rows: &[GridCellMetrics], out: W) -> Result<(), SelectionError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["K", "seed", "status", "coherence", "log_perplexity", "empty_topics", "unassigned_docs"])?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.seed.to_string(),
            r.status.as_str().to_string(),
            opt(r.coherence),
            opt(r.perplexity),
            opt(r.empty_topics),
            opt(r.unassigned_docs),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ranking_csv<W: Write>(report: &RankedReport, out: W) -> Result<(), SelectionError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "rank",
        "K",
        "seed",
        "score",
        "z_coherence",
        "z_perplexity",
        "z_empty_topics",
        "z_unassigned_docs",
        "status",
        "coherence",
        "log_perplexity",
        "empty_topics",
        "unassigned_docs",
    ])?;
    for r in &report.rows {
        let z = |j: usize| opt(r.z.map(|z| z[j]));
        let m = &r.metrics;
        w.write_record([
            r.rank.to_string(),
            m.k.to_string(),
            m.seed.to_string(),
            opt(r.score),
            z(0),
            z(1),
            z(2),
            z(3),
            m.status.as_str().to_string(),
            opt(m.coherence),
            opt(m.perplexity),
            opt(m.empty_topics),
            opt(m.unassigned_docs),
        ])?;
    }
    w.flush()?;
    Ok(())
}
