use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sample_categorical, ModelError, PROB_FLOOR};
use crate::corpus::{TimeSlice, TimeSlicedCorpus};
use crate::special::{digamma, ln_gamma};

/// Sparse document-term counts: one row of `(word, count)` pairs per document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    pub vocab_size: usize,
    pub rows: Vec<Vec<(u32, u32)>>,
}

impl CountMatrix {
    pub fn from_slice(slice: &TimeSlice, vocab_size: usize) -> Self {
        CountMatrix {
            vocab_size,
            rows: slice.documents.iter().map(|d| d.counts.clone()).collect(),
        }
    }

    /// All documents of a corpus, in slice order.
    pub fn pooled(corpus: &TimeSlicedCorpus) -> Self {
        CountMatrix {
            vocab_size: corpus.vocabulary.len(),
            rows: corpus.documents().map(|(_, d)| d.counts.clone()).collect(),
        }
    }

    /// Normalized corpus-wide word frequencies.
    pub fn marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.vocab_size];
        for row in &self.rows {
            for &(w, c) in row {
                m[w as usize] += c as f64;
            }
        }
        let total: f64 = m.iter().sum();
        m.iter_mut().for_each(|x| *x /= total);
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaOptions {
    pub num_topics: usize,
    /// Symmetric Dirichlet prior on document proportions.
    pub alpha: f64,
    pub seed: u64,
    pub max_iters: usize,
    /// Relative bound change below which EM stops.
    pub tolerance: f64,
    pub doc_max_iters: usize,
}

impl LdaOptions {
    pub fn new(num_topics: usize, alpha: f64, seed: u64) -> Self {
        LdaOptions {
            num_topics,
            alpha,
            seed,
            max_iters: 200,
            tolerance: 1e-7,
            doc_max_iters: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaFit {
    /// `K x V` topic-word probabilities.
    pub topics: Vec<Vec<f64>>,
    /// `M x K` normalized document proportions.
    pub theta: Vec<Vec<f64>>,
    /// `M x K` variational Dirichlet parameters.
    pub gamma: Vec<Vec<f64>>,
    /// Variational bound evaluated during each E-step.
    pub bounds: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

struct DocEStep {
    bound: f64,
    /// `n_i * phi[i][k]`, row-major over the document's distinct words.
    expected: Vec<f64>,
}

fn doc_estep(
    row: &[(u32, u32)],
    log_beta: &[Vec<f64>],
    alpha: f64,
    gamma: &mut [f64],
    max_iters: usize,
) -> DocEStep {
    let k = gamma.len();
    let mut phi = vec![0.0; row.len() * k];
    let mut log_phi = vec![0.0; row.len() * k];

    for _ in 0..max_iters.max(1) {
        let dig: Vec<f64> = gamma.iter().map(|&g| digamma(g)).collect();
        let mut new_gamma = vec![alpha; k];
        for (i, &(w, n)) in row.iter().enumerate() {
            let lp = &mut log_phi[i * k..(i + 1) * k];
            for t in 0..k {
                lp[t] = log_beta[t][w as usize] + dig[t];
            }
            let lse = super::log_sum_exp(lp);
            for t in 0..k {
                lp[t] -= lse;
                phi[i * k + t] = lp[t].exp();
                new_gamma[t] += n as f64 * phi[i * k + t];
            }
        }
        let change = gamma
            .iter()
            .zip(&new_gamma)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        gamma.copy_from_slice(&new_gamma);
        if change < 1e-6 {
            break;
        }
    }

    let gamma_sum: f64 = gamma.iter().sum();
    let dig_sum = digamma(gamma_sum);
    let e_log_theta: Vec<f64> = gamma.iter().map(|&g| digamma(g) - dig_sum).collect();
    let kf = k as f64;
    let mut bound = ln_gamma(kf * alpha) - kf * ln_gamma(alpha)
        + (alpha - 1.0) * e_log_theta.iter().sum::<f64>()
        - ln_gamma(gamma_sum);
    for t in 0..k {
        bound += ln_gamma(gamma[t]) - (gamma[t] - 1.0) * e_log_theta[t];
    }
    let mut expected = vec![0.0; row.len() * k];
    for (i, &(w, n)) in row.iter().enumerate() {
        let n = n as f64;
        for t in 0..k {
            let p = phi[i * k + t];
            expected[i * k + t] = n * p;
            if p > 0.0 {
                bound += n * p * (e_log_theta[t] + log_beta[t][w as usize] - log_phi[i * k + t]);
            }
        }
    }
    DocEStep { bound, expected }
}

/// Seeds each topic from a random document blended with the uniform
/// distribution and a little noise.
/// Seeds topics from documents chosen k-means++ style: each further seed is
/// drawn with probability proportional to its squared distance from the
/// nearest seed so far, in normalized word-frequency space.
fn initial_topics(counts: &CountMatrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let v = counts.vocab_size;
    let normalized: Vec<Vec<(usize, f64)>> = counts
        .rows
        .iter()
        .map(|row| {
            let len: f64 = row.iter().map(|&(_, c)| c as f64).sum();
            row.iter().map(|&(w, c)| (w as usize, c as f64 / len)).collect()
        })
        .collect();
    let sq_norms: Vec<f64> = normalized
        .iter()
        .map(|r| r.iter().map(|(_, x)| x * x).sum())
        .collect();
    let mut nearest: Vec<f64> = normalized
        .iter()
        .map(|r| if r.is_empty() { 0.0 } else { f64::INFINITY })
        .collect();

    let mut topics = Vec::with_capacity(k);
    for _ in 0..k {
        let spread: f64 = nearest.iter().filter(|d| d.is_finite()).sum();
        let pick = if topics.is_empty() || spread == 0.0 {
            let candidates: Vec<usize> = (0..normalized.len()).filter(|&i| !normalized[i].is_empty()).collect();
            candidates[rng.random_range(0..candidates.len())]
        } else {
            sample_categorical(&nearest, rng)
        };
        let mut center = vec![0.0; v];
        for &(w, x) in &normalized[pick] {
            center[w] = x;
        }
        let center_sq: f64 = center.iter().map(|x| x * x).sum();
        for (i, row) in normalized.iter().enumerate() {
            if row.is_empty() {
                continue;
            }
            let dot: f64 = row.iter().map(|&(w, x)| x * center[w]).sum();
            let d = (sq_norms[i] + center_sq - 2.0 * dot).max(0.0);
            nearest[i] = nearest[i].min(d);
        }
        let mut topic: Vec<f64> = (0..v)
            .map(|w| center[w] + (1.0 + 0.1 * rng.random::<f64>()) / v as f64)
            .collect();
        normalize_floored(&mut topic);
        topics.push(topic);
    }
    topics
}

fn normalize_floored(p: &mut [f64]) {
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        p.iter_mut().for_each(|x| *x = (*x / total).max(PROB_FLOOR));
    } else {
        p.iter_mut().for_each(|x| *x = 1.0);
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
}

fn validate(counts: &CountMatrix, options: &LdaOptions) -> Result<(), ModelError> {
    if counts.rows.is_empty() || counts.rows.iter().all(Vec::is_empty) {
        return Err(ModelError::EmptySlice);
    }
    if options.num_topics == 0 {
        return Err(ModelError::InvalidHyperparams("need at least one topic".into()));
    }
    if !(options.alpha.is_finite() && options.alpha > 0.0) {
        return Err(ModelError::NonPositiveAlpha);
    }
    if let Some(&(w, _)) = counts
        .rows
        .iter()
        .flatten()
        .find(|&&(w, _)| w as usize >= counts.vocab_size)
    {
        return Err(ModelError::DimensionMismatch(format!(
            "word {w} outside a vocabulary of {}",
            counts.vocab_size
        )));
    }
    Ok(())
}

/// Fits LDA by variational EM with a fixed symmetric Dirichlet prior.
///
/// The E-step warm-starts each document from its previous variational
/// parameters, which makes the recorded bound non-decreasing across
/// iterations. Returns [`ModelError::LdaNonConvergence`] carrying the last
/// estimate when `max_iters` is reached first.
pub fn fit_lda(counts: &CountMatrix, options: &LdaOptions) -> Result<LdaFit, ModelError> {
    validate(counts, options)?;
    let k = options.num_topics;
    let v = counts.vocab_size;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut topics = initial_topics(counts, k, &mut rng);

    let mut gamma: Vec<Vec<f64>> = counts
        .rows
        .iter()
        .map(|row| {
            let n: f64 = row.iter().map(|&(_, c)| c as f64).sum();
            vec![options.alpha + n / k as f64; k]
        })
        .collect();

    let mut bounds = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < options.max_iters {
        iterations += 1;
        let log_beta: Vec<Vec<f64>> = topics
            .iter()
            .map(|t| t.iter().map(|p| p.max(PROB_FLOOR).ln()).collect())
            .collect();
        let results: Vec<DocEStep> = counts
            .rows
            .par_iter()
            .zip(gamma.par_iter_mut())
            .map(|(row, g)| doc_estep(row, &log_beta, options.alpha, g, options.doc_max_iters))
            .collect();

        let mut stats = vec![vec![0.0; v]; k];
        let mut bound = 0.0;
        for (row, r) in counts.rows.iter().zip(&results) {
            bound += r.bound;
            for (i, &(w, _)) in row.iter().enumerate() {
                for (t, s) in stats.iter_mut().enumerate() {
                    s[w as usize] += r.expected[i * k + t];
                }
            }
        }
        for s in stats.iter_mut() {
            normalize_floored(s);
        }
        topics = stats;

        if let Some(&prev) = bounds.last() {
            let rel: f64 = (bound - prev) / f64::abs(prev);
            bounds.push(bound);
            if rel.abs() < options.tolerance {
                converged = true;
                break;
            }
        } else {
            bounds.push(bound);
        }
    }

    let theta = gamma
        .iter()
        .map(|g| {
            let s: f64 = g.iter().sum();
            g.iter().map(|x| x / s).collect()
        })
        .collect();
    let fit = LdaFit {
        topics,
        theta,
        gamma,
        bounds,
        iterations,
        converged,
    };
    if converged {
        Ok(fit)
    } else {
        Err(ModelError::LdaNonConvergence(Box::new(fit)))
    }
}

impl LdaFit {
    /// The fit, whether or not EM converged.
    pub fn accept(result: Result<LdaFit, ModelError>) -> Result<LdaFit, ModelError> {
        match result {
            Err(ModelError::LdaNonConvergence(fit)) => Ok(*fit),
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_group_corpus() -> CountMatrix {
        // words 0..4 belong to group A, 5..9 to group B
        let mut rows = Vec::new();
        for d in 0..40u32 {
            let base = if d % 2 == 0 { 0 } else { 5 };
            rows.push((0..5).map(|i| (base + i, 1 + (d + i) % 3)).collect());
        }
        CountMatrix { vocab_size: 10, rows }
    }

    #[test]
    fn single_topic_is_corpus_marginal() {
        let c = two_group_corpus();
        let fit = LdaFit::accept(fit_lda(&c, &LdaOptions::new(1, 0.5, 3))).unwrap();
        for (a, b) in fit.topics[0].iter().zip(c.marginal()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn separable_groups_recovered() {
        let c = two_group_corpus();
        let fit = LdaFit::accept(fit_lda(&c, &LdaOptions::new(2, 0.1, 1))).unwrap();
        for topic in &fit.topics {
            let group_a: f64 = topic[..5].iter().sum();
            assert!(group_a >= 0.95 || group_a <= 0.05, "mixed topic: {group_a}");
        }
        let a0: f64 = fit.topics[0][..5].iter().sum();
        let a1: f64 = fit.topics[1][..5].iter().sum();
        assert!((a0 - a1).abs() > 0.9);
    }

    #[test]
    fn bound_is_monotone_and_outputs_normalized() {
        let c = two_group_corpus();
        let fit = LdaFit::accept(fit_lda(&c, &LdaOptions::new(3, 0.3, 5))).unwrap();
        for w in fit.bounds.windows(2) {
            assert!(w[1] >= w[0] - 1e-6, "bound decreased: {} -> {}", w[0], w[1]);
        }
        for t in &fit.topics {
            assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        for th in &fit.theta {
            assert!((th.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let c = two_group_corpus();
        let a = LdaFit::accept(fit_lda(&c, &LdaOptions::new(2, 0.1, 42))).unwrap();
        let b = LdaFit::accept(fit_lda(&c, &LdaOptions::new(2, 0.1, 42))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_slice_rejected() {
        let c = CountMatrix {
            vocab_size: 3,
            rows: vec![],
        };
        assert!(matches!(fit_lda(&c, &LdaOptions::new(2, 0.1, 0)), Err(ModelError::EmptySlice)));
    }

    #[test]
    fn nonconvergence_reports_partial_fit() {
        let c = two_group_corpus();
        let mut o = LdaOptions::new(2, 0.1, 1);
        o.max_iters = 1;
        o.tolerance = 1e-300;
        match fit_lda(&c, &o) {
            Err(ModelError::LdaNonConvergence(fit)) => assert_eq!(fit.iterations, 1),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
