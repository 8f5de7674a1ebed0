use std::f64::consts::PI;

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::{
    fit_lda, log_softmax, smooth_random_walk, softmax, CountMatrix, DocTopics, FittedModel,
    Hyperparams, LdaFit, LdaOptions, ModelError, TopicChain, TrainLog, PROB_FLOOR,
};
use crate::corpus::TimeSlicedCorpus;

/// Pseudo-count added to expected topic-word counts before taking logs.
const OBS_PSEUDO_COUNT: f64 = 0.01;
/// Prior variance of first-slice topic log-probabilities around uniform.
const TOPIC_INIT_VAR: f64 = 1e4;
/// Prior variance of first-slice mean proportions around `alpha0`.
const ALPHA_INIT_VAR: f64 = 1.0;
/// Standard deviation of the noise added to the pooled LDA initialization.
const INIT_NOISE_SD: f64 = 0.01;
const DOC_MAX_ITERS: usize = 100;
const NEWTON_MAX_STEPS: usize = 50;

/// Variational posterior of one document's topic proportions:
/// `q(eta) = N(eta, diag(nu2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentInference {
    pub eta: Vec<f64>,
    pub nu2: Vec<f64>,
    /// Document contribution to the variational bound.
    pub bound: f64,
    /// `n_i * phi[i][k]`, row-major over the document's distinct words.
    pub expected: Vec<f64>,
}

fn fill_phi(row: &[(u32, u32)], log_beta: &[&[f64]], eta: &[f64], phi: &mut [f64], counts: &mut [f64]) {
    let k = eta.len();
    counts.iter_mut().for_each(|c| *c = 0.0);
    for (i, &(w, n)) in row.iter().enumerate() {
        let p = &mut phi[i * k..(i + 1) * k];
        let mut max = f64::NEG_INFINITY;
        for t in 0..k {
            p[t] = eta[t] + log_beta[t][w as usize].max(PROB_FLOOR.ln());
            max = max.max(p[t]);
        }
        let mut total = 0.0;
        for x in p.iter_mut() {
            *x = (*x - max).exp();
            total += *x;
        }
        for t in 0..k {
            p[t] /= total;
            counts[t] += n as f64 * p[t];
        }
    }
}

fn zeta(eta: &[f64], nu2: &[f64]) -> f64 {
    eta.iter().zip(nu2).map(|(l, v)| (l + v / 2.0).exp()).sum()
}

/// Mean-field inference for one document under a logistic-normal prior
/// `N(alpha, a2 I)` on its natural topic proportions.
///
/// Coordinate ascent cycles through the word-topic responsibilities, the
/// means (`eta`), the variances (`nu2`) and the auxiliary bound parameter
/// `zeta`; each step maximizes the bound in its block, so the bound never
/// decreases. `init` warm-starts `(eta, nu2)`.
pub fn infer_document(
    row: &[(u32, u32)],
    log_beta: &[&[f64]],
    alpha: &[f64],
    a2: f64,
    init: Option<(&[f64], &[f64])>,
) -> DocumentInference {
    let k = alpha.len();
    let n_total: f64 = row.iter().map(|&(_, c)| c as f64).sum();
    let (mut eta, mut nu2) = match init {
        Some((e, v)) => (e.to_vec(), v.to_vec()),
        None => (alpha.to_vec(), vec![a2 / (1.0 + n_total / k as f64); k]),
    };
    let mut phi = vec![0.0; row.len() * k];
    let mut counts = vec![0.0; k];

    for _ in 0..DOC_MAX_ITERS {
        let previous = eta.clone();
        fill_phi(row, log_beta, &eta, &mut phi, &mut counts);

        let z = zeta(&eta, &nu2);
        for t in 0..k {
            let mut x = eta[t];
            for _ in 0..NEWTON_MAX_STEPS {
                let e = n_total / z * (x + nu2[t] / 2.0).exp();
                let grad = -(x - alpha[t]) / a2 + counts[t] - e;
                let hess = -1.0 / a2 - e;
                let step = (grad / hess).clamp(-5.0, 5.0);
                x -= step;
                if step.abs() < 1e-12 {
                    break;
                }
            }
            eta[t] = x;
        }

        let z = zeta(&eta, &nu2);
        for t in 0..k {
            let mut s = nu2[t].ln();
            for _ in 0..NEWTON_MAX_STEPS {
                let v = s.exp();
                let e = n_total / z * (eta[t] + v / 2.0).exp();
                let grad = 0.5 - v / (2.0 * a2) - v * e / 2.0;
                let hess = -v / (2.0 * a2) - e * (v + v * v / 2.0) / 2.0;
                let step = (grad / hess).clamp(-3.0, 3.0);
                s -= step;
                if step.abs() < 1e-12 {
                    break;
                }
            }
            nu2[t] = s.exp();
        }

        let change = eta
            .iter()
            .zip(&previous)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if change < 1e-7 {
            break;
        }
    }

    fill_phi(row, log_beta, &eta, &mut phi, &mut counts);
    let z = zeta(&eta, &nu2);
    let kf = k as f64;
    let mut bound = -0.5 * kf * (2.0 * PI * a2).ln();
    for t in 0..k {
        bound -= ((eta[t] - alpha[t]).powi(2) + nu2[t]) / (2.0 * a2);
        bound += counts[t] * eta[t];
        bound += 0.5 * (2.0 * PI * std::f64::consts::E * nu2[t]).ln();
    }
    // zeta equals the exponential sum here, so its term reduces to -N ln(zeta)
    bound -= n_total * z.ln();
    let mut expected = vec![0.0; row.len() * k];
    for (i, &(w, n)) in row.iter().enumerate() {
        let n = n as f64;
        for t in 0..k {
            let p = phi[i * k + t];
            expected[i * k + t] = n * p;
            if p > 0.0 {
                bound += n * p * (log_beta[t][w as usize].max(PROB_FLOOR.ln()) - p.ln());
            }
        }
    }

    DocumentInference {
        eta,
        nu2,
        bound,
        expected,
    }
}

fn gaussian_log_density(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * ((2.0 * PI * var).ln() + (x - mean).powi(2) / var)
}

fn chain_log_prior(path: &[f64], init_mean: f64, init_var: f64, step_var: f64) -> f64 {
    let mut lp = gaussian_log_density(path[0], init_mean, init_var);
    for w in path.windows(2) {
        lp += gaussian_log_density(w[1], w[0], step_var);
    }
    lp
}

struct DocSlot {
    eta: Vec<f64>,
    nu2: Vec<f64>,
}

/// Fits a dynamic topic model by variational EM.
///
/// Initialization runs LDA on the pooled corpus and copies its topics, with
/// small noise, to every slice. Each iteration then:
///
/// 1. infers every document's logistic-normal proportions given its slice's
///    topics and mean proportions;
/// 2. re-estimates each topic-word chain by Kalman smoothing the per-slice
///    log expected frequencies, each observed with variance inversely
///    proportional to its expected count;
/// 3. re-estimates the mean-proportion chain by Kalman smoothing the slice
///    averages of the document means.
///
/// Iteration stops once the relative change of the bound falls below
/// `hyper.tolerance`; reaching `hyper.max_iters` first yields
/// [`ModelError::NonConvergence`] with the partial model.
pub fn fit_dtm(corpus: &TimeSlicedCorpus, hyper: &Hyperparams) -> Result<FittedModel, ModelError> {
    hyper.validate()?;
    let k = hyper.num_topics;
    let v = corpus.vocabulary.len();
    let n_slices = corpus.num_slices();
    if n_slices == 0 || corpus.num_documents() == 0 {
        return Err(ModelError::EmptySlice);
    }
    if v == 0 {
        return Err(ModelError::DimensionMismatch("empty vocabulary".into()));
    }
    let alpha0 = hyper.alpha0.expand(k)?;

    let pooled = CountMatrix::pooled(corpus);
    let mut lda_options = LdaOptions::new(k, 1.0 / k as f64, hyper.seed);
    lda_options.max_iters = 50;
    lda_options.tolerance = 1e-5;
    let init = LdaFit::accept(fit_lda(&pooled, &lda_options))?;

    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let noise = Normal::new(0.0, INIT_NOISE_SD).expect("valid sd");
    let mut chains: Vec<TopicChain> = init
        .topics
        .iter()
        .map(|topic| {
            let natural_params = (0..n_slices)
                .map(|_| {
                    let raw: Vec<f64> = topic.iter().map(|p| p.ln() + noise.sample(&mut rng)).collect();
                    log_softmax(&raw)
                })
                .collect();
            TopicChain { natural_params }
        })
        .collect();
    let mut alpha_path = vec![alpha0.clone(); n_slices];

    let rows: Vec<(usize, &[(u32, u32)])> = corpus
        .documents()
        .map(|(t, d)| (t, d.counts.as_slice()))
        .collect();
    let mut slots: Vec<DocSlot> = rows
        .iter()
        .zip(&init.theta)
        .map(|(&(_, row), theta)| {
            let logs: Vec<f64> = theta.iter().map(|p| p.max(PROB_FLOOR).ln()).collect();
            let mean = logs.iter().sum::<f64>() / k as f64;
            let n: f64 = row.iter().map(|&(_, c)| c as f64).sum();
            DocSlot {
                eta: logs.iter().zip(&alpha0).map(|(l, a)| l - mean + a).collect(),
                nu2: vec![hyper.a2 / (1.0 + n / k as f64); k],
            }
        })
        .collect();
    let docs_per_slice: Vec<usize> = corpus.slices.iter().map(|s| s.documents.len()).collect();

    let mut log = TrainLog::default();
    let mut previous_bound: Option<f64> = None;
    while log.iterations < hyper.max_iters {
        log.iterations += 1;

        let results: Vec<DocumentInference> = {
            let chains = &chains;
            let alpha_path = &alpha_path;
            rows.par_iter()
                .zip(slots.par_iter())
                .map(|(&(t, row), slot)| {
                    let log_beta: Vec<&[f64]> =
                        chains.iter().map(|c| c.natural_params[t].as_slice()).collect();
                    infer_document(
                        row,
                        &log_beta,
                        &alpha_path[t],
                        hyper.a2,
                        Some((&slot.eta, &slot.nu2)),
                    )
                })
                .collect()
        };

        let mut stats = vec![vec![vec![0.0; v]; k]; n_slices];
        let mut eta_sums = vec![vec![0.0; k]; n_slices];
        let mut bound = 0.0;
        for ((&(t, row), slot), r) in rows.iter().zip(slots.iter_mut()).zip(results) {
            bound += r.bound;
            for (i, &(w, _)) in row.iter().enumerate() {
                for (topic, s) in stats[t].iter_mut().enumerate() {
                    s[w as usize] += r.expected[i * k + topic];
                }
            }
            for (acc, e) in eta_sums[t].iter_mut().zip(&r.eta) {
                *acc += e;
            }
            slot.eta = r.eta;
            slot.nu2 = r.nu2;
        }

        let uniform = -(v as f64).ln();
        chains.par_iter_mut().enumerate().for_each(|(topic, chain)| {
            let totals: Vec<f64> = (0..n_slices).map(|t| stats[t][topic].iter().sum()).collect();
            let mut smoothed = vec![vec![0.0; v]; n_slices];
            let mut obs = vec![0.0; n_slices];
            let mut obs_var = vec![0.0; n_slices];
            for w in 0..v {
                for t in 0..n_slices {
                    let c = stats[t][topic][w] + OBS_PSEUDO_COUNT;
                    obs[t] = (c / (totals[t] + OBS_PSEUDO_COUNT * v as f64)).ln();
                    obs_var[t] = 1.0 / c;
                }
                let s = smooth_random_walk(&obs, &obs_var, hyper.sigma2, uniform, TOPIC_INIT_VAR);
                for t in 0..n_slices {
                    smoothed[t][w] = s.means[t];
                }
            }
            chain.natural_params = smoothed.iter().map(|m| log_softmax(m)).collect();
        });

        for topic in 0..k {
            let obs: Vec<f64> = (0..n_slices)
                .map(|t| eta_sums[t][topic] / docs_per_slice[t].max(1) as f64)
                .collect();
            let obs_var: Vec<f64> = docs_per_slice
                .iter()
                .map(|&m| if m > 0 { hyper.a2 / m as f64 } else { f64::INFINITY })
                .collect();
            let s = smooth_random_walk(&obs, &obs_var, hyper.delta2, alpha0[topic], ALPHA_INIT_VAR);
            for t in 0..n_slices {
                alpha_path[t][topic] = s.means[t];
            }
        }

        for chain in &chains {
            for w in 0..v {
                let path: Vec<f64> = chain.natural_params.iter().map(|p| p[w]).collect();
                bound += chain_log_prior(&path, uniform, TOPIC_INIT_VAR, hyper.sigma2);
            }
        }
        for topic in 0..k {
            let path: Vec<f64> = alpha_path.iter().map(|a| a[topic]).collect();
            bound += chain_log_prior(&path, alpha0[topic], ALPHA_INIT_VAR, hyper.delta2);
        }

        log.bounds.push(bound);
        if let Some(prev) = previous_bound {
            let delta = ((bound - prev) / prev.abs()).abs();
            log.deltas.push(delta);
            debug!("dtm iteration {}: bound {bound:.6} (relative change {delta:.3e})", log.iterations);
            if delta < hyper.tolerance {
                log.converged = true;
            }
        }
        previous_bound = Some(bound);
        log.final_bound = bound;
        if log.converged {
            break;
        }
    }

    let docs = corpus
        .documents()
        .zip(&slots)
        .map(|((t, d), slot)| {
            Ok(DocTopics {
                id: d.id.clone(),
                year: d.year,
                slice: t,
                theta: softmax(&slot.eta)?,
                eta: slot.eta.clone(),
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;

    let converged = log.converged;
    let model = FittedModel {
        hyper: hyper.clone(),
        vocabulary: corpus.vocabulary.clone(),
        slice_labels: corpus.slices.iter().map(|s| s.label.clone()).collect(),
        chains,
        alpha_path,
        docs,
        train_log: log,
    };
    if converged {
        Ok(model)
    } else {
        Err(ModelError::NonConvergence(Box::new(model)))
    }
}

impl FittedModel {
    /// The model, whether or not fitting converged.
    pub fn accept(result: Result<FittedModel, ModelError>) -> Result<FittedModel, ModelError> {
        match result {
            Err(ModelError::NonConvergence(m)) => Ok(*m),
            other => other,
        }
    }
}
