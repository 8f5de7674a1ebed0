//! Static LDA on the pooled sample corpus, plus the one-topic sanity check:
//! a single topic is just the corpus word distribution.
//!
//! ```bash
//! cargo run --release --example fit_lda
//! ```

mod common;

use diachron::model::{fit_lda, CountMatrix, LdaOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = common::sample_corpus(5)?;
    let counts = CountMatrix::pooled(&corpus);

    let fit = fit_lda(&counts, &LdaOptions::new(5, 0.1, 7))?;
    println!("{} EM iterations, converged: {}", fit.iterations, fit.converged);
    for (k, topic) in fit.topics.iter().enumerate() {
        let mut order: Vec<usize> = (0..topic.len()).collect();
        order.sort_by(|&a, &b| topic[b].total_cmp(&topic[a]));
        let words: Vec<&str> = order[..6].iter().map(|&w| corpus.vocabulary.token(w as u32)).collect();
        println!("topic {k}: {}", words.join(" "));
    }

    let one = fit_lda(&counts, &LdaOptions::new(1, 1.0, 0))?;
    let gap = one.topics[0]
        .iter()
        .zip(counts.marginal())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("\nK=1: max |topic - corpus marginal| = {gap:.2e}");
    Ok(())
}
