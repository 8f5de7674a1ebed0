//! The two fit-quality metrics on their own: document co-occurrence
//! coherence of each topic's top words, and held-out log perplexity.
//!
//! ```bash
//! cargo run --release --example coherence_perplexity
//! ```

mod common;

use diachron::model::{fit_dtm, log_perplexity, top_words, topic_coherence, Hyperparams};
use diachron::selection::holdout_split;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = common::sample_corpus(4)?;
    let (train, heldout) = holdout_split(&corpus, 0.1, 0);
    let hyper = Hyperparams {
        num_topics: 5,
        seed: 3,
        max_iters: 40,
        ..Hyperparams::default()
    };
    let model = diachron::model::FittedModel::accept(fit_dtm(&train, &hyper))?;

    let coherence = topic_coherence(&model, &corpus, 8);
    for (k, (score, words)) in coherence.per_topic.iter().zip(top_words(&model, 8)).enumerate() {
        let words: Vec<&str> = words.iter().map(|&w| model.vocabulary.token(w)).collect();
        println!("topic {k} ({score:>8.3}): {}", words.join(" "));
    }
    println!("average coherence ({}): {:.3}", coherence.variant, coherence.average);
    println!(
        "held-out log perplexity on {} documents: {:.4}",
        heldout.num_documents(),
        log_perplexity(&model, &heldout)?
    );
    Ok(())
}
