//! Fits a dynamic topic model to a corpus sampled from known chains and
//! reports how closely each true topic is recovered in every slice.
//!
//! ```bash
//! cargo run --release --example dtm_recovery
//! ```

use std::time::Instant;

use diachron::model::{fit_dtm, generate_dtm_corpus, matched_cosines, GeneratorShape, Hyperparams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truth_hyper = Hyperparams {
        num_topics: 3,
        sigma2: 0.01,
        ..Hyperparams::default()
    };
    let shape = GeneratorShape::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (corpus, truth) = generate_dtm_corpus(&truth_hyper, &shape, &mut rng)?;
    println!(
        "{} documents in {} slices, {} words each",
        corpus.num_documents(),
        corpus.num_slices(),
        shape.words_per_doc
    );

    let start = Instant::now();
    let fitted = fit_dtm(&corpus, &Hyperparams { seed: 1, ..truth_hyper })?;
    println!(
        "fit in {:.1?}: {} iterations, final bound {:.1}",
        start.elapsed(),
        fitted.train_log.iterations,
        fitted.train_log.final_bound
    );

    for t in 0..corpus.num_slices() {
        let cos = matched_cosines(&truth.topic_word(t), &fitted.topic_word(t));
        println!("slice {t}: matched cosines {:.3?}", cos);
    }
    Ok(())
}
