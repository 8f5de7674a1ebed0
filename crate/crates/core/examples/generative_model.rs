//! Samples five-word documents from a two-topic model over the vocabulary
//! {a, b, c} and compares the empirical word frequencies with `theta^T B`.
//!
//! ```bash
//! cargo run --release --example generative_model
//! ```

use diachron::model::{generate_lda_document, sample_dirichlet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vocab = ["a", "b", "c"];
    let theta = [0.7, 0.3];
    let betas = vec![vec![0.2, 0.0, 0.8], vec![0.0, 1.0, 0.0]];
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    let docs = 100_000;
    let mut counts = [0usize; 3];
    let first: Vec<&str> = generate_lda_document(&theta, &betas, 5, &mut rng)?
        .into_iter()
        .map(|w| vocab[w])
        .collect();
    println!("one document: {}\n", first.join(" - "));
    for _ in 0..docs {
        for w in generate_lda_document(&theta, &betas, 5, &mut rng)? {
            counts[w] += 1;
        }
    }
    println!("word  empirical  expected");
    for (v, word) in vocab.iter().enumerate() {
        let expected: f64 = (0..2).map(|k| theta[k] * betas[k][v]).sum();
        println!("{word:>4}  {:>9.4}  {expected:>8.4}", counts[v] as f64 / (5 * docs) as f64);
    }

    // Topic proportions drawn from Dir(2, 2, 1) average to (0.4, 0.4, 0.2).
    let alpha = [2.0, 2.0, 1.0];
    let mut mean = [0.0; 3];
    for _ in 0..docs {
        for (m, x) in mean.iter_mut().zip(sample_dirichlet(&alpha, &mut rng)?) {
            *m += x / docs as f64;
        }
    }
    println!("\nDirichlet(2, 2, 1) sample mean: {:.4?}", mean);
    Ok(())
}
