//! Cleans the bundled sample corpus and builds the time-sliced bag of words.
//!
//! ```bash
//! cargo run --release --example preprocess_corpus
//! ```

use std::path::Path;

use diachron::corpus::{build_time_slices, load_documents, DictionaryBundle, PreprocessOptions, Preprocessor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let raw = load_documents(&data.join("corpus"), (1900, 2100))?;
    let dicts = DictionaryBundle::from_files(
        Some(&data.join("frequency.txt")),
        Some(&data.join("custom.txt")),
        Some(&data.join("lemmas.txt")),
        Some(&data.join("stopwords.txt")),
        Some(&data.join("protected.txt")),
    )?;
    let pre = Preprocessor::new(dicts, PreprocessOptions::default())?;

    let (clean, reports): (Vec<_>, Vec<_>) = pre.process_all(&raw).into_iter().unzip();
    for r in reports.iter().filter(|r| r.corrected_count > 0).take(5) {
        println!(
            "{} ({}): recognized {:.3} -> {:.3}, fixes {:?}",
            r.id, r.year, r.recognized_before, r.recognized_after, r.replacements
        );
    }

    let corpus = build_time_slices(&clean, 5, 2)?;
    println!("\n{} documents, vocabulary of {}", corpus.num_documents(), corpus.vocabulary.len());
    for s in &corpus.slices {
        let tokens: u64 = s.documents.iter().map(|d| d.length()).sum();
        println!("slice {:<10} {:>3} docs {:>6} tokens", s.label, s.documents.len(), tokens);
    }
    Ok(())
}
