//! Loading of the bundled sample corpus, shared by the examples.

use std::path::{Path, PathBuf};

use diachron::corpus::{build_time_slices, load_documents, DictionaryBundle, PreprocessOptions, Preprocessor, TimeSlicedCorpus};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data")
}

/// The sample corpus cleaned with the sample dictionaries, in slices of
/// `bin_years` years.
pub fn sample_corpus(bin_years: i32) -> Result<TimeSlicedCorpus, Box<dyn std::error::Error>> {
    let data = data_dir();
    let raw = load_documents(&data.join("corpus"), (1900, 2100))?;
    let dicts = DictionaryBundle::from_files(
        Some(&data.join("frequency.txt")),
        Some(&data.join("custom.txt")),
        Some(&data.join("lemmas.txt")),
        Some(&data.join("stopwords.txt")),
        Some(&data.join("protected.txt")),
    )?;
    let pre = Preprocessor::new(dicts, PreprocessOptions::default())?;
    let clean: Vec<_> = pre.process_all(&raw).into_iter().map(|(c, _)| c).collect();
    Ok(build_time_slices(&clean, bin_years, 2)?)
}
