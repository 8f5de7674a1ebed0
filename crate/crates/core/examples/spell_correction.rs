//! Frequency-ranked correction of OCR-damaged tokens.
//!
//! ```bash
//! cargo run --example spell_correction
//! ```

use diachron::corpus::{recognition_ratio, DictionaryBundle, SpellCorrector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let counts = [("filosofía", 900.0), ("filosofa", 20.0), ("razón", 700.0), ("conocimiento", 500.0), ("moral", 400.0)];
    let dicts = DictionaryBundle::new(
        counts.iter().map(|(w, c)| (w.to_string(), *c)),
        ["heideggeriano".to_string()],
        Vec::<(String, String)>::new(),
        Vec::<String>::new(),
        ["kant".to_string()],
    )?;
    let corrector = SpellCorrector::new(&dicts, 2)?;

    let tokens: Vec<String> = "filosofia rnoral conocimineto kant heideggeriano razon xyzzy"
        .split_whitespace()
        .map(String::from)
        .collect();
    for t in &tokens {
        println!("{t:>14} -> {}", corrector.suggest(t).unwrap_or("(kept)"));
    }

    let fixed = corrector.correct(&tokens, &dicts);
    println!(
        "\nrecognized {:.2} before, {:.2} after, {} tokens replaced",
        recognition_ratio(&tokens, &dicts),
        recognition_ratio(&fixed.tokens, &dicts),
        fixed.corrected_count
    );
    Ok(())
}
