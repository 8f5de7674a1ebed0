pub const DEFAULT_MIN_TOKEN_LEN: usize = 3;

/// Lowercases `text` and splits it into alphanumeric runs.
///
/// Punctuation and symbols separate tokens. Tokens made only of digits and
/// tokens shorter than `min_len` characters are dropped. Diacritics are kept.
pub fn normalize_and_tokenize(text: &str, min_len: usize) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .filter(|t| !t.chars().all(|c| c.is_numeric()))
        .filter(|t| t.chars().count() >= min_len)
        .map(|t| t.to_lowercase())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_short_and_punctuation() {
        assert_eq!(
            normalize_and_tokenize("La razón, ¡pura!", 3),
            vec!["razón", "pura"]
        );
        assert!(normalize_and_tokenize("IV. §2 1984", 3).is_empty());
    }

    #[test]
    fn mixed_punctuation_matches_hand_enumeration() {
        // 96 characters; tokens enumerated by hand
        let text = "¿Qué es la verdad? -preguntó Pilatos-; «La VERDAD», dijo Kant (1781), \"es 3x útil\"... ¡año 2020!";
        assert_eq!(text.chars().count(), 96);
        let expected = vec![
            "qué", "verdad", "preguntó", "pilatos", "verdad", "dijo", "kant", "útil", "año",
        ];
        assert_eq!(normalize_and_tokenize(text, 3), expected);
    }

    #[test]
    fn accents_preserved_and_lowercased() {
        assert_eq!(normalize_and_tokenize("FILOSOFÍA Ñandú", 3), vec!["filosofía", "ñandú"]);
    }

    #[test]
    fn length_counts_characters_not_bytes() {
        // "él" is two characters even though it is three bytes
        assert!(normalize_and_tokenize("él", 3).is_empty());
    }
}
