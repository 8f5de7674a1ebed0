/// Elements whose content is never visible text.
const HIDDEN_ELEMENTS: &[&str] = &["script", "style", "noscript", "template", "head"];

/// Elements that do not break words when removed.
const INLINE_ELEMENTS: &[&str] = &[
    "a", "abbr", "b", "bdi", "bdo", "cite", "code", "data", "dfn", "em", "font", "i", "kbd",
    "mark", "q", "s", "samp", "small", "span", "strike", "strong", "sub", "sup", "time", "tt",
    "u", "var", "wbr",
];

/// Extracts the visible text of a markup document.
///
/// Tags are removed; block-level tags act as word separators while inline tags
/// (`<b>`, `<i>`, `<span>`, ...) do not. Content of `script`, `style` and
/// similar elements is dropped. Character references are decoded and runs of
/// whitespace collapse to a single space.
///
/// Malformed markup never fails: an unterminated tag swallows the rest of the
/// input, and a `<` that cannot start a tag is kept as text.
pub fn strip_markup(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;

    while let Some(pos) = rest.find(['<', '&']) {
        out.push_str(&rest[..pos]);
        rest = &rest[pos..];
        if rest.starts_with('&') {
            let (decoded, used) = decode_reference(rest);
            out.push_str(&decoded);
            rest = &rest[used..];
            continue;
        }

        if let Some(after) = rest.strip_prefix("<!--") {
            rest = match after.find("-->") {
                Some(end) => &after[end + 3..],
                None => "",
            };
            out.push(' ');
            continue;
        }

        let next = rest[1..].chars().next();
        let starts_tag = matches!(next, Some(c) if c.is_ascii_alphabetic() || c == '/' || c == '!' || c == '?');
        if !starts_tag {
            out.push('<');
            rest = &rest[1..];
            continue;
        }

        let Some(end) = find_tag_end(rest) else {
            // unterminated tag: nothing visible follows
            rest = "";
            break;
        };
        let tag = &rest[1..end];
        rest = &rest[end + 1..];

        let (closing, name) = tag_name(tag);
        if !closing && HIDDEN_ELEMENTS.contains(&name.as_str()) && !tag.trim_end().ends_with('/') {
            rest = skip_hidden_content(rest, &name);
            out.push(' ');
        } else if !INLINE_ELEMENTS.contains(&name.as_str()) {
            out.push(' ');
        }
    }
    out.push_str(rest);

    collapse_whitespace(&out)
}

/// Byte index of the `>` closing the tag that starts at `s[0] == '<'`,
/// honoring quoted attribute values.
fn find_tag_end(s: &str) -> Option<usize> {
    let mut quote: Option<char> = None;
    for (i, c) in s.char_indices().skip(1) {
        match (quote, c) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), _) => {}
            (None, '"') | (None, '\'') => quote = Some(c),
            (None, '>') => return Some(i),
            _ => {}
        }
    }
    None
}

fn tag_name(tag: &str) -> (bool, String) {
    let tag = tag.trim_start();
    let (closing, body) = match tag.strip_prefix('/') {
        Some(b) => (true, b.trim_start()),
        None => (false, tag),
    };
    let name: String = body
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase();
    (closing, name)
}

fn skip_hidden_content<'a>(s: &'a str, name: &str) -> &'a str {
    let lower = s.to_ascii_lowercase();
    let needle = format!("</{name}");
    match lower.find(&needle) {
        Some(start) => match s[start..].find('>') {
            Some(end) => &s[start + end + 1..],
            None => "",
        },
        None => "",
    }
}

/// Decodes the character reference at the start of `s` (which begins with
/// `&`). Returns the replacement text and the number of bytes consumed.
fn decode_reference(s: &str) -> (String, usize) {
    let body_end = s[1..]
        .char_indices()
        .take(32)
        .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '#'))
        .map(|(i, _)| i + 1)
        .unwrap_or(s.len().min(33));
    let name = &s[1..body_end];
    let used = if s[body_end..].starts_with(';') {
        body_end + 1
    } else {
        body_end
    };

    let decoded = if let Some(num) = name.strip_prefix('#') {
        let code = match num.strip_prefix(['x', 'X']) {
            Some(hex) => u32::from_str_radix(hex, 16).ok(),
            None => num.parse::<u32>().ok(),
        };
        code.and_then(char::from_u32)
    } else {
        named_entity(name)
    };

    match decoded {
        Some(c) => (c.to_string(), used),
        None => ("&".to_string(), 1),
    }
}

fn named_entity(name: &str) -> Option<char> {
    let c = match name {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "nbsp" => '\u{a0}',
        "iexcl" => '¡',
        "cent" => '¢',
        "pound" => '£',
        "sect" => '§',
        "copy" => '©',
        "ordf" => 'ª',
        "laquo" => '«',
        "reg" => '®',
        "deg" => '°',
        "plusmn" => '±',
        "para" => '¶',
        "middot" => '·',
        "ordm" => 'º',
        "raquo" => '»',
        "iquest" => '¿',
        "Agrave" => 'À',
        "Aacute" => 'Á',
        "Acirc" => 'Â',
        "Atilde" => 'Ã',
        "Auml" => 'Ä',
        "Ccedil" => 'Ç',
        "Egrave" => 'È',
        "Eacute" => 'É',
        "Ecirc" => 'Ê',
        "Euml" => 'Ë',
        "Igrave" => 'Ì',
        "Iacute" => 'Í',
        "Icirc" => 'Î',
        "Iuml" => 'Ï',
        "Ntilde" => 'Ñ',
        "Ograve" => 'Ò',
        "Oacute" => 'Ó',
        "Ocirc" => 'Ô',
        "Otilde" => 'Õ',
        "Ouml" => 'Ö',
        "Ugrave" => 'Ù',
        "Uacute" => 'Ú',
        "Ucirc" => 'Û',
        "Uuml" => 'Ü',
        "agrave" => 'à',
        "aacute" => 'á',
        "acirc" => 'â',
        "atilde" => 'ã',
        "auml" => 'ä',
        "ccedil" => 'ç',
        "egrave" => 'è',
        "eacute" => 'é',
        "ecirc" => 'ê',
        "euml" => 'ë',
        "igrave" => 'ì',
        "iacute" => 'í',
        "icirc" => 'î',
        "iuml" => 'ï',
        "ntilde" => 'ñ',
        "ograve" => 'ò',
        "oacute" => 'ó',
        "ocirc" => 'ô',
        "otilde" => 'õ',
        "ouml" => 'ö',
        "ugrave" => 'ù',
        "uacute" => 'ú',
        "ucirc" => 'û',
        "uuml" => 'ü',
        "ndash" => '–',
        "mdash" => '—',
        "lsquo" => '‘',
        "rsquo" => '’',
        "ldquo" => '“',
        "rdquo" => '”',
        "hellip" => '…',
        "euro" => '€',
        _ => return None,
    };
    Some(c)
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removes_tags() {
        assert_eq!(strip_markup("<p>Kant y la <b>razón</b></p>"), "Kant y la razón");
        assert_eq!(strip_markup(""), "");
    }

    #[test]
    fn script_content_dropped_and_separates() {
        assert_eq!(strip_markup("<div>a<script>x()</script>b</div>"), "a b");
        assert_eq!(strip_markup("<style>p{}</style>texto"), "texto");
    }

    #[test]
    fn inline_tags_do_not_split_words() {
        assert_eq!(strip_markup("ra<i>zó</i>n"), "razón");
        assert_eq!(strip_markup("uno<br>dos"), "uno dos");
    }

    #[test]
    fn entities_and_stray_brackets() {
        assert_eq!(strip_markup("a &amp; b &lt; c"), "a & b < c");
        assert_eq!(strip_markup("filosof&iacute;a &#233; &#xE9;"), "filosofía é é");
        assert_eq!(strip_markup("3 < 4 & x"), "3 < 4 & x");
        assert_eq!(strip_markup("texto <p"), "texto");
    }

    #[test]
    fn comments_removed() {
        assert_eq!(strip_markup("a<!-- <b>x</b> -->b"), "a b");
    }
}
