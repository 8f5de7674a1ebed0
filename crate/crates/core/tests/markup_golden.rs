//! Markup stripping against reference output produced by a standard HTML
//! parser (Python's `html.parser`) with the same hidden/inline element lists.

use diachron::corpus::strip_markup;
use serde::Deserialize;

#[derive(Deserialize)]
struct Case {
    input: String,
    expected: String,
}

#[test]
fn matches_reference_parser() {
    let text = include_str!("data/markup_golden.json");
    let cases: Vec<Case> = serde_json::from_str(text).unwrap();
    assert_eq!(cases.len(), 20);
    let failures: Vec<String> = cases
        .iter()
        .filter(|c| strip_markup(&c.input) != c.expected)
        .map(|c| format!("{:?}: got {:?}, want {:?}", c.input, strip_markup(&c.input), c.expected))
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
