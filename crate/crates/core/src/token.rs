//! Whitespace tokenizer with terminal-punctuation splitting and `n't`
//! contraction handling, shared by the classifier and the auditors.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Splits `text` into tokens: whitespace-delimited chunks, with trailing
/// punctuation separated into its own tokens and the negated-contraction
/// suffix `n't` kept as a standalone token (`"isn't"` -> `["is", "n't"]`).
/// Deterministic; the empty string yields no tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let mut trailing = Vec::new();
        let mut word = chunk;
        while let Some(c) = word.chars().last() {
            if c.is_ascii_punctuation() {
                trailing.push(c.to_string());
                word = &word[..word.len() - c.len_utf8()];
            } else {
                break;
            }
        }
        if !word.is_empty() {
            let lower = word.to_lowercase();
            if lower.ends_with("n't") && word.len() > 3 && word.is_char_boundary(word.len() - 3) {
                tokens.push(word[..word.len() - 3].to_string());
                tokens.push(word[word.len() - 3..].to_string());
            } else {
                tokens.push(word.to_string());
            }
        }
        tokens.extend(trailing.into_iter().rev());
    }
    tokens
}

/// True when the token consists entirely of punctuation characters.
pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.is_ascii_punctuation())
}
