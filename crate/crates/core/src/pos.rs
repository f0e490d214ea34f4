//! Desk-scale part-of-speech tagging.
//!
//! The built-in tagger is a closed-class lexicon plus digit patterns and a
//! few suffix heuristics with a noun fallback; corpora that carry gold tags
//! bypass it entirely (see `classify`). Tag names parse from the common
//! coarse tag sets so externally supplied annotations map onto the same
//! enum.

use crate::token::is_punctuation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PosTag {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Pronoun,
    Determiner,
    Preposition,
    Conjunction,
    Numeral,
    Negation,
    Punctuation,
    Other,
}

impl PosTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            PosTag::Noun => "NOUN",
            PosTag::Verb => "VERB",
            PosTag::Adjective => "ADJ",
            PosTag::Adverb => "ADV",
            PosTag::Pronoun => "PRON",
            PosTag::Determiner => "DET",
            PosTag::Preposition => "PREP",
            PosTag::Conjunction => "CONJ",
            PosTag::Numeral => "NUM",
            PosTag::Negation => "NEG",
            PosTag::Punctuation => "PUNCT",
            PosTag::Other => "X",
        }
    }

    /// Accepts this crate's names plus the usual UPOS / Penn spellings.
    pub fn parse(s: &str) -> Self {
        match s.to_uppercase().as_str() {
            "NOUN" | "PROPN" | "NN" | "NNS" | "NNP" | "NNPS" => PosTag::Noun,
            "VERB" | "AUX" | "VB" | "VBD" | "VBG" | "VBN" | "VBP" | "VBZ" | "MD" => PosTag::Verb,
            "ADJ" | "JJ" | "JJR" | "JJS" => PosTag::Adjective,
            "ADV" | "RB" | "RBR" | "RBS" => PosTag::Adverb,
            "PRON" | "PRP" | "PRP$" | "WP" | "WP$" => PosTag::Pronoun,
            "DET" | "DT" | "PDT" | "WDT" => PosTag::Determiner,
            "PREP" | "ADP" | "IN" => PosTag::Preposition,
            "CONJ" | "CCONJ" | "SCONJ" | "CC" => PosTag::Conjunction,
            "NUM" | "CD" => PosTag::Numeral,
            "NEG" => PosTag::Negation,
            "PUNCT" | "." | "," | ":" | "SYM" => PosTag::Punctuation,
            _ => PosTag::Other,
        }
    }
}

impl core::fmt::Display for PosTag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

const NEGATION_MODIFIERS: &[&str] = &[
    "no", "not", "n't", "never", "none", "nothing", "nobody", "nowhere", "neither", "nor",
];

const NUMBER_WORDS: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
    "hundred", "thousand", "million", "billion",
];

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "each", "every", "either", "any",
    "some", "all", "both", "few", "many", "most", "several", "such", "another", "other",
];

const PRONOUNS: &[&str] = &[
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them", "my",
    "your", "his", "its", "our", "their", "mine", "yours", "hers", "ours", "theirs", "who",
    "whom", "whose", "which", "what", "someone", "something", "anyone", "anybody",
    "everyone", "everything", "herself", "himself", "itself", "themselves",
];

const PREPOSITIONS: &[&str] = &[
    "of", "in", "on", "at", "by", "for", "with", "about", "against", "between", "into",
    "through", "during", "before", "after", "above", "below", "to", "from", "up", "down",
    "under", "over", "near", "off", "onto", "upon", "across", "behind", "beside", "beyond",
    "inside", "outside", "toward", "towards", "within", "without",
];

const CONJUNCTIONS: &[&str] = &[
    "and", "or", "but", "so", "yet", "because", "although", "though", "while", "whereas",
    "if", "unless", "since", "whether",
];

const AUX_VERBS: &[&str] = &[
    "is", "are", "was", "were", "be", "been", "being", "am", "has", "have", "had", "do",
    "does", "did", "will", "would", "can", "could", "shall", "should", "may", "might",
    "must",
];

/// `"3"`, `"42"`, `"3.5"`, `"1,000"`, `"1990s"` and similar digit shapes.
pub fn is_digit_like(token: &str) -> bool {
    let mut saw_digit = false;
    for c in token.chars() {
        if c.is_ascii_digit() {
            saw_digit = true;
        } else if !matches!(c, '.' | ',' | '-' | '/' | '%' | 's') {
            return false;
        }
    }
    saw_digit
}

/// Number words and digit shapes; expects the lowercase token.
pub fn is_number_word(token: &str) -> bool {
    NUMBER_WORDS.contains(&token) || is_digit_like(token)
}

pub fn is_negation_modifier(token: &str) -> bool {
    NEGATION_MODIFIERS.contains(&token)
}

/// Tags a single token in isolation.
pub fn tag_token(token: &str) -> PosTag {
    if is_punctuation(token) {
        return PosTag::Punctuation;
    }
    let lower = token.to_lowercase();
    let lower = lower.as_str();
    if is_negation_modifier(lower) {
        return PosTag::Negation;
    }
    if is_number_word(lower) {
        return PosTag::Numeral;
    }
    if DETERMINERS.contains(&lower) {
        return PosTag::Determiner;
    }
    if PRONOUNS.contains(&lower) {
        return PosTag::Pronoun;
    }
    if PREPOSITIONS.contains(&lower) {
        return PosTag::Preposition;
    }
    if CONJUNCTIONS.contains(&lower) {
        return PosTag::Conjunction;
    }
    if AUX_VERBS.contains(&lower) {
        return PosTag::Verb;
    }
    if lower.len() > 4 && (lower.ends_with("ing") || lower.ends_with("ed")) {
        return PosTag::Verb;
    }
    if lower.len() > 3 && lower.ends_with("ly") {
        return PosTag::Adverb;
    }
    PosTag::Noun
}

/// Tags every token with [`tag_token`].
pub fn tag_tokens<S: AsRef<str>>(tokens: &[S]) -> alloc::vec::Vec<PosTag> {
    tokens.iter().map(|t| tag_token(t.as_ref())).collect()
}
