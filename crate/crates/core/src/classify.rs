//! Rule-based assignment of a perturbation type to each counterfactual pair.
//!
//! Every changed field of a pair is tokenized, case-normalized, and diffed
//! against its edited version; the pooled edit operations are then matched
//! against one rule per type in a fixed precedence order (configurable, since
//! the types are not mutually exclusive):
//!
//! negation > quantifier > lexical > insert > delete > resemantic
//!
//! `resemantic` acts as the catch-all for whatever substitution-bearing or
//! mixed edit script no earlier rule claims, which keeps the assignment total
//! over valid pairs.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::diff::{token_diff, EditOp};
use crate::pair::ExamplePair;
use crate::pos::{self, PosTag};
use crate::token::tokenize;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ClassifyError {
    #[error("pair `{pair_id}`: seed and edited fields are identical")]
    IdenticalFields { pair_id: String },
    #[error("corpus is empty")]
    EmptyCorpus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PerturbationType {
    Negation,
    Quantifier,
    Lexical,
    Insert,
    Delete,
    Resemantic,
    Other,
}

impl PerturbationType {
    /// The six rule-defined types, in default precedence order.
    pub const CANONICAL: [PerturbationType; 6] = [
        PerturbationType::Negation,
        PerturbationType::Quantifier,
        PerturbationType::Lexical,
        PerturbationType::Insert,
        PerturbationType::Delete,
        PerturbationType::Resemantic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PerturbationType::Negation => "negation",
            PerturbationType::Quantifier => "quantifier",
            PerturbationType::Lexical => "lexical",
            PerturbationType::Insert => "insert",
            PerturbationType::Delete => "delete",
            PerturbationType::Resemantic => "resemantic",
            PerturbationType::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_lowercase().as_str() {
            "negation" => Some(PerturbationType::Negation),
            "quantifier" => Some(PerturbationType::Quantifier),
            "lexical" => Some(PerturbationType::Lexical),
            "insert" => Some(PerturbationType::Insert),
            "delete" => Some(PerturbationType::Delete),
            "resemantic" => Some(PerturbationType::Resemantic),
            "other" => Some(PerturbationType::Other),
            _ => None,
        }
    }
}

impl core::fmt::Display for PerturbationType {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Words that signal a change in quantity without being numeral-tagged
/// ("many" -> "three" is still a quantifier edit).
const QUANTITY_WORDS: &[&str] = &["many", "few", "some", "all", "several", "both", "most"];

/// Classifier knobs. `Default` gives the canonical precedence and the
/// built-in tagger as fallback for tokens without gold annotations.
#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// Rule evaluation order; the first matching rule assigns the type.
    pub precedence: Vec<PerturbationType>,
    /// When false, tokens without gold POS annotations are tagged
    /// [`PosTag::Other`] instead of going through the built-in tagger.
    pub fallback_tagger: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            precedence: PerturbationType::CANONICAL.to_vec(),
            fallback_tagger: true,
        }
    }
}

/// One pooled edit operation with the POS tags of both sides attached.
#[derive(Debug, Clone)]
struct TaggedOp {
    op: EditOp,
    removed_tags: Vec<PosTag>,
    added_tags: Vec<PosTag>,
}

/// Assigns the perturbation type of a pair under the default options.
pub fn classify(pair: &ExamplePair) -> Result<PerturbationType, ClassifyError> {
    classify_with(pair, &ClassifyOptions::default())
}

/// Assigns the perturbation type of a pair.
///
/// Errors only when no field differs at all (malformed input); a pair whose
/// fields differ but whose case-normalized token diff is empty classifies as
/// [`PerturbationType::Other`]. Lowercasing happens before diffing, so the
/// assigned type is invariant to token-level case changes.
pub fn classify_with(
    pair: &ExamplePair,
    options: &ClassifyOptions,
) -> Result<PerturbationType, ClassifyError> {
    let changed = pair.changed_fields();
    if changed.is_empty() {
        return Err(ClassifyError::IdenticalFields {
            pair_id: pair.pair_id.clone(),
        });
    }

    let mut ops: Vec<TaggedOp> = Vec::new();
    for field in changed {
        let seed_tokens = tokenize(pair.seed.field(field));
        let edited_tokens = tokenize(pair.edited.field(field));
        let seed_tags = side_tags(&seed_tokens, pair.seed.pos.get(field), options);
        let edited_tags = side_tags(&edited_tokens, pair.edited.pos.get(field), options);

        let seed_lower: Vec<String> = seed_tokens.iter().map(|t| t.to_lowercase()).collect();
        let edited_lower: Vec<String> = edited_tokens.iter().map(|t| t.to_lowercase()).collect();
        let diff = token_diff(&seed_lower, &edited_lower);

        // Track the edited-side cursor so added tokens pick up their own
        // side's tags.
        let mut seed_cursor = 0;
        let mut edited_cursor = 0;
        for op in diff.ops() {
            let pos = op.position();
            edited_cursor += pos - seed_cursor;
            seed_cursor = pos;
            let removed = op.removed().len();
            let added = op.added().len();
            ops.push(TaggedOp {
                op: op.clone(),
                removed_tags: seed_tags[pos..pos + removed].to_vec(),
                added_tags: edited_tags[edited_cursor..edited_cursor + added].to_vec(),
            });
            seed_cursor += removed;
            edited_cursor += added;
        }
    }

    if ops.is_empty() {
        return Ok(PerturbationType::Other);
    }
    for &ty in &options.precedence {
        if rule_matches(ty, &ops) {
            return Ok(ty);
        }
    }
    Ok(PerturbationType::Other)
}

fn side_tags(
    tokens: &[String],
    gold: Option<&Vec<PosTag>>,
    options: &ClassifyOptions,
) -> Vec<PosTag> {
    match gold {
        // Gold annotations take priority, but only when they line up with
        // the token sequence.
        Some(tags) if tags.len() == tokens.len() => tags.clone(),
        _ if options.fallback_tagger => pos::tag_tokens(tokens),
        _ => vec![PosTag::Other; tokens.len()],
    }
}

fn rule_matches(ty: PerturbationType, ops: &[TaggedOp]) -> bool {
    match ty {
        PerturbationType::Negation => changed_tokens(ops).any(|(t, _)| pos::is_negation_modifier(t)),
        PerturbationType::Quantifier => changed_tokens(ops).any(|(t, tag)| {
            tag == PosTag::Numeral || pos::is_number_word(t) || QUANTITY_WORDS.contains(&t)
        }),
        PerturbationType::Lexical => ops.iter().all(|op| {
            matches!(&op.op, EditOp::Substitute { old, new, .. }
                if old.len() == 1 && new.len() == 1 && op.removed_tags == op.added_tags)
        }),
        PerturbationType::Insert => ops.iter().all(|op| matches!(op.op, EditOp::Insert { .. })),
        PerturbationType::Delete => ops.iter().all(|op| matches!(op.op, EditOp::Delete { .. })),
        PerturbationType::Resemantic => true,
        PerturbationType::Other => false,
    }
}

fn changed_tokens(ops: &[TaggedOp]) -> impl Iterator<Item = (&str, PosTag)> {
    ops.iter().flat_map(|op| {
        let removed = op
            .op
            .removed()
            .iter()
            .zip(op.removed_tags.iter().copied());
        let added = op.op.added().iter().zip(op.added_tags.iter().copied());
        removed.chain(added).map(|(t, tag)| (t.as_str(), tag))
    })
}

/// Per-pair assignments plus aggregate counts over a corpus. Pairs that fail
/// to classify are collected, not fatal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusClassification {
    pub assignments: Vec<(String, PerturbationType)>,
    pub errors: Vec<(String, ClassifyError)>,
    pub counts: BTreeMap<PerturbationType, usize>,
}

impl CorpusClassification {
    /// Assignment lookup keyed by pair id.
    pub fn by_pair_id(&self) -> BTreeMap<&str, PerturbationType> {
        self.assignments
            .iter()
            .map(|(id, ty)| (id.as_str(), *ty))
            .collect()
    }
}

/// Classifies every pair, accumulating counts and per-pair errors.
pub fn classify_corpus(
    pairs: &[ExamplePair],
    options: &ClassifyOptions,
) -> Result<CorpusClassification, ClassifyError> {
    if pairs.is_empty() {
        return Err(ClassifyError::EmptyCorpus);
    }
    let mut result = CorpusClassification::default();
    for ty in PerturbationType::CANONICAL {
        result.counts.insert(ty, 0);
    }
    for pair in pairs {
        match classify_with(pair, options) {
            Ok(ty) => {
                result.assignments.push((pair.pair_id.clone(), ty));
                *result.counts.entry(ty).or_insert(0) += 1;
            }
            Err(err) => result.errors.push((pair.pair_id.clone(), err)),
        }
    }
    Ok(result)
}
