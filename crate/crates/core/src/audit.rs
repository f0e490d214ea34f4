//! Spurious-correlation diagnostics over labeled corpora: the label skew of
//! examples whose hypothesis contains a negation word, and of examples with
//! high premise/hypothesis word overlap.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::pair::{Example, Label};
use crate::token::{is_punctuation, tokenize};

/// The exact negation triple the audit subgroups on. The classifier's
/// broader negation-modifier lexicon is deliberately not used here.
pub const NEGATION_AUDIT_WORDS: &[&str] = &["no", "not", "n't"];

/// Default word-overlap threshold: "more than 90%", strictly.
pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 0.9;

#[derive(Debug, Error, PartialEq)]
pub enum AuditError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("threshold {value} is outside (0, 1]")]
    InvalidThreshold { value: f64 },
}

/// Per-label fractions within a selected subgroup of a corpus. An empty
/// subgroup is carried as a flagged distribution rather than a division by
/// zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDistribution {
    counts: BTreeMap<Label, usize>,
    subgroup_size: usize,
    corpus_size: usize,
}

impl LabelDistribution {
    fn from_labels<I: IntoIterator<Item = Label>>(labels: I, corpus_size: usize) -> Self {
        let mut counts = BTreeMap::new();
        let mut subgroup_size = 0;
        for label in labels {
            *counts.entry(label).or_insert(0) += 1;
            subgroup_size += 1;
        }
        Self {
            counts,
            subgroup_size,
            corpus_size,
        }
    }

    pub fn subgroup_size(&self) -> usize {
        self.subgroup_size
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    /// True when the subgroup selected no examples; fractions are undefined.
    pub fn is_flagged_empty(&self) -> bool {
        self.subgroup_size == 0
    }

    pub fn count(&self, label: Label) -> usize {
        self.counts.get(&label).copied().unwrap_or(0)
    }

    /// Fraction of subgroup examples carrying `label`; 0 for an empty
    /// subgroup (which [`Self::is_flagged_empty`] reports separately).
    pub fn fraction(&self, label: Label) -> f64 {
        if self.subgroup_size == 0 {
            0.0
        } else {
            self.count(label) as f64 / self.subgroup_size as f64
        }
    }

    /// `(label, fraction)` rows for every label seen in the subgroup, in
    /// label order.
    pub fn fractions(&self) -> Vec<(Label, f64)> {
        self.counts
            .keys()
            .map(|&label| (label, self.fraction(label)))
            .collect()
    }
}

/// Label distribution among examples whose `side` field contains one of the
/// [`NEGATION_AUDIT_WORDS`] as a (case-normalized) token.
pub fn negation_report<'a, I>(examples: I, side: &str) -> Result<LabelDistribution, AuditError>
where
    I: IntoIterator<Item = &'a Example>,
{
    let mut labels = Vec::new();
    let mut corpus_size = 0;
    for example in examples {
        corpus_size += 1;
        let has_negation = tokenize(example.field(side))
            .iter()
            .any(|t| NEGATION_AUDIT_WORDS.contains(&t.to_lowercase().as_str()));
        if has_negation {
            labels.push(example.label);
        }
    }
    if corpus_size == 0 {
        return Err(AuditError::EmptyCorpus);
    }
    Ok(LabelDistribution::from_labels(labels, corpus_size))
}

/// Fraction of hypothesis tokens (with multiplicity, punctuation excluded,
/// case-normalized) that appear among the premise tokens. An empty
/// hypothesis counts as overlap 0.
pub fn word_overlap(premise: &str, hypothesis: &str) -> f64 {
    let premise_tokens: BTreeSet<String> = content_tokens(premise).collect();
    let mut total = 0usize;
    let mut matched = 0usize;
    for token in content_tokens(hypothesis) {
        total += 1;
        if premise_tokens.contains(&token) {
            matched += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        matched as f64 / total as f64
    }
}

fn content_tokens(text: &str) -> impl Iterator<Item = String> {
    tokenize(text)
        .into_iter()
        .filter(|t| !is_punctuation(t))
        .map(|t| t.to_lowercase())
}

/// Label distribution among examples whose word overlap strictly exceeds
/// `threshold` ("more than 90%" at the default).
pub fn overlap_report<'a, I>(examples: I, threshold: f64) -> Result<LabelDistribution, AuditError>
where
    I: IntoIterator<Item = &'a Example>,
{
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(AuditError::InvalidThreshold { value: threshold });
    }
    let mut labels = Vec::new();
    let mut corpus_size = 0;
    for example in examples {
        corpus_size += 1;
        if word_overlap(example.field("premise"), example.field("hypothesis")) > threshold {
            labels.push(example.label);
        }
    }
    if corpus_size == 0 {
        return Err(AuditError::EmptyCorpus);
    }
    Ok(LabelDistribution::from_labels(labels, corpus_size))
}

/// How much more the CAD subgroup leans on `target` than the seed subgroup:
/// `cad_fraction - seed_fraction`. `None` when either side is flagged empty.
pub fn skew_compare(
    seed: &LabelDistribution,
    cad: &LabelDistribution,
    target: Label,
) -> Option<f64> {
    if seed.is_flagged_empty() || cad.is_flagged_empty() {
        return None;
    }
    Some(cad.fraction(target) - seed.fraction(target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pair::Example;

    fn nli(premise: &str, hypothesis: &str, label: Label) -> Example {
        Example::new([("premise", premise), ("hypothesis", hypothesis)], label)
    }

    #[test]
    fn all_contradiction_subgroup_has_fraction_one() {
        let examples = [nli("A cat sits.", "A cat is not sitting.", Label::Contradiction),
            nli("A cat sits.", "There is no cat.", Label::Contradiction),
            nli("A cat sits.", "An animal sits.", Label::Entailment)];
        let report = negation_report(examples.iter(), "hypothesis").unwrap();
        assert_eq!(report.subgroup_size(), 2);
        assert_eq!(report.fraction(Label::Contradiction), 1.0);
    }

    #[test]
    fn hand_counted_fractions() {
        let mut examples = vec![
            nli("p", "it is not red.", Label::Contradiction),
            nli("p", "it is not blue.", Label::Contradiction),
            nli("p", "it is not old.", Label::Neutral),
            nli("p", "it is not new.", Label::Entailment),
        ];
        for i in 0..6 {
            let label = if i % 2 == 0 { Label::Entailment } else { Label::Neutral };
            examples.push(nli("p", "plain hypothesis.", label));
        }
        let report = negation_report(examples.iter(), "hypothesis").unwrap();
        assert_eq!(report.subgroup_size(), 4);
        assert_eq!(report.corpus_size(), 10);
        assert_eq!(report.fraction(Label::Entailment), 0.25);
        assert_eq!(report.fraction(Label::Neutral), 0.25);
        assert_eq!(report.fraction(Label::Contradiction), 0.5);
    }

    #[test]
    fn negation_matches_contractions_and_case() {
        let examples = [nli("p", "The dog isn't barking.", Label::Contradiction),
            nli("p", "Not here.", Label::Neutral),
            nli("p", "Nothing matches the audit list.", Label::Entailment)];
        let report = negation_report(examples.iter(), "hypothesis").unwrap();
        // "isn't" tokenizes to [is, n't]; "Not" lowercases; "Nothing" is not
        // in the three-word audit list.
        assert_eq!(report.subgroup_size(), 2);
    }

    #[test]
    fn empty_corpus_and_empty_subgroup_are_distinguished() {
        let none: Vec<Example> = Vec::new();
        assert_eq!(
            negation_report(none.iter(), "hypothesis"),
            Err(AuditError::EmptyCorpus)
        );

        let examples = [nli("p", "plain.", Label::Entailment)];
        let report = negation_report(examples.iter(), "hypothesis").unwrap();
        assert!(report.is_flagged_empty());
        assert_eq!(report.fraction(Label::Entailment), 0.0);
    }

    #[test]
    fn identical_sentences_overlap_fully() {
        let examples = [nli("A man walks a dog.", "A man walks a dog.", Label::Entailment)];
        let report = overlap_report(examples.iter(), 0.9).unwrap();
        assert_eq!(report.subgroup_size(), 1);
        assert_eq!(report.fraction(Label::Entailment), 1.0);
    }

    #[test]
    fn nine_of_ten_tokens_sit_exactly_on_the_strict_boundary() {
        let premise = "a b c d e f g h i";
        let hypothesis = "a b c d e f g h i z";
        assert_eq!(word_overlap(premise, hypothesis), 0.9);
        let examples = [nli(premise, hypothesis, Label::Entailment)];
        let report = overlap_report(examples.iter(), 0.9).unwrap();
        assert!(report.is_flagged_empty());
    }

    #[test]
    fn empty_hypothesis_is_excluded_at_any_positive_threshold() {
        assert_eq!(word_overlap("some premise", ""), 0.0);
        let examples = [nli("some premise", "", Label::Neutral)];
        let report = overlap_report(examples.iter(), 0.1).unwrap();
        assert!(report.is_flagged_empty());
    }

    #[test]
    fn punctuation_is_ignored_by_overlap() {
        // All three hypothesis words occur in the premise; the "!" must not
        // count against the overlap.
        assert_eq!(word_overlap("a man walks", "a man walks !"), 1.0);
    }

    #[test]
    fn threshold_must_be_in_unit_interval() {
        let examples = [nli("p", "h", Label::Neutral)];
        assert!(matches!(
            overlap_report(examples.iter(), 0.0),
            Err(AuditError::InvalidThreshold { .. })
        ));
        assert!(matches!(
            overlap_report(examples.iter(), 1.5),
            Err(AuditError::InvalidThreshold { .. })
        ));
    }

    #[test]
    fn raising_the_threshold_never_grows_the_subgroup() {
        let examples = [nli("a b c d", "a b c d", Label::Entailment),
            nli("a b c d", "a b c z", Label::Entailment),
            nli("a b c d", "a z y x", Label::Neutral)];
        let mut last = usize::MAX;
        for threshold in [0.2, 0.5, 0.74, 0.9, 1.0] {
            let report = overlap_report(examples.iter(), threshold).unwrap();
            assert!(report.subgroup_size() <= last);
            last = report.subgroup_size();
        }
    }

    #[test]
    fn skew_is_a_fraction_difference() {
        let seed = LabelDistribution::from_labels(
            [Label::Contradiction, Label::Entailment],
            2,
        );
        let cad = LabelDistribution::from_labels(
            [
                Label::Contradiction,
                Label::Contradiction,
                Label::Contradiction,
                Label::Entailment,
            ],
            4,
        );
        let skew = skew_compare(&seed, &cad, Label::Contradiction).unwrap();
        assert!((skew - 0.25).abs() < 1e-12);
        assert_eq!(skew_compare(&seed, &seed, Label::Contradiction), Some(0.0));
    }

    #[test]
    fn flagged_empty_inputs_propagate() {
        let seed = LabelDistribution::from_labels([], 5);
        let cad = LabelDistribution::from_labels([Label::Entailment], 5);
        assert_eq!(skew_compare(&seed, &cad, Label::Entailment), None);
    }

    #[test]
    fn cad_that_adds_negated_contradictions_raises_the_skew() {
        // Seed: one negated contradiction, one negated entailment.
        let seed = vec![
            nli("p", "it is not red.", Label::Contradiction),
            nli("p", "not all are here.", Label::Entailment),
            nli("p", "plain.", Label::Neutral),
        ];
        // CAD adds negation only to contradictions.
        let mut cad = seed.clone();
        cad.push(nli("p", "there is no dog.", Label::Contradiction));
        cad.push(nli("p", "nobody is here at all.", Label::Neutral));

        let seed_report = negation_report(seed.iter(), "hypothesis").unwrap();
        let cad_report = negation_report(cad.iter(), "hypothesis").unwrap();
        let skew = skew_compare(&seed_report, &cad_report, Label::Contradiction).unwrap();
        assert!(skew > 0.0);
    }
}
