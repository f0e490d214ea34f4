//! Property tests for the token diff, classifier, and auditors.

use cadkit_core::audit::{negation_report, overlap_report};
use cadkit_core::classify::{classify, PerturbationType};
use cadkit_core::diff::token_diff;
use cadkit_core::pair::{Example, ExamplePair, Label, Task};
use proptest::prelude::*;

fn token() -> impl Strategy<Value = String> {
    prop::sample::select(vec![
        "the", "a", "dog", "cat", "man", "is", "was", "running", "sitting", "not", "no",
        "three", "many", "park", "tall", "small", ".",
    ])
    .prop_map(str::to_string)
}

fn token_seq(max: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(token(), 0..max)
}

proptest! {
    #[test]
    fn diff_replay_reconstructs_the_edited_sequence(
        seed in token_seq(24),
        edited in token_seq(24),
    ) {
        let diff = token_diff(&seed, &edited);
        prop_assert_eq!(diff.apply(&seed), edited);
    }

    #[test]
    fn diff_ops_are_sorted_and_non_overlapping(
        seed in token_seq(24),
        edited in token_seq(24),
    ) {
        let diff = token_diff(&seed, &edited);
        // consecutive ops are separated by at least one matched token
        let mut min_next = 0usize;
        for op in diff.ops() {
            prop_assert!(op.position() >= min_next);
            min_next = op.position() + op.removed().len() + 1;
        }
    }
}

proptest! {
    #[test]
    fn classifier_is_total_and_deterministic_on_valid_pairs(
        seed_tokens in token_seq(12),
        edited_tokens in token_seq(12),
    ) {
        prop_assume!(seed_tokens != edited_tokens);
        let pair = ExamplePair::new(
            "prop",
            Task::Nli,
            Example::new(
                [("premise", "A fixed premise."), ("hypothesis", &seed_tokens.join(" "))],
                Label::Entailment,
            ),
            Example::new(
                [("premise", "A fixed premise."), ("hypothesis", &edited_tokens.join(" "))],
                Label::Contradiction,
            ),
        ).unwrap();
        let first = classify(&pair).unwrap();
        let second = classify(&pair).unwrap();
        prop_assert_eq!(first, second);
        // lowercase alphabet means the normalized diff is never empty
        prop_assert_ne!(first, PerturbationType::Other);
    }

    #[test]
    fn audit_fractions_sum_to_one_on_nonempty_subgroups(
        labels in prop::collection::vec(
            prop::sample::select(vec![Label::Entailment, Label::Neutral, Label::Contradiction]),
            1..40,
        ),
        with_negation in prop::collection::vec(any::<bool>(), 1..40),
    ) {
        let examples: Vec<Example> = labels
            .iter()
            .zip(with_negation.iter().chain(std::iter::repeat(&true)))
            .map(|(&label, &neg)| {
                let hypothesis = if neg { "it is not here." } else { "it is here." };
                Example::new([("premise", "p."), ("hypothesis", hypothesis)], label)
            })
            .collect();
        let report = negation_report(examples.iter(), "hypothesis").unwrap();
        if !report.is_flagged_empty() {
            let total: f64 = report.fractions().iter().map(|(_, f)| f).sum();
            prop_assert!((total - 1.0).abs() <= 1e-9);
        }

        let overlap = overlap_report(examples.iter(), 0.9).unwrap();
        if !overlap.is_flagged_empty() {
            let total: f64 = overlap.fractions().iter().map(|(_, f)| f).sum();
            prop_assert!((total - 1.0).abs() <= 1e-9);
        }
    }
}
