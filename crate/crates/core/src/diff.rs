//! Token-level diffs between a seed sentence and its edited counterpart.
//!
//! Alignment is by longest common subsequence, so the edit script is
//! minimal-length; maximal runs of deletions and insertions between two
//! anchors are merged into a single substitution. Positions index into the
//! seed token sequence, and replaying a diff over the seed reproduces the
//! edited sequence exactly.

use alloc::string::String;
use alloc::vec::Vec;

/// One edit operation. `position` is the seed-token index where the
/// operation applies; insertions happen before that index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EditOp {
    Insert {
        position: usize,
        tokens: Vec<String>,
    },
    Delete {
        position: usize,
        tokens: Vec<String>,
    },
    Substitute {
        position: usize,
        old: Vec<String>,
        new: Vec<String>,
    },
}

impl EditOp {
    pub fn position(&self) -> usize {
        match self {
            EditOp::Insert { position, .. }
            | EditOp::Delete { position, .. }
            | EditOp::Substitute { position, .. } => *position,
        }
    }

    /// Tokens removed from the seed by this operation.
    pub fn removed(&self) -> &[String] {
        match self {
            EditOp::Insert { .. } => &[],
            EditOp::Delete { tokens, .. } => tokens,
            EditOp::Substitute { old, .. } => old,
        }
    }

    /// Tokens contributed to the edited sequence by this operation.
    pub fn added(&self) -> &[String] {
        match self {
            EditOp::Insert { tokens, .. } => tokens,
            EditOp::Delete { .. } => &[],
            EditOp::Substitute { new, .. } => new,
        }
    }
}

/// A position-sorted, non-overlapping edit script.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EditDiff {
    ops: Vec<EditOp>,
}

impl EditDiff {
    pub fn ops(&self) -> &[EditOp] {
        &self.ops
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Every token that appears on either side of an operation.
    pub fn changed_tokens(&self) -> impl Iterator<Item = &str> {
        self.ops
            .iter()
            .flat_map(|op| op.removed().iter().chain(op.added()))
            .map(String::as_str)
    }

    /// Replays the script over `seed`, reconstructing the edited sequence.
    pub fn apply(&self, seed: &[String]) -> Vec<String> {
        let mut out = Vec::new();
        let mut cursor = 0;
        for op in &self.ops {
            let pos = op.position();
            out.extend_from_slice(&seed[cursor..pos]);
            cursor = pos;
            match op {
                EditOp::Insert { tokens, .. } => out.extend_from_slice(tokens),
                EditOp::Delete { tokens, .. } => cursor += tokens.len(),
                EditOp::Substitute { old, new, .. } => {
                    out.extend_from_slice(new);
                    cursor += old.len();
                }
            }
        }
        out.extend_from_slice(&seed[cursor..]);
        out
    }
}

/// Diffs two token sequences by LCS alignment.
pub fn token_diff(seed: &[String], edited: &[String]) -> EditDiff {
    let n = seed.len();
    let m = edited.len();
    // lcs[i][j] = LCS length of seed[i..] and edited[j..]
    let mut lcs = vec![0u32; (n + 1) * (m + 1)];
    let idx = |i: usize, j: usize| i * (m + 1) + j;
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[idx(i, j)] = if seed[i] == edited[j] {
                lcs[idx(i + 1, j + 1)] + 1
            } else {
                lcs[idx(i + 1, j)].max(lcs[idx(i, j + 1)])
            };
        }
    }

    let mut ops = Vec::new();
    let mut run_start = 0;
    let mut removed: Vec<String> = Vec::new();
    let mut added: Vec<String> = Vec::new();
    let mut flush = |start: usize, removed: &mut Vec<String>, added: &mut Vec<String>| {
        let op = match (removed.is_empty(), added.is_empty()) {
            (true, true) => return,
            (true, false) => EditOp::Insert {
                position: start,
                tokens: core::mem::take(added),
            },
            (false, true) => EditOp::Delete {
                position: start,
                tokens: core::mem::take(removed),
            },
            (false, false) => EditOp::Substitute {
                position: start,
                old: core::mem::take(removed),
                new: core::mem::take(added),
            },
        };
        ops.push(op);
    };

    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        if i < n && j < m && seed[i] == edited[j] {
            flush(run_start, &mut removed, &mut added);
            i += 1;
            j += 1;
            run_start = i;
        } else if j == m || (i < n && lcs[idx(i + 1, j)] >= lcs[idx(i, j + 1)]) {
            removed.push(seed[i].clone());
            i += 1;
        } else {
            added.push(edited[j].clone());
            j += 1;
        }
    }
    flush(run_start, &mut removed, &mut added);
    EditDiff { ops }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn seq(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn single_word_replacement_becomes_a_substitution() {
        let diff = token_diff(
            &seq(&["the", "lady", "has", "many", "children"]),
            &seq(&["the", "lady", "has", "three", "children"]),
        );
        assert_eq!(
            diff.ops(),
            &[EditOp::Substitute {
                position: 3,
                old: seq(&["many"]),
                new: seq(&["three"]),
            }]
        );
    }

    #[test]
    fn identical_sequences_have_an_empty_diff() {
        let tokens = seq(&["the", "same", "sentence"]);
        assert!(token_diff(&tokens, &tokens).is_empty());
    }

    #[test]
    fn pure_insertion_is_reported_as_insert() {
        let diff = token_diff(
            &seq(&["the", "man", "digs"]),
            &seq(&["the", "tall", "man", "digs"]),
        );
        assert_eq!(
            diff.ops(),
            &[EditOp::Insert {
                position: 1,
                tokens: seq(&["tall"]),
            }]
        );
    }

    #[test]
    fn multi_token_replacement_is_one_substitution() {
        let diff = token_diff(
            &seq(&["the", "actor", "saw", "the", "director"]),
            &seq(&["the", "actor", "had", "just", "met", "the", "director"]),
        );
        assert_eq!(
            diff.ops(),
            &[EditOp::Substitute {
                position: 2,
                old: seq(&["saw"]),
                new: seq(&["had", "just", "met"]),
            }]
        );
    }

    #[test]
    fn disjoint_edits_stay_separate_and_sorted() {
        let seed = seq(&["a", "b", "c", "d", "e"]);
        let edited = seq(&["a", "x", "c", "e"]);
        let diff = token_diff(&seed, &edited);
        assert_eq!(diff.ops().len(), 2);
        assert!(diff.ops()[0].position() <= diff.ops()[1].position());
        assert_eq!(diff.apply(&seed), edited);
    }

    #[test]
    fn replay_reconstructs_the_edited_sequence() {
        let seed = seq(&["one", "two", "three", "four"]);
        let edited = seq(&["zero", "one", "three", "five", "four", "six"]);
        let diff = token_diff(&seed, &edited);
        assert_eq!(diff.apply(&seed), edited);
    }

    #[test]
    fn empty_sides_degenerate_to_pure_insert_or_delete() {
        let diff = token_diff(&[], &seq(&["new", "text"]));
        assert_eq!(diff.ops().len(), 1);
        assert!(matches!(diff.ops()[0], EditOp::Insert { position: 0, .. }));

        let diff = token_diff(&seq(&["old"]), &[]);
        assert_eq!(diff.ops().len(), 1);
        assert!(matches!(diff.ops()[0], EditOp::Delete { position: 0, .. }));
    }
}
