//! Seed/edited example pairs and validated corpora of them.
//!
//! A counterfactual pair holds a seed example and a human-edited version
//! whose label is flipped; at least one text field must differ between the
//! two sides.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use thiserror::Error;

use crate::pos::PosTag;

#[derive(Debug, Error, PartialEq)]
pub enum PairError {
    #[error("pair `{pair_id}`: seed and edited labels are equal ({label})")]
    LabelsEqual { pair_id: String, label: Label },
    #[error("pair `{pair_id}`: label {label} is not valid for task {task}")]
    LabelTaskMismatch {
        pair_id: String,
        label: Label,
        task: Task,
    },
    #[error("pair `{pair_id}`: no text field differs between seed and edited")]
    NoFieldDiffers { pair_id: String },
    #[error("pair `{pair_id}`: empty pair id")]
    EmptyPairId { pair_id: String },
    #[error("duplicate pair id `{pair_id}`")]
    DuplicatePairId { pair_id: String },
    #[error("pair `{pair_id}`: task {task} does not match corpus task {corpus_task}")]
    TaskMismatch {
        pair_id: String,
        task: Task,
        corpus_task: Task,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Task {
    Nli,
    BoolQ,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::Nli => "nli",
            Task::BoolQ => "boolq",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_lowercase().as_str() {
            "nli" => Some(Task::Nli),
            "boolq" => Some(Task::BoolQ),
            _ => None,
        }
    }
}

impl core::fmt::Display for Task {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Task label: three-way for NLI, boolean for BoolQ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Label {
    Entailment,
    Neutral,
    Contradiction,
    True,
    False,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Entailment => "entailment",
            Label::Neutral => "neutral",
            Label::Contradiction => "contradiction",
            Label::True => "true",
            Label::False => "false",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_lowercase().as_str() {
            "entailment" => Some(Label::Entailment),
            "neutral" => Some(Label::Neutral),
            "contradiction" => Some(Label::Contradiction),
            "true" => Some(Label::True),
            "false" => Some(Label::False),
            _ => None,
        }
    }

    pub fn is_valid_for(&self, task: Task) -> bool {
        match task {
            Task::Nli => matches!(self, Label::Entailment | Label::Neutral | Label::Contradiction),
            Task::BoolQ => matches!(self, Label::True | Label::False),
        }
    }

    /// The label alphabet of a task, in canonical order.
    pub fn alphabet(task: Task) -> &'static [Label] {
        match task {
            Task::Nli => &[Label::Entailment, Label::Neutral, Label::Contradiction],
            Task::BoolQ => &[Label::True, Label::False],
        }
    }
}

impl core::fmt::Display for Label {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One side of a pair: named text fields (premise/hypothesis for NLI,
/// question/passage for BoolQ), a label, and optional per-field gold POS
/// annotations aligned with the tokenizer's output.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub fields: BTreeMap<String, String>,
    pub label: Label,
    pub pos: BTreeMap<String, Vec<PosTag>>,
}

impl Example {
    pub fn new<const N: usize>(fields: [(&str, &str); N], label: Label) -> Self {
        Self {
            fields: fields
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            label,
            pos: BTreeMap::new(),
        }
    }

    /// The named field's text, or `""` when the field is absent.
    pub fn field(&self, name: &str) -> &str {
        self.fields.get(name).map(String::as_str).unwrap_or("")
    }
}

/// A seed example and its label-flipped counterfactual edit.
#[derive(Debug, Clone, PartialEq)]
pub struct ExamplePair {
    pub pair_id: String,
    pub task: Task,
    pub seed: Example,
    pub edited: Example,
}

impl ExamplePair {
    pub fn new(
        pair_id: &str,
        task: Task,
        seed: Example,
        edited: Example,
    ) -> Result<Self, PairError> {
        let pair = Self {
            pair_id: pair_id.to_string(),
            task,
            seed,
            edited,
        };
        pair.validate()?;
        Ok(pair)
    }

    /// Checks the CAD invariants: flipped labels, labels valid for the task,
    /// and at least one differing text field.
    pub fn validate(&self) -> Result<(), PairError> {
        if self.pair_id.is_empty() {
            return Err(PairError::EmptyPairId {
                pair_id: self.pair_id.clone(),
            });
        }
        for label in [self.seed.label, self.edited.label] {
            if !label.is_valid_for(self.task) {
                return Err(PairError::LabelTaskMismatch {
                    pair_id: self.pair_id.clone(),
                    label,
                    task: self.task,
                });
            }
        }
        if self.seed.label == self.edited.label {
            return Err(PairError::LabelsEqual {
                pair_id: self.pair_id.clone(),
                label: self.seed.label,
            });
        }
        if self.changed_fields().is_empty() {
            return Err(PairError::NoFieldDiffers {
                pair_id: self.pair_id.clone(),
            });
        }
        Ok(())
    }

    /// Names of fields whose raw text differs between seed and edited, in
    /// sorted order (absent fields compare as empty).
    pub fn changed_fields(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self
            .seed
            .fields
            .keys()
            .chain(self.edited.fields.keys())
            .map(String::as_str)
            .collect();
        names.sort_unstable();
        names.dedup();
        names
            .into_iter()
            .filter(|name| self.seed.field(name) != self.edited.field(name))
            .collect()
    }
}

/// Where a corpus came from, for reproducibility manifests.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub source: String,
    pub file_hash: String,
}

/// A validated collection of pairs for one task with unique pair ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub task: Task,
    pub pairs: Vec<ExamplePair>,
    pub provenance: Provenance,
}

impl Corpus {
    pub fn new(
        task: Task,
        pairs: Vec<ExamplePair>,
        provenance: Provenance,
    ) -> Result<Self, PairError> {
        let mut seen = alloc::collections::BTreeSet::new();
        for pair in &pairs {
            pair.validate()?;
            if pair.task != task {
                return Err(PairError::TaskMismatch {
                    pair_id: pair.pair_id.clone(),
                    task: pair.task,
                    corpus_task: task,
                });
            }
            if !seen.insert(pair.pair_id.as_str()) {
                return Err(PairError::DuplicatePairId {
                    pair_id: pair.pair_id.clone(),
                });
            }
        }
        Ok(Self {
            task,
            pairs,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}
