//! Wire records for corpora and splits.
//!
//! A pair record is one JSONL line:
//!
//! ```text
//! {"pair_id": "...", "task": "nli",
//!  "seed":   {"premise": "...", "hypothesis": "...", "label": "entailment"},
//!  "edited": {"premise": "...", "hypothesis": "...", "label": "contradiction"},
//!  "pos": {"seed": {"hypothesis": ["DET", ...]}, "edited": {...}},      # optional
//!  "perturbation_type": "lexical"}                                      # appended by classify
//! ```
//!
//! Split files use one example per line: the same field layout plus
//! `side: "seed" | "edited"`.

use std::collections::BTreeMap;

use cadkit_core::pair::{Example, ExamplePair, Label, Task};
use cadkit_core::pos::PosTag;
use cadkit_core::split::TrainExample;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error(transparent)]
    Pair(#[from] cadkit_core::pair::PairError),
}

/// One side of a pair on the wire: the label plus arbitrary text fields.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SideRecord {
    pub label: String,
    #[serde(flatten)]
    pub fields: BTreeMap<String, String>,
}

/// Optional gold POS annotations, per side and per field, aligned with the
/// tokenizer output.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct PosRecord {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub seed: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub edited: BTreeMap<String, Vec<String>>,
}

/// One counterfactual pair on the wire.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PairRecord {
    pub pair_id: String,
    pub task: String,
    pub seed: SideRecord,
    pub edited: SideRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<PosRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation_type: Option<String>,
}

impl PairRecord {
    /// Validates the record into a domain pair.
    pub fn to_pair(&self) -> Result<ExamplePair, RecordError> {
        let task = Task::parse(&self.task).ok_or_else(|| RecordError::UnknownTask(self.task.clone()))?;
        let mut seed = side_to_example(&self.seed)?;
        let mut edited = side_to_example(&self.edited)?;
        if let Some(pos) = &self.pos {
            seed.pos = parse_pos_map(&pos.seed);
            edited.pos = parse_pos_map(&pos.edited);
        }
        let pair = ExamplePair {
            pair_id: self.pair_id.clone(),
            task,
            seed,
            edited,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn from_pair(pair: &ExamplePair) -> Self {
        let pos = pos_record(pair);
        Self {
            pair_id: pair.pair_id.clone(),
            task: pair.task.as_str().to_string(),
            seed: example_to_side(&pair.seed),
            edited: example_to_side(&pair.edited),
            pos,
            perturbation_type: None,
        }
    }
}

fn side_to_example(side: &SideRecord) -> Result<Example, RecordError> {
    let label = Label::parse(&side.label).ok_or_else(|| RecordError::UnknownLabel(side.label.clone()))?;
    Ok(Example {
        fields: side.fields.clone(),
        label,
        pos: BTreeMap::new(),
    })
}

fn example_to_side(example: &Example) -> SideRecord {
    SideRecord {
        label: example.label.as_str().to_string(),
        fields: example.fields.clone(),
    }
}

fn parse_pos_map(raw: &BTreeMap<String, Vec<String>>) -> BTreeMap<String, Vec<PosTag>> {
    raw.iter()
        .map(|(field, tags)| {
            (
                field.clone(),
                tags.iter().map(|t| PosTag::parse(t)).collect(),
            )
        })
        .collect()
}

fn pos_record(pair: &ExamplePair) -> Option<PosRecord> {
    if pair.seed.pos.is_empty() && pair.edited.pos.is_empty() {
        return None;
    }
    let render = |side: &BTreeMap<String, Vec<PosTag>>| {
        side.iter()
            .map(|(field, tags)| {
                (
                    field.clone(),
                    tags.iter().map(|t| t.as_str().to_string()).collect(),
                )
            })
            .collect()
    };
    Some(PosRecord {
        seed: render(&pair.seed.pos),
        edited: render(&pair.edited.pos),
    })
}

/// One training example on the wire (a single side of a pair).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExampleRecord {
    pub pair_id: String,
    pub task: String,
    pub side: String,
    pub label: String,
    #[serde(flatten)]
    pub fields: BTreeMap<String, String>,
}

impl ExampleRecord {
    pub fn from_train(task: Task, train: &TrainExample) -> Self {
        Self {
            pair_id: train.pair_id.clone(),
            task: task.as_str().to_string(),
            side: train.side.as_str().to_string(),
            label: train.example.label.as_str().to_string(),
            fields: train.example.fields.clone(),
        }
    }
}
