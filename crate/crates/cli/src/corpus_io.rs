//! Corpus loading with per-line error collection.
//!
//! Bad lines are reported with their line numbers and dropped. Loading
//! aborts when more than 10% of the lines are structurally malformed
//! (unparseable JSON, wrong TSV column counts) or when no valid pair
//! remains; semantic validation failures (unknown labels, orphan rows,
//! duplicates) are reported without aborting. Input files are hashed
//! (SHA-256) into the corpus provenance for run manifests.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use cadkit_core::pair::{Corpus, ExamplePair, Provenance, Task};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::record::PairRecord;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: no valid pairs found")]
    Empty { path: String },
    #[error("{path}: {malformed} of {total} lines are malformed (more than 10%); first error: {first}")]
    TooManyMalformed {
        path: String,
        malformed: usize,
        total: usize,
        first: String,
    },
}

/// A dropped input line and why.
#[derive(Debug, Clone, PartialEq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// A loaded corpus plus the lines that did not make it in.
#[derive(Debug)]
pub struct LoadOutcome {
    pub corpus: Corpus,
    pub errors: Vec<LineError>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path) -> Result<(String, String), LoadError> {
    let bytes = fs::read(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let hash = sha256_hex(&bytes);
    let text = String::from_utf8_lossy(&bytes).into_owned();
    Ok((text, hash))
}

fn finish(
    path: &Path,
    pairs: Vec<ExamplePair>,
    mut errors: Vec<LineError>,
    structural: usize,
    total: usize,
    hash: String,
) -> Result<LoadOutcome, LoadError> {
    errors.sort_by_key(|e| e.line);
    let display = path.display().to_string();
    if structural * 10 > total {
        return Err(LoadError::TooManyMalformed {
            path: display,
            malformed: structural,
            total,
            first: errors
                .first()
                .map(ToString::to_string)
                .unwrap_or_default(),
        });
    }
    if pairs.is_empty() {
        return Err(LoadError::Empty { path: display });
    }
    let task = pairs[0].task;
    let corpus = Corpus::new(
        task,
        pairs,
        Provenance {
            source: display,
            file_hash: hash,
        },
    )
    .expect("pairs were validated line by line");
    Ok(LoadOutcome { corpus, errors })
}

/// Loads a JSONL corpus: one pair record per line, blank lines ignored.
pub fn load_jsonl(path: &Path) -> Result<LoadOutcome, LoadError> {
    let (text, hash) = read(path)?;
    let mut pairs: Vec<ExamplePair> = Vec::new();
    let mut seen_ids = BTreeSet::new();
    let mut errors = Vec::new();
    let mut structural = 0;
    let mut total = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        total += 1;
        let mut push_err = |message: String| errors.push(LineError { line: line_no, message });
        match serde_json::from_str::<PairRecord>(line) {
            Ok(record) => match record.to_pair() {
                Ok(pair) => {
                    if !seen_ids.insert(pair.pair_id.clone()) {
                        push_err(format!("duplicate pair id `{}`", pair.pair_id));
                    } else if let Some(first) = pairs.first() {
                        if pair.task != first.task {
                            push_err(format!(
                                "task {} does not match corpus task {}",
                                pair.task, first.task
                            ));
                        } else {
                            pairs.push(pair);
                        }
                    } else {
                        pairs.push(pair);
                    }
                }
                Err(err) => push_err(err.to_string()),
            },
            Err(err) => {
                // unparseable lines count toward the 10% abort; semantic
                // validation failures above are reported but never abort
                structural += 1;
                push_err(err.to_string());
            }
        }
    }
    finish(path, pairs, errors, structural, total, hash)
}

/// Loads the two-file TSV mode: a seed file and an edited file joined on
/// `pair_id`. Each TSV carries a header of `pair_id`, `label`, and one
/// column per text field; orphan rows on either side are reported and
/// dropped. Line numbers in the error report are local to the named file.
pub fn load_tsv_pair(
    seed_path: &Path,
    edited_path: &Path,
    task: Task,
) -> Result<LoadOutcome, LoadError> {
    let (seed_text, seed_hash) = read(seed_path)?;
    let (edited_text, edited_hash) = read(edited_path)?;

    let mut errors = Vec::new();
    let mut structural = 0;
    let mut total = 0;
    let seed_rows = parse_tsv(&seed_text, "seed file", &mut errors, &mut structural, &mut total);
    let edited_rows = parse_tsv(&edited_text, "edited file", &mut errors, &mut structural, &mut total);

    let mut pairs = Vec::new();
    let mut seen_ids = BTreeSet::new();
    for (line, id, seed_side) in &seed_rows {
        match edited_rows.iter().find(|(_, eid, _)| eid == id) {
            Some((_, _, edited_side)) => {
                let record = PairRecord {
                    pair_id: id.clone(),
                    task: task.as_str().to_string(),
                    seed: seed_side.clone(),
                    edited: edited_side.clone(),
                    pos: None,
                    perturbation_type: None,
                };
                let outcome = record
                    .to_pair()
                    .map_err(|e| e.to_string())
                    .and_then(|pair| {
                        if seen_ids.insert(pair.pair_id.clone()) {
                            Ok(pair)
                        } else {
                            Err(format!("duplicate pair id `{id}`"))
                        }
                    });
                match outcome {
                    Ok(pair) => pairs.push(pair),
                    Err(message) => errors.push(LineError {
                        line: *line,
                        message: format!("seed file: {message}"),
                    }),
                }
            }
            None => errors.push(LineError {
                line: *line,
                message: format!("seed file: orphan row, no edited row with pair id `{id}`"),
            }),
        }
    }
    for (line, id, _) in &edited_rows {
        if !seed_rows.iter().any(|(_, sid, _)| sid == id) {
            errors.push(LineError {
                line: *line,
                message: format!("edited file: orphan row, no seed row with pair id `{id}`"),
            });
        }
    }

    let combined_hash = format!("{seed_hash},{edited_hash}");
    finish(seed_path, pairs, errors, structural, total, combined_hash)
}

type TsvRow = (usize, String, crate::record::SideRecord);

fn parse_tsv(
    text: &str,
    file_label: &str,
    errors: &mut Vec<LineError>,
    structural: &mut usize,
    total: &mut usize,
) -> Vec<TsvRow> {
    let mut lines = text.lines().enumerate();
    let header: Vec<String> = match lines.next() {
        Some((_, line)) => line.split('\t').map(|h| h.trim().to_string()).collect(),
        None => return Vec::new(),
    };
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        *total += 1;
        let values: Vec<&str> = line.split('\t').collect();
        if values.len() != header.len() {
            *structural += 1;
            errors.push(LineError {
                line: line_no,
                message: format!(
                    "{file_label}: expected {} tab-separated columns, found {}",
                    header.len(),
                    values.len()
                ),
            });
            continue;
        }
        let mut pair_id = None;
        let mut label = None;
        let mut fields = std::collections::BTreeMap::new();
        for (name, value) in header.iter().zip(values) {
            match name.as_str() {
                "pair_id" => pair_id = Some(value.to_string()),
                "label" => label = Some(value.to_string()),
                _ => {
                    fields.insert(name.clone(), value.to_string());
                }
            }
        }
        match (pair_id, label) {
            (Some(id), Some(label)) => rows.push((
                line_no,
                id,
                crate::record::SideRecord { label, fields },
            )),
            _ => {
                *structural += 1;
                errors.push(LineError {
                    line: line_no,
                    message: format!("{file_label}: missing pair_id or label column"),
                });
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file
    }

    fn pair_line(id: &str, seed_hyp: &str, edited_hyp: &str) -> String {
        format!(
            r#"{{"pair_id":"{id}","task":"nli","seed":{{"label":"entailment","premise":"A dog runs.","hypothesis":"{seed_hyp}"}},"edited":{{"label":"contradiction","premise":"A dog runs.","hypothesis":"{edited_hyp}"}}}}"#
        )
    }

    #[test]
    fn loads_a_small_jsonl_fixture() {
        let content: Vec<String> = (0..6)
            .map(|i| pair_line(&format!("p{i}"), "An animal runs.", "No animal runs."))
            .collect();
        let file = write_temp(&content.join("\n"));
        let outcome = load_jsonl(file.path()).unwrap();
        assert_eq!(outcome.corpus.len(), 6);
        assert!(outcome.errors.is_empty());
        assert_eq!(outcome.corpus.provenance.file_hash.len(), 64);
    }

    #[test]
    fn bad_label_is_reported_with_its_line_number() {
        let mut lines: Vec<String> = (0..5)
            .map(|i| pair_line(&format!("p{i}"), "a runs.", "b runs."))
            .collect();
        lines.insert(
            2,
            pair_line("bad", "a runs.", "b runs.").replace("contradiction", "sideways"),
        );
        let file = write_temp(&lines.join("\n"));
        let outcome = load_jsonl(file.path()).unwrap();
        assert_eq!(outcome.corpus.len(), 5);
        assert_eq!(outcome.errors.len(), 1);
        assert_eq!(outcome.errors[0].line, 3);
        assert!(outcome.errors[0].message.contains("sideways"));
    }

    #[test]
    fn mostly_malformed_input_aborts_with_a_summary() {
        let lines = [pair_line("p0", "a runs.", "b runs."),
            "not json".to_string(),
            "also not json".to_string()];
        let file = write_temp(&lines.join("\n"));
        assert!(matches!(
            load_jsonl(file.path()),
            Err(LoadError::TooManyMalformed { malformed: 2, total: 3, .. })
        ));
    }

    #[test]
    fn empty_file_is_an_error() {
        let file = write_temp("");
        assert!(matches!(load_jsonl(file.path()), Err(LoadError::Empty { .. })));
    }

    #[test]
    fn tsv_pair_mode_joins_on_pair_id_and_reports_orphans() {
        let seed = write_temp(
            "pair_id\tlabel\tpremise\thypothesis\n\
             p1\tentailment\tA dog runs.\tAn animal runs.\n\
             p2\tentailment\tA cat sits.\tAn animal sits.\n\
             p3\tneutral\tA bird flies.\tIt is sunny.\n",
        );
        let edited = write_temp(
            "pair_id\tlabel\tpremise\thypothesis\n\
             p1\tcontradiction\tA dog runs.\tNo animal runs.\n\
             p2\tcontradiction\tA cat sits.\tNo animal sits.\n\
             p9\tcontradiction\tX.\tY.\n",
        );
        let outcome = load_tsv_pair(seed.path(), edited.path(), Task::Nli).unwrap();
        assert_eq!(outcome.corpus.len(), 2);
        assert_eq!(outcome.errors.len(), 2);
        assert!(outcome.errors.iter().any(|e| e.message.contains("p3")));
        assert!(outcome.errors.iter().any(|e| e.message.contains("p9")));
    }
}
