//! Writes split outputs as a directory of JSONL files plus a manifest.

use std::fs;
use std::path::{Path, PathBuf};

use cadkit_core::pair::{ExamplePair, Task};
use cadkit_core::split::{Split, TrainExample};

use crate::record::{ExampleRecord, PairRecord};
use crate::report::ReportError;

fn write_lines<T: serde::Serialize>(path: &Path, rows: impl Iterator<Item = T>) -> Result<(), ReportError> {
    let mut out = String::new();
    for row in rows {
        out.push_str(&serde_json::to_string(&row)?);
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn ensure_dir(dir: &Path) -> Result<(), ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Io {
        path: dir.display().to_string(),
        source,
    })
}

/// Writes `train.jsonl` (one example per line) and one pair-complete
/// `test_<type>.jsonl` per requested test type. Returns the emitted file
/// names with their line counts for the manifest.
pub fn write_split(dir: &Path, task: Task, split: &Split) -> Result<Vec<(PathBuf, usize)>, ReportError> {
    ensure_dir(dir)?;
    let mut written = Vec::new();

    let train_path = dir.join("train.jsonl");
    write_lines(
        &train_path,
        split.train.iter().map(|t| ExampleRecord::from_train(task, t)),
    )?;
    written.push((train_path, split.train.len()));

    for (ty, pairs) in &split.tests {
        let path = dir.join(format!("test_{ty}.jsonl"));
        write_lines(&path, test_examples(task, pairs))?;
        written.push((path, pairs.len() * 2));
    }
    Ok(written)
}

/// Test sets are stored example-per-line like training data, seed then edit
/// per pair.
fn test_examples<'a>(
    task: Task,
    pairs: &'a [ExamplePair],
) -> impl Iterator<Item = ExampleRecord> + 'a {
    pairs.iter().flat_map(move |pair| {
        let seed = TrainExample {
            pair_id: pair.pair_id.clone(),
            side: cadkit_core::split::Side::Seed,
            example: pair.seed.clone(),
        };
        let edited = TrainExample {
            pair_id: pair.pair_id.clone(),
            side: cadkit_core::split::Side::Edited,
            example: pair.edited.clone(),
        };
        [
            ExampleRecord::from_train(task, &seed),
            ExampleRecord::from_train(task, &edited),
        ]
    })
}

/// Writes one `train_<k>.jsonl` per prefix of the type order.
pub fn write_series(
    dir: &Path,
    task: Task,
    series: &[Vec<TrainExample>],
) -> Result<Vec<(PathBuf, usize)>, ReportError> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    for (k, train) in series.iter().enumerate() {
        let path = dir.join(format!("train_{}.jsonl", k + 1));
        write_lines(&path, train.iter().map(|t| ExampleRecord::from_train(task, t)))?;
        written.push((path, train.len()));
    }
    Ok(written)
}

/// Writes a subsampled corpus as pair records.
pub fn write_subsample(
    dir: &Path,
    pairs: &[ExamplePair],
) -> Result<Vec<(PathBuf, usize)>, ReportError> {
    ensure_dir(dir)?;
    let path = dir.join("subsample.jsonl");
    write_lines(&path, pairs.iter().map(PairRecord::from_pair))?;
    Ok(vec![(path, pairs.len())])
}
