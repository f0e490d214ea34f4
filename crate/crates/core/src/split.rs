//! Reproducible train/test split construction over classified CAD corpora.
//!
//! All sampling is seeded and canonicalized on sorted pair ids, so outputs
//! are deterministic and independent of input file ordering. Sizes either
//! match the request exactly or the build fails; nothing is silently
//! truncated.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classify::PerturbationType;
use crate::pair::{Corpus, Example, ExamplePair};

#[derive(Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("need {needed} pairs of type {required} but only {available} are available")]
    InsufficientPairs {
        required: String,
        needed: usize,
        available: usize,
    },
    #[error("pair `{pair_id}` has no perturbation-type label")]
    MissingType { pair_id: String },
    #[error("mixed mode needs pool >= 2 * replace ({pool} < 2 * {replace})")]
    PoolTooSmall { pool: usize, replace: usize },
    #[error("train size {total} must be even (every pair contributes a seed and an edit)")]
    OddTotal { total: usize },
    #[error("type order must not be empty")]
    EmptyOrder,
    #[error("cannot subsample {requested} pairs from a corpus of {available}")]
    SubsampleTooLarge { requested: usize, available: usize },
    #[error("train_pairs must be >= 1")]
    ZeroTrainPairs,
}

/// How the training set is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMode {
    /// Seed examples of the chosen pairs plus their perturbations.
    Cad,
    /// A seed-only baseline of the same size, drawn from the whole corpus.
    SeedOnly,
    /// A pool of `pool` seed examples with `replace` of them swapped for
    /// perturbations whose generating seeds stay in the pool.
    Mixed { pool: usize, replace: usize },
}

impl BaselineMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            BaselineMode::Cad => "cad",
            BaselineMode::SeedOnly => "seed_only",
            BaselineMode::Mixed { .. } => "mixed",
        }
    }
}

/// A split request: train on one perturbation type, test per type.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub train_type: PerturbationType,
    pub train_pairs: usize,
    pub test_types: Vec<PerturbationType>,
    pub seed: u64,
    pub baseline_mode: BaselineMode,
}

/// Which side of a pair a training example came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Seed,
    Edited,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Seed => "seed",
            Side::Edited => "edited",
        }
    }
}

/// One training example with its origin recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainExample {
    pub pair_id: String,
    pub side: Side,
    pub example: Example,
}

/// A built split: the train set and one pair-complete test set per type,
/// disjoint from the training pairs by pair id.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Vec<TrainExample>,
    pub tests: BTreeMap<PerturbationType, Vec<ExamplePair>>,
}

impl Split {
    /// Pair ids contributing at least one training example.
    pub fn train_pair_ids(&self) -> BTreeSet<&str> {
        self.train.iter().map(|t| t.pair_id.as_str()).collect()
    }
}

/// Pairs sorted by id: the canonical order all sampling starts from.
fn sorted_pairs(corpus: &Corpus) -> Vec<&ExamplePair> {
    let mut pairs: Vec<&ExamplePair> = corpus.pairs.iter().collect();
    pairs.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
    pairs
}

fn type_of(
    types: &BTreeMap<String, PerturbationType>,
    pair: &ExamplePair,
) -> Result<PerturbationType, SplitError> {
    types
        .get(&pair.pair_id)
        .copied()
        .ok_or_else(|| SplitError::MissingType {
            pair_id: pair.pair_id.clone(),
        })
}

fn take_of_type<'a>(
    pool: &mut Vec<&'a ExamplePair>,
    rng: &mut ChaCha8Rng,
    count: usize,
    required: PerturbationType,
) -> Result<Vec<&'a ExamplePair>, SplitError> {
    if pool.len() < count {
        return Err(SplitError::InsufficientPairs {
            required: required.to_string(),
            needed: count,
            available: pool.len(),
        });
    }
    pool.shuffle(rng);
    Ok(pool.drain(..count).collect())
}

fn seed_example(pair: &ExamplePair) -> TrainExample {
    TrainExample {
        pair_id: pair.pair_id.clone(),
        side: Side::Seed,
        example: pair.seed.clone(),
    }
}

fn edited_example(pair: &ExamplePair) -> TrainExample {
    TrainExample {
        pair_id: pair.pair_id.clone(),
        side: Side::Edited,
        example: pair.edited.clone(),
    }
}

/// Builds the train set plus per-type test sets described by `spec`.
///
/// Test sets contain every remaining pair of the requested type, seed and
/// edit together, never overlapping the training pairs.
pub fn build_split(
    corpus: &Corpus,
    types: &BTreeMap<String, PerturbationType>,
    spec: &SplitSpec,
) -> Result<Split, SplitError> {
    if spec.train_pairs == 0 {
        return Err(SplitError::ZeroTrainPairs);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let all = sorted_pairs(corpus);
    let mut of_type: Vec<&ExamplePair> = Vec::new();
    for pair in &all {
        if type_of(types, pair)? == spec.train_type {
            of_type.push(pair);
        }
    }

    let train = match spec.baseline_mode {
        BaselineMode::Cad => {
            let chosen = take_of_type(&mut of_type, &mut rng, spec.train_pairs, spec.train_type)?;
            let mut train = Vec::with_capacity(chosen.len() * 2);
            for pair in chosen {
                train.push(seed_example(pair));
                train.push(edited_example(pair));
            }
            train
        }
        BaselineMode::SeedOnly => {
            // Same size as the CAD set, but drawn from seed examples of the
            // whole corpus.
            let needed = spec.train_pairs * 2;
            let mut pool = all.clone();
            if pool.len() < needed {
                return Err(SplitError::InsufficientPairs {
                    required: "any".to_string(),
                    needed,
                    available: pool.len(),
                });
            }
            pool.shuffle(&mut rng);
            pool[..needed].iter().map(|p| seed_example(p)).collect()
        }
        BaselineMode::Mixed { pool, replace } => {
            if pool < replace * 2 {
                return Err(SplitError::PoolTooSmall { pool, replace });
            }
            // Generators: pairs whose edits enter the pool; their seeds stay.
            let generators = take_of_type(&mut of_type, &mut rng, replace, spec.train_type)?;
            let generator_ids: BTreeSet<&str> =
                generators.iter().map(|p| p.pair_id.as_str()).collect();
            let mut others: Vec<&ExamplePair> = all
                .iter()
                .copied()
                .filter(|p| !generator_ids.contains(p.pair_id.as_str()))
                .collect();
            let fill = pool - replace;
            if others.len() < fill {
                return Err(SplitError::InsufficientPairs {
                    required: "any".to_string(),
                    needed: fill,
                    available: others.len(),
                });
            }
            others.shuffle(&mut rng);
            // `replace` of the filler seeds are the ones swapped out for CAD.
            let kept = fill - replace;
            let mut train: Vec<TrainExample> = Vec::with_capacity(pool);
            train.extend(generators.iter().map(|p| seed_example(p)));
            train.extend(others[..kept].iter().map(|p| seed_example(p)));
            train.extend(generators.iter().map(|p| edited_example(p)));
            train.shuffle(&mut rng);
            train
        }
    };

    let used: BTreeSet<&str> = train.iter().map(|t| t.pair_id.as_str()).collect();
    let mut tests = BTreeMap::new();
    for &test_type in &spec.test_types {
        let pairs: Vec<ExamplePair> = all
            .iter()
            .filter(|p| !used.contains(p.pair_id.as_str()))
            .filter(|p| types.get(&p.pair_id) == Some(&test_type))
            .map(|&p| p.clone())
            .collect();
        tests.insert(test_type, pairs);
    }
    Ok(Split { train, tests })
}

/// Training sets of fixed total size over a growing prefix of perturbation
/// types: the k-th set draws evenly from the first k types in `order`,
/// splitting any remainder one pair at a time across the earliest types.
pub fn incremental_type_series(
    corpus: &Corpus,
    types: &BTreeMap<String, PerturbationType>,
    order: &[PerturbationType],
    total: usize,
    seed: u64,
) -> Result<Vec<Vec<TrainExample>>, SplitError> {
    if order.is_empty() {
        return Err(SplitError::EmptyOrder);
    }
    if !total.is_multiple_of(2) {
        return Err(SplitError::OddTotal { total });
    }
    let total_pairs = total / 2;
    let all = sorted_pairs(corpus);
    let mut by_type: BTreeMap<PerturbationType, Vec<&ExamplePair>> = BTreeMap::new();
    for pair in &all {
        by_type.entry(type_of(types, pair)?).or_default().push(pair);
    }

    let mut series = Vec::with_capacity(order.len());
    for k in 1..=order.len() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let base = total_pairs / k;
        let remainder = total_pairs % k;
        let mut train = Vec::with_capacity(total);
        for (i, &ty) in order[..k].iter().enumerate() {
            let want = base + usize::from(i < remainder);
            let mut pool = by_type.get(&ty).cloned().unwrap_or_default();
            let chosen = take_of_type(&mut pool, &mut rng, want, ty)?;
            for pair in chosen {
                train.push(seed_example(pair));
                train.push(edited_example(pair));
            }
        }
        series.push(train);
    }
    Ok(series)
}

/// A uniform, pair-complete subsample of `n_pairs` pairs, emitted in
/// canonical pair-id order.
pub fn subsample(corpus: &Corpus, n_pairs: usize, seed: u64) -> Result<Corpus, SplitError> {
    let mut pairs = sorted_pairs(corpus);
    if n_pairs > pairs.len() {
        return Err(SplitError::SubsampleTooLarge {
            requested: n_pairs,
            available: pairs.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pairs.shuffle(&mut rng);
    let mut chosen: Vec<ExamplePair> = pairs[..n_pairs].iter().map(|&p| p.clone()).collect();
    chosen.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
    Ok(Corpus {
        task: corpus.task,
        pairs: chosen,
        provenance: corpus.provenance.clone(),
    })
}
