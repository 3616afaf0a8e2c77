//! Seeded train/test partitioning.
//!
//! A split shuffles the corpus with a Fisher-Yates pass over the portable
//! generator in [`crate::rng`] and takes the first `floor(train_fraction*n)`
//! permuted records as the training half. Equal seeds give byte-identical
//! splits on every platform. Stratified mode applies the same rule per
//! class and concatenates the halves in class order; per-class sizes use
//! largest-remainder rounding so the training half still has exactly
//! `floor(train_fraction*n)` records, and no class with two or more
//! members ever vanishes from the training half.

use crate::corpus::{LabeledCorpus, LabeledRecord};
use crate::mitre::{ClassCode, NUM_CLASSES};
use crate::rng::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("corpus has {0} records; need at least 2 to split")]
    CorpusTooSmall(usize),
    #[error("train_fraction {0} must lie strictly between 0 and 1")]
    InvalidTrainFraction(f64),
    #[error("degenerate split: {0}")]
    DegenerateSplit(String),
}

/// Split options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    /// Fraction of records routed to the training half, in (0, 1).
    pub train_fraction: f64,
    pub seed: u64,
    /// Split each class separately and concatenate in class order.
    pub stratified: bool,
}

impl SplitConfig {
    pub fn new(train_fraction: f64, seed: u64) -> SplitConfig {
        SplitConfig {
            train_fraction,
            seed,
            stratified: false,
        }
    }
}

/// The two halves of a split. Each half is an independent corpus,
/// 0-indexed from its own start.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub train: LabeledCorpus,
    pub test: LabeledCorpus,
}

/// Partition `corpus` into train and test halves.
///
/// The training half receives exactly `floor(train_fraction * n)` records
/// (the floor, never the rounding, so a 70% split of 614 records yields
/// 429/185); the test half receives the remainder.
pub fn train_test_split(
    corpus: &LabeledCorpus,
    config: &SplitConfig,
) -> Result<SplitResult, SplitError> {
    let n = corpus.len();
    if n < 2 {
        return Err(SplitError::CorpusTooSmall(n));
    }
    if !(config.train_fraction > 0.0 && config.train_fraction < 1.0) {
        return Err(SplitError::InvalidTrainFraction(config.train_fraction));
    }
    let train_size = (config.train_fraction * n as f64).floor() as usize;
    if train_size == 0 {
        return Err(SplitError::DegenerateSplit(format!(
            "train half would be empty ({} records at fraction {})",
            n, config.train_fraction
        )));
    }
    if train_size >= n {
        return Err(SplitError::DegenerateSplit(format!(
            "test half would be empty ({} records at fraction {})",
            n, config.train_fraction
        )));
    }

    let mut rng = Rng::from_seed(config.seed);
    let (train_records, test_records) = if config.stratified {
        stratified_partition(corpus, config.train_fraction, train_size, &mut rng)?
    } else {
        let mut indices: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut indices);
        let take = |range: &[usize]| -> Vec<LabeledRecord> {
            range
                .iter()
                .map(|&i| corpus.records()[i].clone())
                .collect()
        };
        (take(&indices[..train_size]), take(&indices[train_size..]))
    };

    // Halves of a valid corpus are valid; re-run the constructor checks anyway.
    let train = LabeledCorpus::new(train_records).expect("train half inherits corpus invariants");
    let test = LabeledCorpus::new(test_records).expect("test half inherits corpus invariants");
    debug_assert_eq!(train.len(), train_size);
    debug_assert_eq!(train.len() + test.len(), n);
    Ok(SplitResult { train, test })
}

/// Largest-remainder allocation of the global train size across classes,
/// with a floor of one training record for any class holding at least two.
fn stratified_targets(
    class_sizes: &[usize; NUM_CLASSES],
    train_fraction: f64,
    train_size: usize,
) -> Result<[usize; NUM_CLASSES], SplitError> {
    let mut targets = [0usize; NUM_CLASSES];
    let mut quota = [0f64; NUM_CLASSES];
    for c in 0..NUM_CLASSES {
        quota[c] = train_fraction * class_sizes[c] as f64;
        targets[c] = quota[c].floor() as usize;
        let min = usize::from(class_sizes[c] >= 2);
        targets[c] = targets[c].clamp(min, class_sizes[c]);
    }
    let mut total: usize = targets.iter().sum();
    while total < train_size {
        // Bump the most under-allocated class that still has records left.
        let candidate = (0..NUM_CLASSES)
            .filter(|&c| targets[c] < class_sizes[c])
            .max_by(|&a, &b| {
                let da = quota[a] - targets[a] as f64;
                let db = quota[b] - targets[b] as f64;
                da.partial_cmp(&db).unwrap().then(b.cmp(&a))
            });
        match candidate {
            Some(c) => targets[c] += 1,
            None => break,
        }
        total += 1;
    }
    while total > train_size {
        // Shrink the most over-allocated class that can spare a record.
        let candidate = (0..NUM_CLASSES)
            .filter(|&c| targets[c] > usize::from(class_sizes[c] >= 2))
            .min_by(|&a, &b| {
                let da = quota[a] - targets[a] as f64;
                let db = quota[b] - targets[b] as f64;
                da.partial_cmp(&db).unwrap().then(a.cmp(&b))
            });
        match candidate {
            Some(c) => targets[c] -= 1,
            None => {
                return Err(SplitError::DegenerateSplit(
                    "stratified allocation cannot reach the requested train size".into(),
                ))
            }
        }
        total -= 1;
    }
    if total != train_size {
        return Err(SplitError::DegenerateSplit(
            "stratified allocation cannot reach the requested train size".into(),
        ));
    }
    Ok(targets)
}

fn stratified_partition(
    corpus: &LabeledCorpus,
    train_fraction: f64,
    train_size: usize,
    rng: &mut Rng,
) -> Result<(Vec<LabeledRecord>, Vec<LabeledRecord>), SplitError> {
    let mut class_sizes = [0usize; NUM_CLASSES];
    for record in corpus.records() {
        class_sizes[record.label.index()] += 1;
    }
    let targets = stratified_targets(&class_sizes, train_fraction, train_size)?;

    let mut train = Vec::with_capacity(train_size);
    let mut test = Vec::with_capacity(corpus.len() - train_size);
    for class in ClassCode::ALL {
        let mut members: Vec<&LabeledRecord> = corpus
            .records()
            .iter()
            .filter(|r| r.label == class)
            .collect();
        rng.shuffle(&mut members);
        let target = targets[class.index()];
        for (i, record) in members.into_iter().enumerate() {
            if i < target {
                train.push(record.clone());
            } else {
                test.push(record.clone());
            }
        }
    }
    Ok((train, test))
}
