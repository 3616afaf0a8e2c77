//! Split-ratio sweep: fractions x algorithms x seeded trials.
//!
//! Trial `t` of fraction `f` splits with seed `derive_seed(base, [f_bits,
//! t])` and fits each algorithm with seed `derive_seed(base, [f_bits, t,
//! algo_word])`, so any cell is reproducible in isolation and execution
//! order cannot matter. The vocabulary refits on the training half of
//! every trial; the test half never touches it.
//!
//! Results keep every raw trial report plus mean and (population) standard
//! deviation per metric, and name a winner: the highest mean accuracy,
//! ties going to the lower fraction and then to algorithm list order.

mod render;

pub use render::{render_chart_svg, render_table_csv, render_table_text, write_outputs, OutputFormat};

use crate::classifiers::{fit, Algorithm, AlgorithmParams, ClassifierSpec, TrainError};
use crate::classifiers::{ForestConfig, MlpConfig, NaiveBayesConfig, SvmConfig};
use crate::corpus::LabeledCorpus;
use crate::metrics::{evaluate, EvalReport, MetricsError};
use crate::mitre::ClassCode;
use crate::rng::derive_seed;
use crate::split::{train_test_split, SplitConfig, SplitError};
use crate::text::{TextError, VectorizerConfig, Vocabulary};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep config: {0}")]
    InvalidConfig(String),
    #[error("fraction {fraction}, trial {trial}: {source}")]
    Split {
        fraction: f64,
        trial: u32,
        source: SplitError,
    },
    #[error("fraction {fraction}, trial {trial}: {source}")]
    Vocabulary {
        fraction: f64,
        trial: u32,
        source: TextError,
    },
    #[error("fraction {fraction}, trial {trial}, {algorithm}: {source}")]
    Fit {
        fraction: f64,
        trial: u32,
        algorithm: Algorithm,
        source: TrainError,
    },
    #[error("fraction {fraction}, trial {trial}, {algorithm}: {source}")]
    Eval {
        fraction: f64,
        trial: u32,
        algorithm: Algorithm,
        source: MetricsError,
    },
}

/// Per-algorithm hyperparameters used across the sweep.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepHyperparameters {
    pub naive_bayes: NaiveBayesConfig,
    pub svm: SvmConfig,
    pub random_forest: ForestConfig,
    pub neural_network: MlpConfig,
}

impl SweepHyperparameters {
    fn params_for(&self, algorithm: Algorithm) -> AlgorithmParams {
        match algorithm {
            Algorithm::NaiveBayes => AlgorithmParams::NaiveBayes(self.naive_bayes),
            Algorithm::Svm => AlgorithmParams::Svm(self.svm),
            Algorithm::RandomForest => AlgorithmParams::RandomForest(self.random_forest),
            Algorithm::NeuralNetwork => AlgorithmParams::NeuralNetwork(self.neural_network),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub train_fractions: Vec<f64>,
    /// Algorithms to run; the order is also the tie-break order.
    pub algorithms: Vec<Algorithm>,
    pub trials: u32,
    pub base_seed: u64,
    pub vectorizer: VectorizerConfig,
    pub stratified: bool,
    pub hyperparameters: SweepHyperparameters,
}

impl SweepConfig {
    pub fn new(base_seed: u64) -> SweepConfig {
        SweepConfig {
            train_fractions: vec![0.6, 0.7, 0.8],
            algorithms: Algorithm::TABLE_ORDER.to_vec(),
            trials: 10,
            base_seed,
            vectorizer: VectorizerConfig::default(),
            stratified: false,
            hyperparameters: SweepHyperparameters::default(),
        }
    }

    fn validate(&self) -> Result<(), SweepError> {
        if self.train_fractions.is_empty() {
            return Err(SweepError::InvalidConfig("no train fractions".into()));
        }
        for &f in &self.train_fractions {
            if !(f > 0.0 && f < 1.0) {
                return Err(SweepError::InvalidConfig(format!(
                    "train fraction {f} must lie strictly between 0 and 1"
                )));
            }
        }
        if self.algorithms.is_empty() {
            return Err(SweepError::InvalidConfig("no algorithms".into()));
        }
        if self.trials == 0 {
            return Err(SweepError::InvalidConfig("trials must be >= 1".into()));
        }
        Ok(())
    }

    /// Seed for the split of trial `trial` at `fraction`.
    pub fn split_seed(&self, fraction: f64, trial: u32) -> u64 {
        derive_seed(self.base_seed, &[fraction.to_bits(), trial as u64])
    }

    /// Seed for fitting `algorithm` in trial `trial` at `fraction`.
    pub fn model_seed(&self, fraction: f64, trial: u32, algorithm: Algorithm) -> u64 {
        derive_seed(
            self.base_seed,
            &[fraction.to_bits(), trial as u64, algorithm.seed_word()],
        )
    }
}

/// Mean and population standard deviation over trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    fn of(values: &[f64]) -> MeanStd {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        MeanStd {
            mean,
            std: var.sqrt(),
        }
    }
}

/// Aggregates per metric for one (fraction, algorithm) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellMetrics {
    pub accuracy: MeanStd,
    pub micro_precision: MeanStd,
    pub micro_recall: MeanStd,
    pub micro_f1: MeanStd,
    pub macro_precision: MeanStd,
    pub macro_recall: MeanStd,
    pub macro_f1: MeanStd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub train_fraction: f64,
    pub algorithm: Algorithm,
    pub metrics: CellMetrics,
    /// Raw per-trial reports, in trial order.
    pub trials: Vec<EvalReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Winner {
    pub train_fraction: f64,
    pub algorithm: Algorithm,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    /// Cells ordered by (fraction position, algorithm position).
    pub cells: Vec<SweepCell>,
    pub winner: Winner,
}

impl SweepResult {
    pub fn cell(&self, fraction: f64, algorithm: Algorithm) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.train_fraction == fraction && c.algorithm == algorithm)
    }
}

/// One trial: a split, the vocabulary fitted on its training half, and a
/// report per algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRun {
    pub vocabulary: Vocabulary,
    pub reports: Vec<(Algorithm, EvalReport)>,
}

/// Run a single (fraction, trial) cell of the sweep. `run_sweep` is the
/// aggregation of these over the whole grid.
pub fn run_trial(
    corpus: &LabeledCorpus,
    config: &SweepConfig,
    fraction: f64,
    trial: u32,
) -> Result<TrialRun, SweepError> {
    let split_config = SplitConfig {
        train_fraction: fraction,
        seed: config.split_seed(fraction, trial),
        stratified: config.stratified,
    };
    let halves = train_test_split(corpus, &split_config).map_err(|source| SweepError::Split {
        fraction,
        trial,
        source,
    })?;

    // Vocabulary from the training half only: test-set document
    // frequencies must not leak into the features.
    let train_docs: Vec<Vec<String>> = halves
        .train
        .texts()
        .map(|t| config.vectorizer.tokenize(t))
        .collect();
    let vocabulary = Vocabulary::fit(&train_docs, config.vectorizer).map_err(|source| {
        SweepError::Vocabulary {
            fraction,
            trial,
            source,
        }
    })?;

    let gold: Vec<ClassCode> = halves.test.labels().collect();
    let mut reports = Vec::with_capacity(config.algorithms.len());
    for &algorithm in &config.algorithms {
        let spec = ClassifierSpec {
            params: config.hyperparameters.params_for(algorithm),
            seed: config.model_seed(fraction, trial, algorithm),
        };
        let model = fit(&spec, &halves.train, &vocabulary).map_err(|source| SweepError::Fit {
            fraction,
            trial,
            algorithm,
            source,
        })?;
        let predictions: Vec<ClassCode> =
            halves.test.texts().map(|t| model.predict(t)).collect();
        let report = evaluate(&gold, &predictions).map_err(|source| SweepError::Eval {
            fraction,
            trial,
            algorithm,
            source,
        })?;
        reports.push((algorithm, report));
    }
    Ok(TrialRun {
        vocabulary,
        reports,
    })
}

/// Run the full sweep. Deterministic end-to-end for a given config; trials
/// may execute in parallel because every seed is position-derived.
pub fn run_sweep(corpus: &LabeledCorpus, config: &SweepConfig) -> Result<SweepResult, SweepError> {
    config.validate()?;

    let grid: Vec<(usize, u32)> = (0..config.train_fractions.len())
        .flat_map(|fi| (0..config.trials).map(move |t| (fi, t)))
        .collect();
    let trial_runs: Vec<Result<TrialRun, SweepError>> = grid
        .par_iter()
        .map(|&(fi, trial)| {
            let fraction = config.train_fractions[fi];
            log::info!("sweep: fraction {fraction}, trial {trial}");
            run_trial(corpus, config, fraction, trial)
        })
        .collect();

    let mut runs_by_fraction: Vec<Vec<TrialRun>> =
        (0..config.train_fractions.len()).map(|_| Vec::new()).collect();
    for ((fi, _), run) in grid.into_iter().zip(trial_runs) {
        runs_by_fraction[fi].push(run?);
    }

    let mut cells = Vec::with_capacity(config.train_fractions.len() * config.algorithms.len());
    for (fi, runs) in runs_by_fraction.iter().enumerate() {
        let fraction = config.train_fractions[fi];
        for (ai, &algorithm) in config.algorithms.iter().enumerate() {
            let trials: Vec<EvalReport> =
                runs.iter().map(|run| run.reports[ai].1.clone()).collect();
            let collect = |f: fn(&EvalReport) -> f64| -> Vec<f64> {
                trials.iter().map(f).collect()
            };
            let metrics = CellMetrics {
                accuracy: MeanStd::of(&collect(|r| r.accuracy)),
                micro_precision: MeanStd::of(&collect(|r| r.micro.p)),
                micro_recall: MeanStd::of(&collect(|r| r.micro.r)),
                micro_f1: MeanStd::of(&collect(|r| r.micro.f1)),
                macro_precision: MeanStd::of(&collect(|r| r.macro_avg.p)),
                macro_recall: MeanStd::of(&collect(|r| r.macro_avg.r)),
                macro_f1: MeanStd::of(&collect(|r| r.macro_avg.f1)),
            };
            cells.push(SweepCell {
                train_fraction: fraction,
                algorithm,
                metrics,
                trials,
            });
        }
    }

    let winner = pick_winner(&cells, config);
    Ok(SweepResult {
        config: config.clone(),
        cells,
        winner,
    })
}

/// Highest mean accuracy; ties break to the lower fraction, then to the
/// algorithm listed first in the config.
fn pick_winner(cells: &[SweepCell], config: &SweepConfig) -> Winner {
    let position = |cell: &SweepCell| -> usize {
        config
            .algorithms
            .iter()
            .position(|&a| a == cell.algorithm)
            .expect("cell algorithm comes from config")
    };
    let mut best = &cells[0];
    for cell in &cells[1..] {
        let better = cell.metrics.accuracy.mean > best.metrics.accuracy.mean
            || (cell.metrics.accuracy.mean == best.metrics.accuracy.mean
                && (cell.train_fraction < best.train_fraction
                    || (cell.train_fraction == best.train_fraction
                        && position(cell) < position(best))));
        if better {
            best = cell;
        }
    }
    Winner {
        train_fraction: best.train_fraction,
        algorithm: best.algorithm,
        mean_accuracy: best.metrics.accuracy.mean,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::LabeledRecord;
    use crate::synthetic::keyword_corpus;

    fn small_config(seed: u64) -> SweepConfig {
        SweepConfig {
            trials: 2,
            hyperparameters: SweepHyperparameters {
                random_forest: ForestConfig {
                    trees: 10,
                    max_depth: None,
                },
                neural_network: MlpConfig {
                    hidden: 16,
                    epochs: 60,
                    ..Default::default()
                },
                ..Default::default()
            },
            ..SweepConfig::new(seed)
        }
    }

    #[test]
    fn sweep_produces_one_cell_per_fraction_algorithm_pair() {
        let corpus = keyword_corpus(60, 5);
        let mut config = small_config(42);
        config.trials = 1;
        let result = run_sweep(&corpus, &config).unwrap();
        assert_eq!(result.cells.len(), 12);
        for cell in &result.cells {
            assert_eq!(cell.trials.len(), 1);
            // Single trial: mean is that trial's value, std is zero.
            assert_eq!(cell.metrics.accuracy.mean, cell.trials[0].accuracy);
            assert_eq!(cell.metrics.accuracy.std, 0.0);
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let corpus = keyword_corpus(50, 9);
        let config = small_config(7);
        let a = run_sweep(&corpus, &config).unwrap();
        let b = run_sweep(&corpus, &config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn cells_match_standalone_trials() {
        let corpus = keyword_corpus(50, 11);
        let config = small_config(3);
        let result = run_sweep(&corpus, &config).unwrap();
        for (fi, &fraction) in config.train_fractions.iter().enumerate() {
            for trial in 0..config.trials {
                let run = run_trial(&corpus, &config, fraction, trial).unwrap();
                for (ai, &algorithm) in config.algorithms.iter().enumerate() {
                    let cell = &result.cells[fi * config.algorithms.len() + ai];
                    assert_eq!(cell.algorithm, algorithm);
                    assert_eq!(cell.trials[trial as usize], run.reports[ai].1);
                }
            }
        }
    }

    #[test]
    fn vocabulary_depends_only_on_the_training_half() {
        let corpus = keyword_corpus(40, 2);
        let config = small_config(21);
        let fraction = 0.7;
        let trial = 0;
        let baseline = run_trial(&corpus, &config, fraction, trial).unwrap();

        // Re-run with every test-half text replaced by garbage. The split
        // is positional (same seed, same ids), so the training half is
        // untouched and the vocabulary must come out identical.
        let split_config = SplitConfig {
            train_fraction: fraction,
            seed: config.split_seed(fraction, trial),
            stratified: config.stratified,
        };
        let halves = train_test_split(&corpus, &split_config).unwrap();
        let test_ids: std::collections::HashSet<String> = halves
            .test
            .records()
            .iter()
            .map(|r| r.requirement.id.clone())
            .collect();
        let mangled = LabeledCorpus::new(
            corpus
                .records()
                .iter()
                .map(|r| {
                    let text = if test_ids.contains(&r.requirement.id) {
                        "zzz qqq xxx".to_string()
                    } else {
                        r.requirement.text.clone()
                    };
                    LabeledRecord::new(r.requirement.id.clone(), text, r.label)
                })
                .collect(),
        )
        .unwrap();
        let mangled_run = run_trial(&mangled, &config, fraction, trial).unwrap();
        assert_eq!(baseline.vocabulary, mangled_run.vocabulary);
    }

    #[test]
    fn winner_tie_breaks_to_lower_fraction_then_list_order() {
        let mk = |fraction: f64, algorithm: Algorithm, mean: f64| SweepCell {
            train_fraction: fraction,
            algorithm,
            metrics: CellMetrics {
                accuracy: MeanStd { mean, std: 0.0 },
                micro_precision: MeanStd { mean, std: 0.0 },
                micro_recall: MeanStd { mean, std: 0.0 },
                micro_f1: MeanStd { mean, std: 0.0 },
                macro_precision: MeanStd { mean, std: 0.0 },
                macro_recall: MeanStd { mean, std: 0.0 },
                macro_f1: MeanStd { mean, std: 0.0 },
            },
            trials: vec![],
        };
        let config = SweepConfig::new(0);
        let cells = vec![
            mk(0.8, Algorithm::Svm, 0.9),
            mk(0.6, Algorithm::NaiveBayes, 0.9),
            mk(0.6, Algorithm::RandomForest, 0.9),
            mk(0.7, Algorithm::NeuralNetwork, 0.5),
        ];
        let winner = pick_winner(&cells, &config);
        assert_eq!(winner.train_fraction, 0.6);
        // Table order lists RandomForest before NaiveBayes.
        assert_eq!(winner.algorithm, Algorithm::RandomForest);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let corpus = keyword_corpus(20, 1);
        let mut config = SweepConfig::new(0);
        config.trials = 0;
        assert!(matches!(
            run_sweep(&corpus, &config),
            Err(SweepError::InvalidConfig(_))
        ));
        let mut config = SweepConfig::new(0);
        config.train_fractions = vec![1.5];
        assert!(matches!(
            run_sweep(&corpus, &config),
            Err(SweepError::InvalidConfig(_))
        ));
    }

    #[test]
    fn split_errors_carry_fraction_and_trial() {
        let corpus = keyword_corpus(3, 1);
        let mut config = small_config(1);
        config.train_fractions = vec![0.1];
        match run_sweep(&corpus, &config) {
            Err(SweepError::Split {
                fraction, trial, ..
            }) => {
                assert_eq!(fraction, 0.1);
                assert_eq!(trial, 0);
            }
            other => panic!("expected split error, got {other:?}"),
        }
    }
}
