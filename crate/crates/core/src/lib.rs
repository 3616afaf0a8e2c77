//! Classify software functional requirements into grouped MITRE ATT&CK
//! tactic classes and recommend the matching branches.
//!
//! The pipeline: load a labeled requirement corpus from CSV, split it into
//! train/test halves with a seeded shuffle, fit one of four classifiers
//! (Naive Bayes, linear SVM, random forest, neural network) over a
//! vocabulary fitted on the training half only, score predictions with a
//! confusion matrix and micro/macro precision-recall-F1, sweep split
//! ratios and algorithms over repeated seeded trials, and turn a trained
//! model into branch recommendations with embedded tactic metadata.
//!
//! Everything is deterministic given its seeds; see [`rng`] for the
//! portable generators behind that guarantee.

pub mod classifiers;
pub mod corpus;
pub mod experiment;
pub mod metrics;
pub mod mitre;
pub mod recommend;
pub mod rng;
pub mod split;
pub mod synthetic;
pub mod text;

pub use classifiers::{
    fit, load_model, save_model, Algorithm, AlgorithmParams, ClassifierSpec, ScoreVector,
    TrainedModel,
};
pub use corpus::{
    load_corpus, load_requirements, save_corpus, IngestConfig, LabeledCorpus, LabeledRecord,
    Requirement,
};
pub use experiment::{run_sweep, SweepConfig, SweepResult};
pub use metrics::{evaluate, format_report, EvalReport, ReportStyle};
pub use mitre::{group_tactic, ClassCode, MitreTactic, TacticClass, NUM_CLASSES};
pub use recommend::{Recommendation, Recommender};
pub use split::{train_test_split, SplitConfig, SplitResult};
pub use text::{tokenize, VectorizerConfig, Vocabulary, Weighting};
