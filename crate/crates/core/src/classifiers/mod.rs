//! Four classifiers behind one train/predict interface.
//!
//! All four are implemented here from first principles: multinomial Naive
//! Bayes in closed form, a linear one-vs-rest SVM trained by hinge-loss
//! subgradient descent, a random forest of Gini-split decision trees, and
//! a single-hidden-layer neural network trained by full-batch gradient
//! descent. Fitting is deterministic given the spec (including its seed);
//! fixed epoch budgets replace convergence checks so runs stay comparable.
//!
//! Naive Bayes consumes raw token counts; the other three consume the
//! vocabulary's configured weighting (L2-normalized TF-IDF by default).

mod forest;
mod mlp;
pub(crate) mod model_file;
mod nb;
mod svm;

pub use forest::{ForestConfig, ForestModel, Tree, TreeNode};
pub use mlp::{mlp_loss, mlp_loss_and_gradient, MlpConfig, MlpGradient, MlpModel};
pub use model_file::{load_model, save_model, ModelIoError, FORMAT_VERSION};
pub use nb::{NaiveBayesConfig, NaiveBayesModel};
pub use svm::{SvmConfig, SvmModel};

use crate::corpus::LabeledCorpus;
use crate::mitre::{ClassCode, NUM_CLASSES};
use crate::rng::fnv1a64;
use crate::text::Vocabulary;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training set contains a single class ({0}); need at least two")]
    SingleClassCorpus(ClassCode),
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
}

/// Algorithm tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    NaiveBayes,
    Svm,
    RandomForest,
    NeuralNetwork,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::NaiveBayes,
        Algorithm::Svm,
        Algorithm::RandomForest,
        Algorithm::NeuralNetwork,
    ];

    /// Row order used by the published result tables.
    pub const TABLE_ORDER: [Algorithm; 4] = [
        Algorithm::NeuralNetwork,
        Algorithm::RandomForest,
        Algorithm::Svm,
        Algorithm::NaiveBayes,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::NaiveBayes => "naive_bayes",
            Algorithm::Svm => "svm",
            Algorithm::RandomForest => "random_forest",
            Algorithm::NeuralNetwork => "neural_network",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::NaiveBayes => "Naive Bayes",
            Algorithm::Svm => "Support Vector Machine",
            Algorithm::RandomForest => "Random Forest",
            Algorithm::NeuralNetwork => "Neural Network",
        }
    }

    /// Short flag token accepted on the command line.
    pub fn cli_token(self) -> &'static str {
        match self {
            Algorithm::NaiveBayes => "nb",
            Algorithm::Svm => "svm",
            Algorithm::RandomForest => "rf",
            Algorithm::NeuralNetwork => "mlp",
        }
    }

    /// Parse either the short CLI token or the long snake_case name.
    pub fn parse(s: &str) -> Option<Algorithm> {
        let s = s.trim().to_lowercase();
        Algorithm::ALL
            .iter()
            .copied()
            .find(|a| a.cli_token() == s || a.as_str() == s)
    }

    /// Stable context word for seed derivation, independent of enum layout.
    pub fn seed_word(self) -> u64 {
        fnv1a64(self.as_str().as_bytes())
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Algorithm choice plus its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum AlgorithmParams {
    NaiveBayes(NaiveBayesConfig),
    Svm(SvmConfig),
    RandomForest(ForestConfig),
    NeuralNetwork(MlpConfig),
}

impl AlgorithmParams {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            AlgorithmParams::NaiveBayes(_) => Algorithm::NaiveBayes,
            AlgorithmParams::Svm(_) => Algorithm::Svm,
            AlgorithmParams::RandomForest(_) => Algorithm::RandomForest,
            AlgorithmParams::NeuralNetwork(_) => Algorithm::NeuralNetwork,
        }
    }

    pub fn defaults_for(algorithm: Algorithm) -> AlgorithmParams {
        match algorithm {
            Algorithm::NaiveBayes => AlgorithmParams::NaiveBayes(NaiveBayesConfig::default()),
            Algorithm::Svm => AlgorithmParams::Svm(SvmConfig::default()),
            Algorithm::RandomForest => AlgorithmParams::RandomForest(ForestConfig::default()),
            Algorithm::NeuralNetwork => AlgorithmParams::NeuralNetwork(MlpConfig::default()),
        }
    }

    fn validate(&self) -> Result<(), TrainError> {
        let fail = |msg: String| Err(TrainError::InvalidHyperparameter(msg));
        match self {
            AlgorithmParams::NaiveBayes(c) => {
                if !(c.alpha > 0.0) {
                    return fail(format!("smoothing alpha must be > 0, got {}", c.alpha));
                }
            }
            AlgorithmParams::Svm(c) => {
                if !(c.lambda > 0.0) {
                    return fail(format!("L2 weight lambda must be > 0, got {}", c.lambda));
                }
                if c.epochs == 0 {
                    return fail("epochs must be >= 1".into());
                }
            }
            AlgorithmParams::RandomForest(c) => {
                if c.trees == 0 {
                    return fail("tree count must be >= 1".into());
                }
            }
            AlgorithmParams::NeuralNetwork(c) => {
                if c.hidden == 0 {
                    return fail("hidden size must be >= 1".into());
                }
                if c.epochs == 0 {
                    return fail("epochs must be >= 1".into());
                }
                if !(c.learning_rate > 0.0) {
                    return fail(format!(
                        "learning rate must be > 0, got {}",
                        c.learning_rate
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Everything needed to fit a model: algorithm, hyperparameters, seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    #[serde(flatten)]
    pub params: AlgorithmParams,
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn with_defaults(algorithm: Algorithm, seed: u64) -> ClassifierSpec {
        ClassifierSpec {
            params: AlgorithmParams::defaults_for(algorithm),
            seed,
        }
    }
}

/// Per-class scores: log joint for Naive Bayes, margins for the SVM, vote
/// fractions for the forest, softmax probabilities for the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreVector {
    scores: [f64; NUM_CLASSES],
}

impl ScoreVector {
    pub fn new(scores: [f64; NUM_CLASSES]) -> ScoreVector {
        ScoreVector { scores }
    }

    pub fn scores(&self) -> &[f64; NUM_CLASSES] {
        &self.scores
    }

    pub fn get(&self, class: ClassCode) -> f64 {
        self.scores[class.index()]
    }

    /// Highest-scoring class; ties break toward the lowest class index.
    pub fn argmax(&self) -> ClassCode {
        let mut best = 0;
        for i in 1..NUM_CLASSES {
            if self.scores[i] > self.scores[best] {
                best = i;
            }
        }
        ClassCode::from_index(best).expect("index in range")
    }

    /// Numerically stable softmax. Maps -inf scores (zero-probability
    /// Naive Bayes classes) to exactly 0.
    pub fn softmax(&self) -> ScoreVector {
        let max = self
            .scores
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut exps = [0.0; NUM_CLASSES];
        let mut sum = 0.0;
        for (i, &s) in self.scores.iter().enumerate() {
            exps[i] = (s - max).exp();
            sum += exps[i];
        }
        for e in &mut exps {
            *e /= sum;
        }
        ScoreVector { scores: exps }
    }
}

/// Fitted model parameters for one of the four algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParameters {
    NaiveBayes(NaiveBayesModel),
    Svm(SvmModel),
    RandomForest(ForestModel),
    NeuralNetwork(MlpModel),
}

/// An immutable fitted classifier bound to the vocabulary it was trained
/// with. Safe to share across threads for concurrent prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    algorithm: Algorithm,
    vocabulary: Vocabulary,
    seed: u64,
    parameters: ModelParameters,
}

impl TrainedModel {
    pub(crate) fn from_parts(
        algorithm: Algorithm,
        vocabulary: Vocabulary,
        seed: u64,
        parameters: ModelParameters,
    ) -> TrainedModel {
        TrainedModel {
            algorithm,
            vocabulary,
            seed,
            parameters,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn parameters(&self) -> &ModelParameters {
        &self.parameters
    }

    /// Classes in score order: always the five codes, C1 first.
    pub fn class_order(&self) -> [ClassCode; NUM_CLASSES] {
        ClassCode::ALL
    }

    /// Per-class scores for a requirement text. Pure; an all-unknown text
    /// still scores through priors and bias terms.
    pub fn predict_scores(&self, text: &str) -> ScoreVector {
        let tokens = self.vocabulary.config().tokenize(text);
        match &self.parameters {
            ModelParameters::NaiveBayes(m) => {
                m.score(&self.vocabulary.vectorize_counts(&tokens))
            }
            ModelParameters::Svm(m) => m.score(&self.vocabulary.vectorize(&tokens)),
            ModelParameters::RandomForest(m) => m.score(&self.vocabulary.vectorize(&tokens)),
            ModelParameters::NeuralNetwork(m) => m.score(&self.vocabulary.vectorize(&tokens)),
        }
    }

    /// Argmax of [`predict_scores`], ties toward the lowest class index.
    pub fn predict(&self, text: &str) -> ClassCode {
        self.predict_scores(text).argmax()
    }
}

/// Fit a classifier on a labeled corpus over a fitted vocabulary.
pub fn fit(
    spec: &ClassifierSpec,
    train: &LabeledCorpus,
    vocab: &Vocabulary,
) -> Result<TrainedModel, TrainError> {
    spec.params.validate()?;
    if train.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    let first = train.records()[0].label;
    if train.labels().all(|label| label == first) {
        return Err(TrainError::SingleClassCorpus(first));
    }

    let labels: Vec<usize> = train.labels().map(|c| c.index()).collect();
    let parameters = match &spec.params {
        AlgorithmParams::NaiveBayes(config) => {
            let docs: Vec<_> = train
                .texts()
                .map(|t| vocab.vectorize_counts(&vocab.config().tokenize(t)))
                .collect();
            ModelParameters::NaiveBayes(nb::fit(config, &docs, &labels, vocab.len()))
        }
        AlgorithmParams::Svm(config) => {
            let docs: Vec<_> = train
                .texts()
                .map(|t| vocab.vectorize(&vocab.config().tokenize(t)))
                .collect();
            ModelParameters::Svm(svm::fit(config, spec.seed, &docs, &labels, vocab.len()))
        }
        AlgorithmParams::RandomForest(config) => {
            let docs: Vec<_> = train
                .texts()
                .map(|t| vocab.vectorize(&vocab.config().tokenize(t)))
                .collect();
            ModelParameters::RandomForest(forest::fit(
                config,
                spec.seed,
                &docs,
                &labels,
                vocab.len(),
            ))
        }
        AlgorithmParams::NeuralNetwork(config) => {
            let docs: Vec<_> = train
                .texts()
                .map(|t| vocab.vectorize(&vocab.config().tokenize(t)))
                .collect();
            ModelParameters::NeuralNetwork(mlp::fit(config, spec.seed, &docs, &labels, vocab.len()))
        }
    };
    Ok(TrainedModel {
        algorithm: spec.params.algorithm(),
        vocabulary: vocab.clone(),
        seed: spec.seed,
        parameters,
    })
}
