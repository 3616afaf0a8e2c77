//! Model persistence.
//!
//! A trained model is one JSON document:
//! `{format_version, algorithm, vectorizer_config, vocabulary, class_order,
//! parameters, seed, created_at}`. Numbers are written with full round-trip
//! precision, and Naive Bayes parameters are stored as probabilities (the
//! log forms used at scoring time are recomputed on load with the same
//! `ln` calls the fit used), so a reloaded model scores bit-identically.

use super::{
    Algorithm, ForestModel, MlpModel, ModelParameters, NaiveBayesModel, SvmModel, TrainedModel,
    Tree,
};
use crate::mitre::{ClassCode, NUM_CLASSES};
use crate::text::{VectorizerConfig, Vocabulary};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("failed to access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("unsupported model format version {found} (this build reads {FORMAT_VERSION})")]
    VersionMismatch { found: u64 },
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    algorithm: Algorithm,
    vectorizer_config: VectorizerConfig,
    vocabulary: VocabularyFile,
    class_order: Vec<String>,
    parameters: ParametersFile,
    seed: u64,
    created_at: String,
}

#[derive(Serialize, Deserialize)]
struct VocabularyFile {
    tokens: Vec<String>,
    doc_frequencies: Vec<u32>,
    n_docs: usize,
    config: VectorizerConfig,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
enum ParametersFile {
    NaiveBayes {
        alpha: f64,
        priors: Vec<f64>,
        likelihoods: Vec<Vec<f64>>,
    },
    Svm {
        weights: Vec<Vec<f64>>,
        bias: Vec<f64>,
    },
    RandomForest {
        trees: Vec<Tree>,
    },
    NeuralNetwork {
        hidden: usize,
        w1: Vec<Vec<f64>>,
        b1: Vec<f64>,
        w2: Vec<Vec<f64>>,
        b2: Vec<f64>,
    },
}

impl ParametersFile {
    fn algorithm(&self) -> Algorithm {
        match self {
            ParametersFile::NaiveBayes { .. } => Algorithm::NaiveBayes,
            ParametersFile::Svm { .. } => Algorithm::Svm,
            ParametersFile::RandomForest { .. } => Algorithm::RandomForest,
            ParametersFile::NeuralNetwork { .. } => Algorithm::NeuralNetwork,
        }
    }
}

fn to_file_parameters(parameters: &ModelParameters) -> ParametersFile {
    match parameters {
        ModelParameters::NaiveBayes(m) => ParametersFile::NaiveBayes {
            alpha: m.alpha,
            priors: m.priors.to_vec(),
            likelihoods: m.likelihoods.clone(),
        },
        ModelParameters::Svm(m) => ParametersFile::Svm {
            weights: m.weights.clone(),
            bias: m.bias.clone(),
        },
        ModelParameters::RandomForest(m) => ParametersFile::RandomForest {
            trees: m.trees.clone(),
        },
        ModelParameters::NeuralNetwork(m) => {
            let hidden = m.hidden;
            let vocab = m.vocab_size();
            // Stored orientation is hidden x V / classes x hidden.
            let w1 = (0..hidden)
                .map(|k| (0..vocab).map(|j| m.w1[j * hidden + k]).collect())
                .collect();
            let w2 = (0..NUM_CLASSES)
                .map(|c| m.w2[c * hidden..(c + 1) * hidden].to_vec())
                .collect();
            ParametersFile::NeuralNetwork {
                hidden,
                w1,
                b1: m.b1.clone(),
                w2,
                b2: m.b2.clone(),
            }
        }
    }
}

fn corrupt(msg: impl Into<String>) -> ModelIoError {
    ModelIoError::CorruptModel(msg.into())
}

fn require_finite(values: &[f64], what: &str) -> Result<(), ModelIoError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(corrupt(format!("{what} contains a non-finite value")))
    }
}

fn from_file_parameters(
    parameters: ParametersFile,
    vocab_size: usize,
) -> Result<ModelParameters, ModelIoError> {
    match parameters {
        ParametersFile::NaiveBayes {
            alpha,
            priors,
            likelihoods,
        } => {
            if priors.len() != NUM_CLASSES || likelihoods.len() != NUM_CLASSES {
                return Err(corrupt("naive bayes parameters must cover all 5 classes"));
            }
            if likelihoods.iter().any(|row| row.len() != vocab_size) {
                return Err(corrupt("likelihood rows must match the vocabulary size"));
            }
            if !(alpha > 0.0) {
                return Err(corrupt(format!("smoothing alpha {alpha} must be > 0")));
            }
            let prior_sum: f64 = priors.iter().sum();
            if (prior_sum - 1.0).abs() > 1e-9 || priors.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(corrupt("class priors are not a probability distribution"));
            }
            for (c, row) in likelihoods.iter().enumerate() {
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > 1e-9 || row.iter().any(|p| !(*p > 0.0 && *p <= 1.0)) {
                    return Err(corrupt(format!(
                        "token likelihoods for class {c} are not a probability distribution"
                    )));
                }
            }
            let priors: [f64; NUM_CLASSES] = priors.try_into().expect("length checked");
            Ok(ModelParameters::NaiveBayes(
                NaiveBayesModel::from_probabilities(alpha, priors, likelihoods),
            ))
        }
        ParametersFile::Svm { weights, bias } => {
            if weights.len() != NUM_CLASSES || bias.len() != NUM_CLASSES {
                return Err(corrupt("svm parameters must cover all 5 classes"));
            }
            if weights.iter().any(|row| row.len() != vocab_size) {
                return Err(corrupt("svm weight rows must match the vocabulary size"));
            }
            for row in &weights {
                require_finite(row, "svm weights")?;
            }
            require_finite(&bias, "svm bias")?;
            Ok(ModelParameters::Svm(SvmModel { weights, bias }))
        }
        ParametersFile::RandomForest { trees } => {
            if trees.is_empty() {
                return Err(corrupt("forest has no trees"));
            }
            for tree in &trees {
                if tree.root as usize >= tree.nodes.len() {
                    return Err(corrupt("tree root index out of range"));
                }
                for node in &tree.nodes {
                    match node {
                        super::TreeNode::Split {
                            feature,
                            threshold,
                            left,
                            right,
                        } => {
                            if *feature as usize >= vocab_size {
                                return Err(corrupt("split feature index out of range"));
                            }
                            if !threshold.is_finite() {
                                return Err(corrupt("split threshold is not finite"));
                            }
                            if *left as usize >= tree.nodes.len()
                                || *right as usize >= tree.nodes.len()
                            {
                                return Err(corrupt("split child index out of range"));
                            }
                        }
                        super::TreeNode::Leaf { counts } => {
                            if counts.iter().all(|&c| c == 0) {
                                return Err(corrupt("leaf histogram is empty"));
                            }
                        }
                    }
                }
            }
            Ok(ModelParameters::RandomForest(ForestModel { trees }))
        }
        ParametersFile::NeuralNetwork {
            hidden,
            w1,
            b1,
            w2,
            b2,
        } => {
            if hidden == 0 {
                return Err(corrupt("hidden size must be >= 1"));
            }
            if w1.len() != hidden || w1.iter().any(|row| row.len() != vocab_size) {
                return Err(corrupt("w1 must be hidden x vocabulary"));
            }
            if b1.len() != hidden {
                return Err(corrupt("b1 must match the hidden size"));
            }
            if w2.len() != NUM_CLASSES || w2.iter().any(|row| row.len() != hidden) {
                return Err(corrupt("w2 must be classes x hidden"));
            }
            if b2.len() != NUM_CLASSES {
                return Err(corrupt("b2 must cover all 5 classes"));
            }
            let mut w1_flat = vec![0.0; vocab_size * hidden];
            for (k, row) in w1.iter().enumerate() {
                require_finite(row, "w1")?;
                for (j, &v) in row.iter().enumerate() {
                    w1_flat[j * hidden + k] = v;
                }
            }
            let mut w2_flat = Vec::with_capacity(NUM_CLASSES * hidden);
            for row in &w2 {
                require_finite(row, "w2")?;
                w2_flat.extend_from_slice(row);
            }
            require_finite(&b1, "b1")?;
            require_finite(&b2, "b2")?;
            Ok(ModelParameters::NeuralNetwork(MlpModel {
                hidden,
                w1: w1_flat,
                b1,
                w2: w2_flat,
                b2,
            }))
        }
    }
}

fn to_file(model: &TrainedModel, created_at: String) -> ModelFile {
    let vocab = model.vocabulary();
    ModelFile {
        format_version: FORMAT_VERSION,
        algorithm: model.algorithm(),
        vectorizer_config: *vocab.config(),
        vocabulary: VocabularyFile {
            tokens: vocab.tokens().to_vec(),
            doc_frequencies: vocab.doc_frequencies().to_vec(),
            n_docs: vocab.n_docs(),
            config: *vocab.config(),
        },
        class_order: ClassCode::ALL.iter().map(|c| c.to_string()).collect(),
        parameters: to_file_parameters(model.parameters()),
        seed: model.seed(),
        created_at,
    }
}

/// Write the model as a single JSON document.
pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<(), ModelIoError> {
    let path = path.as_ref();
    let file = to_file(model, now_rfc3339());
    let json = serde_json::to_string(&file).expect("model serializes");
    fs::write(path, json).map_err(|source| ModelIoError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Timestamp-free serialization: equal models produce equal bytes. Used
/// for fingerprinting models that have not been written to disk.
pub(crate) fn canonical_json(model: &TrainedModel) -> String {
    serde_json::to_string(&to_file(model, String::new())).expect("model serializes")
}

/// Load a model produced by [`save_model`], revalidating its invariants.
pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel, ModelIoError> {
    let path = path.as_ref();
    let contents = fs::read_to_string(path).map_err(|source| ModelIoError::Io {
        path: path.display().to_string(),
        source,
    })?;

    // Check the version before parsing the full document, so files from a
    // future format fail with the right error instead of a parse error.
    let probe: serde_json::Value =
        serde_json::from_str(&contents).map_err(|e| corrupt(e.to_string()))?;
    match probe.get("format_version").and_then(|v| v.as_u64()) {
        Some(found) if found == FORMAT_VERSION as u64 => {}
        Some(found) => return Err(ModelIoError::VersionMismatch { found }),
        None => return Err(corrupt("missing format_version field")),
    }

    let file: ModelFile = serde_json::from_str(&contents).map_err(|e| corrupt(e.to_string()))?;
    if file.parameters.algorithm() != file.algorithm {
        return Err(corrupt(format!(
            "algorithm field says {} but parameters are {}",
            file.algorithm,
            file.parameters.algorithm()
        )));
    }
    let expected_order: Vec<String> = ClassCode::ALL.iter().map(|c| c.to_string()).collect();
    if file.class_order != expected_order {
        return Err(corrupt("unexpected class order"));
    }
    let vocabulary = Vocabulary::from_parts(
        file.vocabulary.tokens,
        file.vocabulary.doc_frequencies,
        file.vocabulary.n_docs,
        file.vocabulary.config,
    )
    .map_err(corrupt)?;
    let parameters = from_file_parameters(file.parameters, vocabulary.len())?;
    Ok(TrainedModel::from_parts(
        file.algorithm,
        vocabulary,
        file.seed,
        parameters,
    ))
}

fn now_rfc3339() -> String {
    time::OffsetDateTime::now_utc()
        .format(&time::format_description::well_known::Rfc3339)
        .unwrap_or_else(|_| "1970-01-01T00:00:00Z".to_string())
}
