//! Turn a trained model into an ATT&CK branch recommender.
//!
//! For each requirement the recommender emits the predicted class, a
//! normalized score distribution, and the predicted class's member
//! tactics with their technique counts and descriptions. Naive Bayes log
//! scores and SVM margins pass through a softmax; forest vote fractions
//! and network probabilities are already distributions and pass through
//! unchanged. Normalization is monotone, so the recommended class always
//! equals the classifier's own prediction.

use crate::classifiers::{Algorithm, ModelIoError, TrainedModel};
use crate::corpus::Requirement;
use crate::mitre::{ClassCode, MitreTactic};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RecommendError {
    #[error("requirement {index} (id `{id}`) has empty text")]
    EmptyRequirement { index: usize, id: String },
    #[error(transparent)]
    ModelIo(#[from] ModelIoError),
}

/// Embedded metadata for one member tactic of a recommended class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TacticInfo {
    pub name: &'static str,
    pub technique_count: u32,
    pub description: &'static str,
}

impl From<MitreTactic> for TacticInfo {
    fn from(tactic: MitreTactic) -> TacticInfo {
        TacticInfo {
            name: tactic.name(),
            technique_count: tactic.technique_count(),
            description: tactic.description(),
        }
    }
}

/// One recommendation: the class, its score distribution, and the class's
/// member branches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recommendation {
    pub id: String,
    pub text: String,
    pub predicted: ClassCode,
    /// Normalized per-class scores; sums to 1.
    pub scores: BTreeMap<ClassCode, f64>,
    pub member_tactics: Vec<TacticInfo>,
    /// SHA-256 of the model artifact that produced this recommendation.
    pub model_fingerprint: String,
}

/// A trained model plus the fingerprint of its artifact.
#[derive(Debug, Clone)]
pub struct Recommender {
    model: TrainedModel,
    fingerprint: String,
}

impl Recommender {
    /// Load a saved model; the fingerprint hashes the file bytes.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Recommender, RecommendError> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|source| ModelIoError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let model = crate::classifiers::load_model(path)?;
        Ok(Recommender {
            model,
            fingerprint: hex_sha256(&bytes),
        })
    }

    /// Wrap an in-memory model; the fingerprint hashes its canonical
    /// serialization (timestamp excluded), so equal models share it.
    pub fn new(model: TrainedModel) -> Recommender {
        let canonical = crate::classifiers::model_file::canonical_json(&model);
        Recommender {
            fingerprint: hex_sha256(canonical.as_bytes()),
            model,
        }
    }

    pub fn model(&self) -> &TrainedModel {
        &self.model
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Recommend branches for a batch of requirements, order-preserving.
    pub fn recommend(
        &self,
        requirements: &[Requirement],
    ) -> Result<Vec<Recommendation>, RecommendError> {
        requirements
            .iter()
            .enumerate()
            .map(|(index, req)| {
                if req.text.trim().is_empty() {
                    return Err(RecommendError::EmptyRequirement {
                        index,
                        id: req.id.clone(),
                    });
                }
                let raw = self.model.predict_scores(&req.text);
                let predicted = raw.argmax();
                let normalized = match self.model.algorithm() {
                    Algorithm::NaiveBayes | Algorithm::Svm => raw.softmax(),
                    Algorithm::RandomForest | Algorithm::NeuralNetwork => raw,
                };
                let scores = ClassCode::ALL
                    .iter()
                    .map(|&c| (c, normalized.get(c)))
                    .collect();
                Ok(Recommendation {
                    id: req.id.clone(),
                    text: req.text.clone(),
                    predicted,
                    scores,
                    member_tactics: predicted.members().iter().copied().map(Into::into).collect(),
                    model_fingerprint: self.fingerprint.clone(),
                })
            })
            .collect()
    }
}

fn hex_sha256(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// One JSON document per line.
pub fn to_jsonl(recommendations: &[Recommendation]) -> String {
    recommendations
        .iter()
        .map(|r| serde_json::to_string(r).expect("recommendation serializes"))
        .map(|line| line + "\n")
        .collect()
}

/// Human-readable rendering.
pub fn to_text(recommendations: &[Recommendation]) -> String {
    let mut out = String::new();
    for rec in recommendations {
        out.push_str(&format!("{}: {}\n", rec.id, rec.text));
        out.push_str(&format!("  predicted class: {}\n", rec.predicted));
        let scores: Vec<String> = rec
            .scores
            .iter()
            .map(|(c, s)| format!("{c}={s:.3}"))
            .collect();
        out.push_str(&format!("  scores: {}\n", scores.join(" ")));
        for tactic in &rec.member_tactics {
            out.push_str(&format!(
                "  - {} ({} techniques): {}\n",
                tactic.name, tactic.technique_count, tactic.description
            ));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{fit, ClassifierSpec};
    use crate::synthetic::keyword_corpus;
    use crate::text::{VectorizerConfig, Vocabulary};

    fn trained(algorithm: Algorithm) -> TrainedModel {
        let corpus = keyword_corpus(50, 4);
        let config = VectorizerConfig::default();
        let docs: Vec<_> = corpus.texts().map(|t| config.tokenize(t)).collect();
        let vocab = Vocabulary::fit(&docs, config).unwrap();
        fit(&ClassifierSpec::with_defaults(algorithm, 8), &corpus, &vocab).unwrap()
    }

    #[test]
    fn recommendation_delegates_to_predict_and_lists_members() {
        for algorithm in Algorithm::ALL {
            let model = trained(algorithm);
            let recommender = Recommender::new(model);
            let reqs = vec![
                Requirement::new("q1", "the system shall exfil and harvest records"),
                Requirement::new("q2", "the beacon relay shall report uplink status"),
            ];
            let recs = recommender.recommend(&reqs).unwrap();
            assert_eq!(recs.len(), 2);
            for (req, rec) in reqs.iter().zip(&recs) {
                assert_eq!(rec.predicted, recommender.model().predict(&req.text));
                let expected: Vec<TacticInfo> = rec
                    .predicted
                    .members()
                    .iter()
                    .copied()
                    .map(Into::into)
                    .collect();
                assert_eq!(rec.member_tactics, expected);
                let sum: f64 = rec.scores.values().sum();
                assert!((sum - 1.0).abs() < 1e-9, "{algorithm}: scores sum {sum}");
            }
        }
    }

    #[test]
    fn normalization_never_changes_the_argmax() {
        for algorithm in Algorithm::ALL {
            let model = trained(algorithm);
            let recommender = Recommender::new(model);
            let reqs: Vec<Requirement> = (0..10)
                .map(|i| {
                    Requirement::new(
                        format!("q{i}"),
                        format!("requirement {i} shall stash the privilege token"),
                    )
                })
                .collect();
            for rec in recommender.recommend(&reqs).unwrap() {
                let best = rec
                    .scores
                    .iter()
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(a.0)))
                    .map(|(c, _)| *c)
                    .unwrap();
                assert_eq!(best, rec.predicted, "{algorithm}");
            }
        }
    }

    #[test]
    fn predicted_c5_lists_collection_and_exfiltration() {
        let rec = Recommendation {
            id: "x".into(),
            text: "y".into(),
            predicted: ClassCode::C5,
            scores: BTreeMap::new(),
            member_tactics: ClassCode::C5.members().iter().copied().map(Into::into).collect(),
            model_fingerprint: String::new(),
        };
        let names: Vec<&str> = rec.member_tactics.iter().map(|t| t.name).collect();
        assert_eq!(names, vec!["collection", "exfiltration"]);
        let counts: Vec<u32> = rec.member_tactics.iter().map(|t| t.technique_count).collect();
        assert_eq!(counts, vec![17, 9]);

        let c3: Vec<TacticInfo> = ClassCode::C3.members().iter().copied().map(Into::into).collect();
        assert_eq!(c3[0].name, "persistence");
        assert_eq!(c3[0].technique_count, 19);
        assert_eq!(c3[1].name, "defense-evasion");
        assert_eq!(c3[1].technique_count, 40);
    }

    #[test]
    fn empty_requirement_is_rejected_with_its_index() {
        let model = trained(Algorithm::NaiveBayes);
        let recommender = Recommender::new(model);
        let reqs = vec![
            Requirement::new("ok", "fine text"),
            Requirement::new("bad", "   "),
        ];
        match recommender.recommend(&reqs) {
            Err(RecommendError::EmptyRequirement { index, id }) => {
                assert_eq!(index, 1);
                assert_eq!(id, "bad");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn repeated_calls_are_identical_and_jsonl_is_one_line_each() {
        let model = trained(Algorithm::Svm);
        let recommender = Recommender::new(model);
        let reqs = vec![Requirement::new("q", "obfuscate the autorun implant")];
        let a = recommender.recommend(&reqs).unwrap();
        let b = recommender.recommend(&reqs).unwrap();
        assert_eq!(a, b);

        let jsonl = to_jsonl(&a);
        assert_eq!(jsonl.lines().count(), 1);
        let value: serde_json::Value = serde_json::from_str(jsonl.trim()).unwrap();
        assert_eq!(value["id"], "q");
        assert!(value["scores"]["C3"].is_number());
        assert!(value["model_fingerprint"].as_str().unwrap().len() == 64);
    }
}
