//! Multinomial Naive Bayes with Laplace smoothing.
//!
//! Fitting is closed-form counting. Scoring works in log space: the joint
//! `log P(class) + sum_t count(t) * log P(t|class)` drops the constant
//! evidence term, so the argmax is the maximum-posterior class.

use super::ScoreVector;
use crate::mitre::NUM_CLASSES;
use crate::text::SparseVector;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesConfig {
    /// Laplace/Lidstone smoothing added to every (class, token) count.
    pub alpha: f64,
}

impl Default for NaiveBayesConfig {
    fn default() -> Self {
        NaiveBayesConfig { alpha: 1.0 }
    }
}

/// Fitted parameters. Probabilities are the source of truth; the log forms
/// used for scoring are derived from them with `ln`, so a model rebuilt
/// from its serialized probabilities scores bit-identically.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    pub alpha: f64,
    /// P(class), indexed by class. Zero for classes absent from training.
    pub priors: [f64; NUM_CLASSES],
    /// P(token|class), `NUM_CLASSES` rows of vocabulary length.
    pub likelihoods: Vec<Vec<f64>>,
    log_priors: [f64; NUM_CLASSES],
    log_likelihoods: Vec<Vec<f64>>,
}

impl NaiveBayesModel {
    pub fn from_probabilities(
        alpha: f64,
        priors: [f64; NUM_CLASSES],
        likelihoods: Vec<Vec<f64>>,
    ) -> NaiveBayesModel {
        let log_priors = priors.map(f64::ln);
        let log_likelihoods = likelihoods
            .iter()
            .map(|row| row.iter().map(|p| p.ln()).collect())
            .collect();
        NaiveBayesModel {
            alpha,
            priors,
            likelihoods,
            log_priors,
            log_likelihoods,
        }
    }

    /// Log-joint score per class for a raw count vector.
    pub fn score(&self, counts: &SparseVector) -> ScoreVector {
        let mut scores = self.log_priors;
        for &(token, count) in counts.entries() {
            for class in 0..NUM_CLASSES {
                scores[class] += count * self.log_likelihoods[class][token];
            }
        }
        ScoreVector::new(scores)
    }
}

/// Closed-form fit: priors from document counts, token likelihoods from
/// Laplace-smoothed per-class token totals.
pub(super) fn fit(
    config: &NaiveBayesConfig,
    docs: &[SparseVector],
    labels: &[usize],
    vocab_size: usize,
) -> NaiveBayesModel {
    let mut doc_counts = [0usize; NUM_CLASSES];
    let mut token_counts = vec![vec![0.0f64; vocab_size]; NUM_CLASSES];
    for (doc, &label) in docs.iter().zip(labels) {
        doc_counts[label] += 1;
        for &(token, count) in doc.entries() {
            token_counts[label][token] += count;
        }
    }

    let n_docs = docs.len() as f64;
    let mut priors = [0.0; NUM_CLASSES];
    for class in 0..NUM_CLASSES {
        priors[class] = doc_counts[class] as f64 / n_docs;
    }

    let likelihoods = token_counts
        .iter()
        .map(|counts| {
            let total: f64 = counts.iter().sum();
            let denominator = total + config.alpha * vocab_size as f64;
            counts
                .iter()
                .map(|&c| (c + config.alpha) / denominator)
                .collect()
        })
        .collect();

    NaiveBayesModel::from_probabilities(config.alpha, priors, likelihoods)
}
