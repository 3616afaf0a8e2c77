//! Linear one-vs-rest SVM trained by hinge-loss subgradient descent.
//!
//! Each class gets a binary classifier against the rest, trained with the
//! Pegasos schedule: per-example subgradient steps at learning rate
//! `1 / (lambda * t)`, where `t` counts examples seen. The weight vector is
//! kept as `scale * w` so the per-step L2 shrink costs O(1) instead of
//! O(vocabulary). Example order is reshuffled every epoch from a seed
//! derived per class, so a fit depends only on (data, config, seed).

use super::ScoreVector;
use crate::mitre::NUM_CLASSES;
use crate::rng::{derive_seed, Rng};
use crate::text::SparseVector;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    /// L2 regularization weight.
    pub lambda: f64,
    /// Passes over the training set. Fixed budget; no early stopping.
    pub epochs: u32,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            lambda: 1e-4,
            epochs: 50,
        }
    }
}

/// Per-class weight vectors and biases. The margin for class `c` is
/// `weights[c] . x + bias[c]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl SvmModel {
    pub fn score(&self, features: &SparseVector) -> ScoreVector {
        let mut scores = [0.0; NUM_CLASSES];
        for class in 0..NUM_CLASSES {
            scores[class] = features.dot(&self.weights[class]) + self.bias[class];
        }
        ScoreVector::new(scores)
    }
}

pub(super) fn fit(
    config: &SvmConfig,
    seed: u64,
    docs: &[SparseVector],
    labels: &[usize],
    vocab_size: usize,
) -> SvmModel {
    let mut weights = Vec::with_capacity(NUM_CLASSES);
    let mut bias = Vec::with_capacity(NUM_CLASSES);
    for class in 0..NUM_CLASSES {
        let mut rng = Rng::from_seed(derive_seed(seed, &[class as u64]));
        let (w, b) = fit_binary(config, docs, labels, class, vocab_size, &mut rng);
        weights.push(w);
        bias.push(b);
    }
    SvmModel { weights, bias }
}

/// The bias is trained as the weight of an implicit always-one feature,
/// so it shares the L2 shrink. An unshrunk bias keeps its huge early
/// 1/(lambda*t) steps and ends up dominating the one-vs-rest argmax.
fn fit_binary(
    config: &SvmConfig,
    docs: &[SparseVector],
    labels: &[usize],
    positive_class: usize,
    vocab_size: usize,
    rng: &mut Rng,
) -> (Vec<f64>, f64) {
    let mut w = vec![0.0f64; vocab_size];
    let mut b = 0.0f64;
    let mut scale = 1.0f64;
    let mut t = 0u64;
    let mut order: Vec<usize> = (0..docs.len()).collect();

    for _ in 0..config.epochs {
        rng.shuffle(&mut order);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (config.lambda * t as f64);
            let y = if labels[i] == positive_class { 1.0 } else { -1.0 };
            let margin = y * scale * (docs[i].dot(&w) + b);

            // L2 shrink: (1 - eta*lambda) = (1 - 1/t); zero exactly at t=1,
            // where the parameters are still zero anyway.
            scale *= 1.0 - eta * config.lambda;
            if t == 1 {
                scale = 1.0;
            }
            if margin < 1.0 {
                let step = eta * y / scale;
                for &(j, v) in docs[i].entries() {
                    w[j] += step * v;
                }
                b += step;
            }
        }
    }

    for x in &mut w {
        *x *= scale;
    }
    (w, b * scale)
}
