//! Single-hidden-layer neural network.
//!
//! Architecture: sparse input -> `hidden` ReLU units -> 5-way softmax,
//! trained with full-batch gradient descent on the mean cross-entropy.
//! Weights initialize uniformly in +-1/sqrt(fan_in) from the model seed;
//! biases start at zero. The loss/gradient pair is public so tests can
//! check the analytic gradient against central finite differences.
//!
//! Weight layout: `w1` is input-major (`w1[j * hidden + k]`) so sparse
//! documents touch contiguous hidden slices; `w2` is class-major
//! (`w2[c * hidden + k]`).

use super::ScoreVector;
use crate::mitre::NUM_CLASSES;
use crate::rng::Rng;
use crate::text::SparseVector;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    /// Full-batch epochs. Fixed budget; no early stopping.
    pub epochs: u32,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: 64,
            learning_rate: 0.1,
            epochs: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub hidden: usize,
    /// Input-to-hidden weights, `vocab_size * hidden`, input-major.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// Hidden-to-output weights, `NUM_CLASSES * hidden`, class-major.
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl MlpModel {
    pub fn vocab_size(&self) -> usize {
        self.w1.len() / self.hidden
    }

    fn forward(&self, features: &SparseVector) -> ([f64; NUM_CLASSES], Vec<f64>) {
        let mut h = self.b1.clone();
        for &(j, v) in features.entries() {
            let row = &self.w1[j * self.hidden..(j + 1) * self.hidden];
            for (hk, &w) in h.iter_mut().zip(row) {
                *hk += v * w;
            }
        }
        for hk in &mut h {
            if *hk < 0.0 {
                *hk = 0.0;
            }
        }
        let mut z = [0.0; NUM_CLASSES];
        for (c, zc) in z.iter_mut().enumerate() {
            let row = &self.w2[c * self.hidden..(c + 1) * self.hidden];
            *zc = self.b2[c] + row.iter().zip(&h).map(|(w, hk)| w * hk).sum::<f64>();
        }
        (z, h)
    }

    /// Softmax class probabilities; sums to 1.
    pub fn score(&self, features: &SparseVector) -> ScoreVector {
        let (z, _) = self.forward(features);
        ScoreVector::new(z).softmax()
    }
}

/// Gradient of [`mlp_loss`] with respect to every parameter, in the same
/// layout as the model.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradient {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

/// Mean softmax cross-entropy of `model` over a dataset.
pub fn mlp_loss(model: &MlpModel, docs: &[SparseVector], labels: &[usize]) -> f64 {
    let mut total = 0.0;
    for (x, &y) in docs.iter().zip(labels) {
        let (z, _) = model.forward(x);
        total += log_sum_exp(&z) - z[y];
    }
    total / docs.len() as f64
}

/// Mean cross-entropy and its full-batch analytic gradient.
pub fn mlp_loss_and_gradient(
    model: &MlpModel,
    docs: &[SparseVector],
    labels: &[usize],
) -> (f64, MlpGradient) {
    let hidden = model.hidden;
    let n = docs.len() as f64;
    let mut grad = MlpGradient {
        w1: vec![0.0; model.w1.len()],
        b1: vec![0.0; hidden],
        w2: vec![0.0; model.w2.len()],
        b2: vec![0.0; NUM_CLASSES],
    };
    let mut total = 0.0;

    for (x, &y) in docs.iter().zip(labels) {
        let (z, h) = model.forward(x);
        let lse = log_sum_exp(&z);
        total += lse - z[y];

        // dL/dz = (softmax(z) - onehot(y)) / n
        let mut dz = [0.0; NUM_CLASSES];
        for c in 0..NUM_CLASSES {
            dz[c] = (z[c] - lse).exp() / n;
        }
        dz[y] -= 1.0 / n;

        let mut dh = vec![0.0; hidden];
        for c in 0..NUM_CLASSES {
            grad.b2[c] += dz[c];
            let w2_row = &model.w2[c * hidden..(c + 1) * hidden];
            let g2_row = &mut grad.w2[c * hidden..(c + 1) * hidden];
            for k in 0..hidden {
                g2_row[k] += dz[c] * h[k];
                dh[k] += dz[c] * w2_row[k];
            }
        }
        // ReLU gate: h[k] > 0 exactly when the pre-activation was positive.
        for k in 0..hidden {
            if h[k] <= 0.0 {
                dh[k] = 0.0;
            }
        }
        for (gk, dk) in grad.b1.iter_mut().zip(&dh) {
            *gk += dk;
        }
        for &(j, v) in x.entries() {
            let g1_row = &mut grad.w1[j * hidden..(j + 1) * hidden];
            for (gk, dk) in g1_row.iter_mut().zip(&dh) {
                *gk += v * dk;
            }
        }
    }
    (total / n, grad)
}

fn log_sum_exp(z: &[f64; NUM_CLASSES]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + z.iter().map(|&v| (v - max).exp()).sum::<f64>().ln()
}

/// Seeded uniform init in +-1/sqrt(fan_in); biases zero.
pub(super) fn init(config: &MlpConfig, seed: u64, vocab_size: usize) -> MlpModel {
    let mut rng = Rng::from_seed(seed);
    let mut uniform = |bound: f64, len: usize| -> Vec<f64> {
        (0..len)
            .map(|_| (2.0 * rng.next_f64() - 1.0) * bound)
            .collect()
    };
    let w1 = uniform(1.0 / (vocab_size as f64).sqrt(), vocab_size * config.hidden);
    let w2 = uniform(1.0 / (config.hidden as f64).sqrt(), NUM_CLASSES * config.hidden);
    MlpModel {
        hidden: config.hidden,
        w1,
        b1: vec![0.0; config.hidden],
        w2,
        b2: vec![0.0; NUM_CLASSES],
    }
}

pub(super) fn fit(
    config: &MlpConfig,
    seed: u64,
    docs: &[SparseVector],
    labels: &[usize],
    vocab_size: usize,
) -> MlpModel {
    let mut model = init(config, seed, vocab_size);
    for _ in 0..config.epochs {
        let (_, grad) = mlp_loss_and_gradient(&model, docs, labels);
        let lr = config.learning_rate;
        for (w, g) in model.w1.iter_mut().zip(&grad.w1) {
            *w -= lr * g;
        }
        for (w, g) in model.b1.iter_mut().zip(&grad.b1) {
            *w -= lr * g;
        }
        for (w, g) in model.w2.iter_mut().zip(&grad.w2) {
            *w -= lr * g;
        }
        for (w, g) in model.b2.iter_mut().zip(&grad.b2) {
            *w -= lr * g;
        }
    }
    model
}
