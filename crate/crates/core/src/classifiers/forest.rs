//! Random forest of Gini-impurity decision trees.
//!
//! Each tree trains on a bootstrap sample of size n, examining
//! `max(1, floor(sqrt(V)))` candidate features per split with midpoint
//! thresholds between consecutive distinct values. Leaves keep class-count
//! histograms; a tree predicts its leaf's distribution and the forest
//! averages the distributions over trees. Per-tree seeds are derived from
//! the model seed by position, so fitting trees in parallel cannot change
//! the result.

use super::ScoreVector;
use crate::mitre::NUM_CLASSES;
use crate::rng::{derive_seed, Rng};
use crate::text::SparseVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub trees: u32,
    /// `None` grows every tree until its leaves are pure.
    pub max_depth: Option<u32>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            trees: 100,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        counts: [u32; NUM_CLASSES],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
    pub root: u32,
}

impl Tree {
    /// Walk the tree; a feature value strictly below the threshold goes
    /// left. Returns the leaf's class distribution.
    fn distribution(&self, features: &SparseVector) -> [f64; NUM_CLASSES] {
        let mut node = &self.nodes[self.root as usize];
        loop {
            match node {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let value = features.get(*feature as usize);
                    let next = if value < *threshold { *left } else { *right };
                    node = &self.nodes[next as usize];
                }
                TreeNode::Leaf { counts } => {
                    let total: u32 = counts.iter().sum();
                    let mut dist = [0.0; NUM_CLASSES];
                    for (d, &c) in dist.iter_mut().zip(counts) {
                        *d = c as f64 / total as f64;
                    }
                    return dist;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
}

impl ForestModel {
    /// Vote fractions: the mean of per-tree leaf distributions. Sums to 1.
    pub fn score(&self, features: &SparseVector) -> ScoreVector {
        let mut votes = [0.0; NUM_CLASSES];
        for tree in &self.trees {
            let dist = tree.distribution(features);
            for (v, d) in votes.iter_mut().zip(dist) {
                *v += d;
            }
        }
        for v in &mut votes {
            *v /= self.trees.len() as f64;
        }
        ScoreVector::new(votes)
    }
}

pub(super) fn fit(
    config: &ForestConfig,
    seed: u64,
    docs: &[SparseVector],
    labels: &[usize],
    vocab_size: usize,
) -> ForestModel {
    let features_per_split = ((vocab_size as f64).sqrt().floor() as usize).max(1);
    let trees = (0..config.trees as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = Rng::from_seed(derive_seed(seed, &[i]));
            let samples: Vec<usize> = (0..docs.len())
                .map(|_| rng.next_below(docs.len() as u64) as usize)
                .collect();
            let mut builder = TreeBuilder {
                docs,
                labels,
                vocab_size,
                features_per_split,
                max_depth: config.max_depth,
                nodes: Vec::new(),
                rng,
            };
            let root = builder.build(samples, 0);
            Tree {
                nodes: builder.nodes,
                root,
            }
        })
        .collect();
    ForestModel { trees }
}

struct TreeBuilder<'a> {
    docs: &'a [SparseVector],
    labels: &'a [usize],
    vocab_size: usize,
    features_per_split: usize,
    max_depth: Option<u32>,
    nodes: Vec<TreeNode>,
    rng: Rng,
}

impl TreeBuilder<'_> {
    fn build(&mut self, samples: Vec<usize>, depth: u32) -> u32 {
        let counts = self.class_counts(&samples);
        let node_total: u32 = counts.iter().sum();
        let pure = counts.iter().any(|&c| c == node_total);
        let depth_capped = self.max_depth.is_some_and(|d| depth >= d);

        if !pure && !depth_capped {
            if let Some((feature, threshold)) = self.best_split(&samples, &counts) {
                let (left_samples, right_samples): (Vec<usize>, Vec<usize>) = samples
                    .iter()
                    .partition(|&&s| self.docs[s].get(feature) < threshold);
                let left = self.build(left_samples, depth + 1);
                let right = self.build(right_samples, depth + 1);
                self.nodes.push(TreeNode::Split {
                    feature: feature as u32,
                    threshold,
                    left,
                    right,
                });
                return self.nodes.len() as u32 - 1;
            }
        }
        self.nodes.push(TreeNode::Leaf { counts });
        self.nodes.len() as u32 - 1
    }

    fn class_counts(&self, samples: &[usize]) -> [u32; NUM_CLASSES] {
        let mut counts = [0u32; NUM_CLASSES];
        for &s in samples {
            counts[self.labels[s]] += 1;
        }
        counts
    }

    /// Lowest weighted Gini impurity over a random feature subset; `None`
    /// when every feature is constant across the node. Features constant
    /// within the node do not count against the subset budget: the walk
    /// continues through a shuffled feature order until it has scored
    /// `features_per_split` splittable candidates or runs out, so a node
    /// that can be split always is.
    fn best_split(
        &mut self,
        samples: &[usize],
        counts: &[u32; NUM_CLASSES],
    ) -> Option<(usize, f64)> {
        let order = self.rng.sample_indices(self.vocab_size, self.vocab_size);
        let total = samples.len();
        let mut useful = 0usize;
        let mut best: Option<(f64, usize, f64)> = None;

        let mut values: Vec<(f64, usize)> = Vec::with_capacity(total);
        for feature in order {
            if useful == self.features_per_split {
                break;
            }
            values.clear();
            values.extend(
                samples
                    .iter()
                    .map(|&s| (self.docs[s].get(feature), self.labels[s])),
            );
            values.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite feature values"));
            if values[0].0 == values[total - 1].0 {
                continue;
            }
            useful += 1;

            let mut left = [0u32; NUM_CLASSES];
            for i in 1..total {
                left[values[i - 1].1] += 1;
                let (prev, cur) = (values[i - 1].0, values[i].0);
                if prev == cur {
                    continue;
                }
                let threshold = (prev + cur) / 2.0;
                // Midpoints of adjacent representable floats can round onto
                // an endpoint; such a boundary no longer separates the node.
                if !(threshold > prev && threshold <= cur) {
                    continue;
                }
                let impurity = weighted_gini(&left, counts, i as u32, total as u32);
                if best.is_none_or(|(g, _, _)| impurity < g) {
                    best = Some((impurity, feature, threshold));
                }
            }
        }
        best.map(|(_, feature, threshold)| (feature, threshold))
    }
}

fn gini(counts: &[u32; NUM_CLASSES], total: u32) -> f64 {
    let mut sum_sq = 0.0;
    for &c in counts {
        let p = c as f64 / total as f64;
        sum_sq += p * p;
    }
    1.0 - sum_sq
}

fn weighted_gini(
    left: &[u32; NUM_CLASSES],
    node: &[u32; NUM_CLASSES],
    left_total: u32,
    total: u32,
) -> f64 {
    let mut right = [0u32; NUM_CLASSES];
    for c in 0..NUM_CLASSES {
        right[c] = node[c] - left[c];
    }
    let right_total = total - left_total;
    (left_total as f64 * gini(left, left_total) + right_total as f64 * gini(&right, right_total))
        / total as f64
}
