//! Tokenization and sparse feature vectors.
//!
//! Requirement text is lowercased and split on non-alphanumeric characters.
//! A vocabulary fitted on training documents assigns dense indices in
//! lexicographic token order, which makes the fit independent of document
//! order and reproducible byte-for-byte. Weighting is either raw term
//! counts (what multinomial Naive Bayes consumes) or smoothed TF-IDF with
//! L2 normalization (the input to the SVM, forest, and neural network).
//!
//! TF-IDF uses `idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1`, so idf >= 1
//! with equality exactly when a token appears in every document. Tokens
//! outside the fitted vocabulary are ignored at prediction time.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("cannot fit a vocabulary on an empty document list")]
    EmptyCorpus,
    #[error("no token meets min_doc_frequency {0}; vocabulary would be empty")]
    EmptyVocabulary(u32),
}

/// Term weighting mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Counts,
    Tfidf,
}

/// Vectorizer options, snapshotted into the fitted vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorizerConfig {
    pub min_doc_frequency: u32,
    pub weighting: Weighting,
    pub lowercase: bool,
}

impl Default for VectorizerConfig {
    fn default() -> Self {
        VectorizerConfig {
            min_doc_frequency: 1,
            weighting: Weighting::Tfidf,
            lowercase: true,
        }
    }
}

impl VectorizerConfig {
    /// Tokenize `text` under this configuration.
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        tokenize_with(text, self.lowercase)
    }
}

/// Lowercase, split on every non-alphanumeric character, drop empty pieces.
/// Single-character tokens are kept.
pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_with(text, true)
}

fn tokenize_with(text: &str, lowercase: bool) -> Vec<String> {
    let text = if lowercase {
        text.to_lowercase()
    } else {
        text.to_string()
    };
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|piece| !piece.is_empty())
        .map(str::to_string)
        .collect()
}

/// A fitted token space: token -> dense index plus document frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    doc_frequency: Vec<u32>,
    n_docs: usize,
    config: VectorizerConfig,
}

impl Vocabulary {
    /// Fit on tokenized documents. Tokens below `min_doc_frequency` are
    /// dropped; indices are assigned in lexicographic token order.
    pub fn fit(docs: &[Vec<String>], config: VectorizerConfig) -> Result<Vocabulary, TextError> {
        if docs.is_empty() {
            return Err(TextError::EmptyCorpus);
        }
        let mut df: BTreeMap<&str, u32> = BTreeMap::new();
        for doc in docs {
            let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for token in seen {
                *df.entry(token).or_insert(0) += 1;
            }
        }
        let mut tokens = Vec::new();
        let mut doc_frequency = Vec::new();
        for (token, count) in df {
            if count >= config.min_doc_frequency {
                tokens.push(token.to_string());
                doc_frequency.push(count);
            }
        }
        if tokens.is_empty() {
            return Err(TextError::EmptyVocabulary(config.min_doc_frequency));
        }
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocabulary {
            tokens,
            index,
            doc_frequency,
            n_docs: docs.len(),
            config,
        })
    }

    /// Rebuild from serialized parts, revalidating the invariants.
    pub fn from_parts(
        tokens: Vec<String>,
        doc_frequency: Vec<u32>,
        n_docs: usize,
        config: VectorizerConfig,
    ) -> Result<Vocabulary, String> {
        if tokens.is_empty() {
            return Err("vocabulary has no tokens".into());
        }
        if tokens.len() != doc_frequency.len() {
            return Err(format!(
                "{} tokens but {} doc frequencies",
                tokens.len(),
                doc_frequency.len()
            ));
        }
        if !tokens.windows(2).all(|w| w[0] < w[1]) {
            return Err("tokens are not strictly sorted".into());
        }
        for (token, &df) in tokens.iter().zip(&doc_frequency) {
            if df == 0 || df as usize > n_docs {
                return Err(format!("token `{token}` has doc frequency {df} of {n_docs} docs"));
            }
        }
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocabulary {
            tokens,
            index,
            doc_frequency,
            n_docs,
            config,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn config(&self) -> &VectorizerConfig {
        &self.config
    }

    /// Tokens in index order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn doc_frequencies(&self) -> &[u32] {
        &self.doc_frequency
    }

    pub fn token_index(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Smoothed inverse document frequency for the token at `index`.
    pub fn idf(&self, index: usize) -> f64 {
        let df = self.doc_frequency[index] as f64;
        ((1.0 + self.n_docs as f64) / (1.0 + df)).ln() + 1.0
    }

    /// Tokenize and vectorize raw text under the fitted configuration.
    pub fn vectorize_text(&self, text: &str) -> SparseVector {
        self.vectorize(&self.config.tokenize(text))
    }

    /// Vectorize a tokenized document under the configured weighting.
    pub fn vectorize(&self, doc: &[String]) -> SparseVector {
        match self.config.weighting {
            Weighting::Counts => self.vectorize_counts(doc),
            Weighting::Tfidf => self.vectorize_tfidf(doc),
        }
    }

    /// Raw in-vocabulary term counts, regardless of the configured
    /// weighting. Multinomial Naive Bayes is defined over counts and uses
    /// this path unconditionally.
    pub fn vectorize_counts(&self, doc: &[String]) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for token in doc {
            if let Some(i) = self.token_index(token) {
                *counts.entry(i).or_insert(0.0) += 1.0;
            }
        }
        SparseVector {
            entries: counts.into_iter().collect(),
            dim: self.len(),
        }
    }

    fn vectorize_tfidf(&self, doc: &[String]) -> SparseVector {
        let mut vector = self.vectorize_counts(doc);
        for (index, weight) in &mut vector.entries {
            *weight *= self.idf(*index);
        }
        vector.l2_normalize();
        vector
    }
}

/// Sparse non-negative feature vector; indices strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
    dim: usize,
}

impl SparseVector {
    pub fn new(entries: Vec<(usize, f64)>, dim: usize) -> SparseVector {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(i, w)| i < dim && w > 0.0));
        SparseVector { entries, dim }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value at `index` (0.0 when absent).
    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, w)| w * w)
            .sum::<f64>()
            .sqrt()
    }

    fn l2_normalize(&mut self) {
        let norm = self.l2_norm();
        if norm > 0.0 {
            for (_, w) in &mut self.entries {
                *w /= norm;
            }
        }
    }

    /// Dot product against a dense weight slice of length `dim`.
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, w)| w * dense[i]).sum()
    }
}
