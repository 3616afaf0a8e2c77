//! Property tests for the library's cross-module invariants.

use proptest::collection::vec;
use proptest::prelude::*;
use reqmapper::corpus::{load_corpus, save_corpus, IngestConfig, LabeledCorpus, LabeledRecord};
use reqmapper::metrics::evaluate;
use reqmapper::mitre::ClassCode;
use reqmapper::split::{train_test_split, SplitConfig};
use reqmapper::text::{tokenize, VectorizerConfig, Vocabulary};

fn class_strategy() -> impl Strategy<Value = ClassCode> {
    (0usize..5).prop_map(|i| ClassCode::from_index(i).unwrap())
}

/// Printable text with CSV-hostile characters mixed in. The leading token
/// keeps the text non-empty after trimming.
fn text_strategy() -> impl Strategy<Value = String> {
    vec(
        prop_oneof![
            "[a-zA-Z0-9 ]{1,8}",
            Just(",".to_string()),
            Just("\"".to_string()),
            Just("\n".to_string()),
        ],
        1..6,
    )
    .prop_map(|parts| format!("t{}", parts.join("x")))
}

fn corpus_strategy(max: usize) -> impl Strategy<Value = LabeledCorpus> {
    vec((text_strategy(), class_strategy()), 1..max).prop_map(|rows| {
        LabeledCorpus::new(
            rows.into_iter()
                .enumerate()
                .map(|(i, (text, label))| LabeledRecord::new(format!("id{i}"), text, label))
                .collect(),
        )
        .expect("generated corpus is valid")
    })
}

proptest! {
    /// Writing a corpus and reading it back reproduces the records even
    /// with embedded commas, quotes, and newlines.
    #[test]
    fn corpus_csv_round_trips(corpus in corpus_strategy(20)) {
        let file = tempfile::NamedTempFile::new().unwrap();
        save_corpus(&corpus, file.path()).unwrap();
        let reloaded = load_corpus(file.path(), IngestConfig { trim: false }).unwrap();
        prop_assert_eq!(reloaded, corpus);
    }

    /// Split halves always partition the corpus with exact floor sizing.
    #[test]
    fn split_partitions_with_floor_size(
        labels in vec(class_strategy(), 2..120),
        fraction in 0.05f64..0.95,
        seed in any::<u64>(),
        stratified in any::<bool>(),
    ) {
        let corpus = LabeledCorpus::new(
            labels
                .iter()
                .enumerate()
                .map(|(i, &label)| LabeledRecord::new(format!("id{i}"), format!("text {i}"), label))
                .collect(),
        )
        .unwrap();
        let n = corpus.len();
        let expected_train = (fraction * n as f64).floor() as usize;
        prop_assume!(expected_train >= 1 && expected_train < n);

        let config = SplitConfig { train_fraction: fraction, seed, stratified };
        let result = match train_test_split(&corpus, &config) {
            Ok(result) => result,
            // Stratified allocation can be infeasible on tiny skewed
            // corpora; that is a documented error, not a law violation.
            Err(_) if stratified => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        };
        prop_assert_eq!(result.train.len(), expected_train);
        prop_assert_eq!(result.train.len() + result.test.len(), n);

        let mut ids: Vec<&str> = result
            .train
            .records()
            .iter()
            .chain(result.test.records())
            .map(|r| r.requirement.id.as_str())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        prop_assert_eq!(ids.len(), n);
    }

    /// Micro averages equal accuracy exactly, for any gold/pred pair.
    #[test]
    fn micro_equals_accuracy(
        pairs in vec((class_strategy(), class_strategy()), 1..80),
    ) {
        let gold: Vec<ClassCode> = pairs.iter().map(|p| p.0).collect();
        let pred: Vec<ClassCode> = pairs.iter().map(|p| p.1).collect();
        let report = evaluate(&gold, &pred).unwrap();
        prop_assert_eq!(report.micro.p, report.accuracy);
        prop_assert_eq!(report.micro.r, report.accuracy);
        prop_assert_eq!(report.micro.f1, report.accuracy);
    }

    /// Jointly permuting (gold, pred) pairs changes no metric.
    #[test]
    fn metrics_are_permutation_invariant(
        pairs in vec((class_strategy(), class_strategy()), 2..60),
        seed in any::<u64>(),
    ) {
        let gold: Vec<ClassCode> = pairs.iter().map(|p| p.0).collect();
        let pred: Vec<ClassCode> = pairs.iter().map(|p| p.1).collect();
        let report = evaluate(&gold, &pred).unwrap();

        let mut shuffled = pairs.clone();
        reqmapper::rng::Rng::from_seed(seed).shuffle(&mut shuffled);
        let gold2: Vec<ClassCode> = shuffled.iter().map(|p| p.0).collect();
        let pred2: Vec<ClassCode> = shuffled.iter().map(|p| p.1).collect();
        let report2 = evaluate(&gold2, &pred2).unwrap();
        prop_assert_eq!(report.accuracy, report2.accuracy);
        prop_assert_eq!(report.micro, report2.micro);
        prop_assert_eq!(report.macro_avg, report2.macro_avg);
        prop_assert_eq!(report.per_class, report2.per_class);
    }

    /// Per-class F1 lies between that class's precision and recall.
    #[test]
    fn f1_bounded_by_p_and_r(
        pairs in vec((class_strategy(), class_strategy()), 1..60),
    ) {
        let gold: Vec<ClassCode> = pairs.iter().map(|p| p.0).collect();
        let pred: Vec<ClassCode> = pairs.iter().map(|p| p.1).collect();
        let report = evaluate(&gold, &pred).unwrap();
        for class in ClassCode::ALL {
            let m = report.per_class[&class];
            prop_assert!(m.f1 >= m.p.min(m.r) - 1e-12);
            prop_assert!(m.f1 <= m.p.max(m.r) + 1e-12);
        }
    }

    /// Document order never changes the fitted vocabulary.
    #[test]
    fn vocabulary_is_document_order_free(
        texts in vec("[a-z]{1,4}( [a-z]{1,4}){0,5}", 1..15),
        seed in any::<u64>(),
    ) {
        let docs: Vec<Vec<String>> = texts.iter().map(|t| tokenize(t)).collect();
        let forward = Vocabulary::fit(&docs, VectorizerConfig::default()).unwrap();

        let mut shuffled = docs.clone();
        reqmapper::rng::Rng::from_seed(seed).shuffle(&mut shuffled);
        let permuted = Vocabulary::fit(&shuffled, VectorizerConfig::default()).unwrap();
        prop_assert_eq!(forward, permuted);
    }

    /// Non-empty TF-IDF vectors are unit length; idf never drops below 1.
    #[test]
    fn tfidf_vectors_are_unit_norm(
        texts in vec("[a-z]{1,3}( [a-z]{1,3}){0,6}", 1..12),
        probe in "[a-z]{1,3}( [a-z]{1,3}){0,6}",
    ) {
        let docs: Vec<Vec<String>> = texts.iter().map(|t| tokenize(t)).collect();
        let vocab = Vocabulary::fit(&docs, VectorizerConfig::default()).unwrap();
        for i in 0..vocab.len() {
            prop_assert!(vocab.idf(i) >= 1.0);
        }
        let vector = vocab.vectorize_text(&probe);
        if !vector.is_empty() {
            prop_assert!((vector.l2_norm() - 1.0).abs() < 1e-9);
        }
    }

    /// Class distribution counts always sum to the corpus length.
    #[test]
    fn class_distribution_sums_to_length(corpus in corpus_strategy(40)) {
        let dist = corpus.class_distribution().unwrap();
        prop_assert_eq!(dist.total(), corpus.len());
        let sum: usize = ClassCode::ALL.iter().map(|&c| dist.count(c)).sum();
        prop_assert_eq!(sum, corpus.len());
    }
}
