//! Confusion matrix, accuracy, precision, recall, and F1.
//!
//! Micro averages pool true/false positives over all classes; in
//! single-label multiclass work that makes micro precision, micro recall,
//! micro F1, and accuracy one and the same number, which is why result
//! tables here show four equal columns per row. Macro averages are the
//! unweighted mean over the classes present in the gold or predicted
//! labels, and per-class numbers are reported for all five classes.
//! Zero-denominator cases score 0 rather than NaN.

use crate::mitre::{ClassCode, NUM_CLASSES};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("gold has {gold} labels but predictions have {pred}")]
    LengthMismatch { gold: usize, pred: usize },
    #[error("cannot evaluate zero label pairs")]
    EmptyInput,
}

/// 5x5 count matrix; rows are gold classes, columns are predictions.
/// Serializes as the bare nested array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfusionMatrix {
    counts: [[u64; NUM_CLASSES]; NUM_CLASSES],
}

impl ConfusionMatrix {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (ClassCode, ClassCode)>) -> ConfusionMatrix {
        let mut counts = [[0u64; NUM_CLASSES]; NUM_CLASSES];
        for (gold, pred) in pairs {
            counts[gold.index()][pred.index()] += 1;
        }
        ConfusionMatrix { counts }
    }

    pub fn count(&self, gold: ClassCode, pred: ClassCode) -> u64 {
        self.counts[gold.index()][pred.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..NUM_CLASSES).map(|i| self.counts[i][i]).sum()
    }

    pub fn true_positives(&self, class: ClassCode) -> u64 {
        self.counts[class.index()][class.index()]
    }

    /// Gold occurrences of `class` (row sum).
    pub fn support(&self, class: ClassCode) -> u64 {
        self.counts[class.index()].iter().sum()
    }

    /// Predicted occurrences of `class` (column sum).
    pub fn predicted(&self, class: ClassCode) -> u64 {
        (0..NUM_CLASSES)
            .map(|row| self.counts[row][class.index()])
            .sum()
    }

    pub fn false_positives(&self, class: ClassCode) -> u64 {
        self.predicted(class) - self.true_positives(class)
    }

    pub fn false_negatives(&self, class: ClassCode) -> u64 {
        self.support(class) - self.true_positives(class)
    }

    pub fn rows(&self) -> &[[u64; NUM_CLASSES]; NUM_CLASSES] {
        &self.counts
    }
}

/// Precision/recall/F1 triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfScores {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
}

/// Per-class metrics with the class's gold support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
    pub support: u64,
}

/// Full evaluation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub micro: PrfScores,
    #[serde(rename = "macro")]
    pub macro_avg: PrfScores,
    pub per_class: BTreeMap<ClassCode, ClassMetrics>,
    pub confusion: ConfusionMatrix,
}

impl EvalReport {
    /// Precision was 0/0 for this class: nothing was predicted as it.
    pub fn precision_undefined(&self, class: ClassCode) -> bool {
        self.confusion.predicted(class) == 0
    }

    /// Recall was 0/0 for this class: it never occurs in gold.
    pub fn recall_undefined(&self, class: ClassCode) -> bool {
        self.confusion.support(class) == 0
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else if p == r {
        // Harmonic mean of equal values is the value; taking this exact
        // route keeps the micro identity (p = r = f1 = accuracy) bit-true.
        p
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Score predictions against gold labels.
pub fn evaluate(gold: &[ClassCode], pred: &[ClassCode]) -> Result<EvalReport, MetricsError> {
    if gold.len() != pred.len() {
        return Err(MetricsError::LengthMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    if gold.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let confusion = ConfusionMatrix::from_pairs(gold.iter().copied().zip(pred.iter().copied()));
    let total = confusion.total();
    let accuracy = ratio(confusion.trace(), total);

    let mut per_class = BTreeMap::new();
    let mut macro_sums = (0.0, 0.0, 0.0);
    let mut macro_classes = 0u32;
    let mut pooled_tp = 0u64;
    let mut pooled_fp = 0u64;
    let mut pooled_fn = 0u64;
    for class in ClassCode::ALL {
        let tp = confusion.true_positives(class);
        let fp = confusion.false_positives(class);
        let fn_ = confusion.false_negatives(class);
        pooled_tp += tp;
        pooled_fp += fp;
        pooled_fn += fn_;
        let p = ratio(tp, tp + fp);
        let r = ratio(tp, tp + fn_);
        let f = f1(p, r);
        per_class.insert(
            class,
            ClassMetrics {
                p,
                r,
                f1: f,
                support: confusion.support(class),
            },
        );
        // Macro averages cover the classes present in gold or predictions.
        if confusion.support(class) > 0 || confusion.predicted(class) > 0 {
            macro_sums.0 += p;
            macro_sums.1 += r;
            macro_sums.2 += f;
            macro_classes += 1;
        }
    }
    let macro_avg = PrfScores {
        p: macro_sums.0 / macro_classes as f64,
        r: macro_sums.1 / macro_classes as f64,
        f1: macro_sums.2 / macro_classes as f64,
    };
    let micro = PrfScores {
        p: ratio(pooled_tp, pooled_tp + pooled_fp),
        r: ratio(pooled_tp, pooled_tp + pooled_fn),
        f1: {
            let p = ratio(pooled_tp, pooled_tp + pooled_fp);
            let r = ratio(pooled_tp, pooled_tp + pooled_fn);
            f1(p, r)
        },
    };
    Ok(EvalReport {
        accuracy,
        micro,
        macro_avg,
        per_class,
        confusion,
    })
}

/// Output style for [`format_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportStyle {
    Text,
    Csv,
    Json,
}

/// Round half-up to two decimals and render with exactly two digits,
/// normalizing mixed table formats like ".5" and ".47" to "0.50"/"0.47".
pub fn format_metric(value: f64) -> String {
    let cents = (value * 100.0).round() as i64;
    format!("{}.{:02}", cents / 100, (cents % 100).abs())
}

/// Render a report. Text mimics the published table shape (metric columns
/// Accuracy, Recall, F-1 Score, Precision, two decimals); CSV is a
/// `metric,value` listing at the same precision; JSON is the full-precision
/// wire schema.
pub fn format_report(report: &EvalReport, style: ReportStyle) -> String {
    match style {
        ReportStyle::Json => serde_json::to_string_pretty(report).expect("report serializes"),
        ReportStyle::Csv => {
            let mut out = String::from("metric,value\n");
            let mut push = |name: &str, value: f64| {
                let _ = writeln!(out, "{name},{}", format_metric(value));
            };
            push("accuracy", report.accuracy);
            push("micro_recall", report.micro.r);
            push("micro_f1", report.micro.f1);
            push("micro_precision", report.micro.p);
            push("macro_recall", report.macro_avg.r);
            push("macro_f1", report.macro_avg.f1);
            push("macro_precision", report.macro_avg.p);
            for (class, m) in &report.per_class {
                push(&format!("{class}_recall"), m.r);
                push(&format!("{class}_f1"), m.f1);
                push(&format!("{class}_precision"), m.p);
            }
            out
        }
        ReportStyle::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "Average | Accuracy | Recall | F-1 Score | Precision");
            let _ = writeln!(
                out,
                "Micro | {} | {} | {} | {}",
                format_metric(report.accuracy),
                format_metric(report.micro.r),
                format_metric(report.micro.f1),
                format_metric(report.micro.p),
            );
            let _ = writeln!(
                out,
                "Macro | {} | {} | {} | {}",
                format_metric(report.accuracy),
                format_metric(report.macro_avg.r),
                format_metric(report.macro_avg.f1),
                format_metric(report.macro_avg.p),
            );
            let _ = writeln!(out);
            let _ = writeln!(out, "Class | Recall | F-1 Score | Precision | Support");
            for (class, m) in &report.per_class {
                let _ = writeln!(
                    out,
                    "{class} | {} | {} | {} | {}",
                    format_metric(m.r),
                    format_metric(m.f1),
                    format_metric(m.p),
                    m.support,
                );
            }
            let _ = writeln!(out);
            let _ = writeln!(out, "Confusion (rows = gold, columns = predicted):");
            let header: Vec<&str> = ClassCode::ALL.iter().map(|c| c.as_str()).collect();
            let _ = writeln!(out, "      {}", header.join("    "));
            for gold in ClassCode::ALL {
                let row: Vec<String> = ClassCode::ALL
                    .iter()
                    .map(|&pred| format!("{:>4}", report.confusion.count(gold, pred)))
                    .collect();
                let _ = writeln!(out, "{gold}  {}", row.join("  "));
            }
            out
        }
    }
}
