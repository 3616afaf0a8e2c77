//! Requirement corpus model and CSV ingestion.
//!
//! A corpus is an ordered list of `(id, text, class)` records loaded from an
//! RFC 4180 CSV file with the exact header `id,text,label`. Labels may be
//! class codes (`C1`..`C5`, case-insensitive) or tactic names, which are
//! resolved through [`group_tactic`]. Rows labeled with an ungrouped tactic
//! (reconnaissance, discovery) are hard errors rather than silently dropped,
//! so the record count always matches the file.

use crate::mitre::{group_tactic, ClassCode, MitreTactic, NUM_CLASSES};
use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid CSV at {path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("missing column `{0}` (header must be `{1}`)")]
    MissingColumn(&'static str, &'static str),
    #[error("unexpected column `{0}` (header must be `{1}`)")]
    UnexpectedColumn(String, &'static str),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("row {0}: empty text")]
    EmptyText(usize),
    #[error("row {0}: empty id")]
    EmptyId(usize),
    #[error("row {row}: unknown label `{value}` (expected C1..C5 or a tactic name)")]
    UnknownLabel { row: usize, value: String },
    #[error("row {row}: tactic `{tactic}` belongs to no class and cannot be used as a label")]
    UngroupedTactic { row: usize, tactic: MitreTactic },
    #[error("corpus is empty")]
    EmptyCorpus,
}

/// A single functional requirement: a unique id and its text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub id: String,
    pub text: String,
}

impl Requirement {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Requirement {
        Requirement {
            id: id.into(),
            text: text.into(),
        }
    }
}

/// A requirement together with its class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledRecord {
    pub requirement: Requirement,
    pub label: ClassCode,
}

impl LabeledRecord {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: ClassCode) -> LabeledRecord {
        LabeledRecord {
            requirement: Requirement::new(id, text),
            label,
        }
    }
}

/// Ordered collection of labeled requirements. Immutable after construction;
/// record order is file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCorpus {
    records: Vec<LabeledRecord>,
}

impl LabeledCorpus {
    /// Build a corpus, enforcing unique ids and non-empty trimmed fields.
    pub fn new(records: Vec<LabeledRecord>) -> Result<LabeledCorpus, CorpusError> {
        let mut seen = HashSet::with_capacity(records.len());
        for (i, record) in records.iter().enumerate() {
            let row = i + 1;
            if record.requirement.id.trim().is_empty() {
                return Err(CorpusError::EmptyId(row));
            }
            if record.requirement.text.trim().is_empty() {
                return Err(CorpusError::EmptyText(row));
            }
            if !seen.insert(record.requirement.id.as_str()) {
                return Err(CorpusError::DuplicateId(record.requirement.id.clone()));
            }
        }
        Ok(LabeledCorpus { records })
    }

    pub fn records(&self) -> &[LabeledRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.requirement.text.as_str())
    }

    pub fn labels(&self) -> impl Iterator<Item = ClassCode> + '_ {
        self.records.iter().map(|r| r.label)
    }

    /// Per-class record counts, indexable by [`ClassCode::index`]. Absent
    /// classes report 0; counts always sum to the corpus length.
    pub fn class_distribution(&self) -> Result<ClassDistribution, CorpusError> {
        if self.records.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        let mut counts = [0usize; NUM_CLASSES];
        for record in &self.records {
            counts[record.label.index()] += 1;
        }
        Ok(ClassDistribution { counts })
    }
}

/// Record counts per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassDistribution {
    counts: [usize; NUM_CLASSES],
}

impl ClassDistribution {
    pub fn count(&self, class: ClassCode) -> usize {
        self.counts[class.index()]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClassCode, usize)> + '_ {
        ClassCode::ALL.iter().map(|&c| (c, self.counts[c.index()]))
    }
}

impl fmt::Display for ClassDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(c, n)| format!("{c}: {n}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Ingestion options for [`load_corpus`] and [`load_requirements`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestConfig {
    /// Trim surrounding whitespace from every field before validation.
    /// Hand-built spreadsheets routinely carry stray spaces.
    pub trim: bool,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig { trim: true }
    }
}

const LABELED_HEADER: &str = "id,text,label";
const UNLABELED_HEADER: &str = "id,text";

fn check_header(
    found: &csv::StringRecord,
    expected: &'static [&'static str],
    expected_str: &'static str,
) -> Result<(), CorpusError> {
    let found: Vec<&str> = found.iter().map(|f| f.trim()).collect();
    for &col in expected {
        if !found.contains(&col) {
            return Err(CorpusError::MissingColumn(col, expected_str));
        }
    }
    for &col in &found {
        if !expected.contains(&col) {
            return Err(CorpusError::UnexpectedColumn(col.to_string(), expected_str));
        }
    }
    if found != expected {
        // Same column set in the wrong order.
        return Err(CorpusError::UnexpectedColumn(
            found.join(","),
            expected_str,
        ));
    }
    Ok(())
}

/// Resolve a label cell: a class code, or a tactic name mapped through its
/// class grouping.
fn parse_label(value: &str, row: usize) -> Result<ClassCode, CorpusError> {
    if let Some(code) = ClassCode::parse(value) {
        return Ok(code);
    }
    if let Some(tactic) = MitreTactic::parse(value) {
        return match group_tactic(tactic) {
            Some(code) => Ok(code),
            None => Err(CorpusError::UngroupedTactic { row, tactic }),
        };
    }
    Err(CorpusError::UnknownLabel {
        row,
        value: value.to_string(),
    })
}

/// Load a labeled corpus from a CSV file with header `id,text,label`.
/// Row numbers in errors count data rows from 1.
pub fn load_corpus(path: impl AsRef<Path>, config: IngestConfig) -> Result<LabeledCorpus, CorpusError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| wrap_csv(e, &display))?;
    let headers = reader
        .headers()
        .map_err(|e| wrap_csv(e, &display))?
        .clone();
    check_header(&headers, &["id", "text", "label"], LABELED_HEADER)?;

    let mut records = Vec::new();
    for (i, result) in reader.records().enumerate() {
        let row = i + 1;
        let record = result.map_err(|e| wrap_csv(e, &display))?;
        let field = |j: usize| {
            let raw = record.get(j).unwrap_or("");
            if config.trim {
                raw.trim()
            } else {
                raw
            }
        };
        let id = field(0);
        let text = field(1);
        let label = field(2);
        if id.is_empty() {
            return Err(CorpusError::EmptyId(row));
        }
        if text.is_empty() {
            return Err(CorpusError::EmptyText(row));
        }
        let label = parse_label(label, row)?;
        records.push(LabeledRecord::new(id, text, label));
    }
    LabeledCorpus::new(records)
}

/// Load unlabeled requirements from a CSV file with header `id,text`
/// (the input format of the recommender).
pub fn load_requirements(
    path: impl AsRef<Path>,
    config: IngestConfig,
) -> Result<Vec<Requirement>, CorpusError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| wrap_csv(e, &display))?;
    let headers = reader
        .headers()
        .map_err(|e| wrap_csv(e, &display))?
        .clone();
    check_header(&headers, &["id", "text"], UNLABELED_HEADER)?;

    let mut requirements = Vec::new();
    let mut seen = HashSet::new();
    for (i, result) in reader.records().enumerate() {
        let row = i + 1;
        let record = result.map_err(|e| wrap_csv(e, &display))?;
        let field = |j: usize| {
            let raw = record.get(j).unwrap_or("");
            if config.trim {
                raw.trim()
            } else {
                raw
            }
        };
        let id = field(0);
        let text = field(1);
        if id.is_empty() {
            return Err(CorpusError::EmptyId(row));
        }
        if text.is_empty() {
            return Err(CorpusError::EmptyText(row));
        }
        if !seen.insert(id.to_string()) {
            return Err(CorpusError::DuplicateId(id.to_string()));
        }
        requirements.push(Requirement::new(id, text));
    }
    Ok(requirements)
}

fn wrap_csv(e: csv::Error, path: &str) -> CorpusError {
    if let csv::ErrorKind::Io(_) = e.kind() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CorpusError::Io {
                path: path.to_string(),
                source: io,
            },
            _ => unreachable!(),
        }
    } else {
        CorpusError::Csv {
            path: path.to_string(),
            source: e,
        }
    }
}

/// Write a corpus back to CSV (header `id,text,label`, labels as class
/// codes, RFC 4180 quoting). `load_corpus` of the output reproduces the
/// input corpus exactly.
pub fn save_corpus(corpus: &LabeledCorpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let mut writer = csv::Writer::from_path(path).map_err(|e| wrap_csv(e, &display))?;
    writer
        .write_record(["id", "text", "label"])
        .map_err(|e| wrap_csv(e, &display))?;
    for record in corpus.records() {
        writer
            .write_record([
                record.requirement.id.as_str(),
                record.requirement.text.as_str(),
                record.label.as_str(),
            ])
            .map_err(|e| wrap_csv(e, &display))?;
    }
    writer.flush().map_err(|e| CorpusError::Io {
        path: display,
        source: e,
    })?;
    Ok(())
}
