//! Command-line front end: validate, split, train, eval, sweep, recommend.
//!
//! Exit codes: 0 on success, 1 on user errors (bad flags or inputs), 2 on
//! internal faults. Results go to stdout; diagnostics and logging go to
//! stderr, so piped JSON stays clean. Set REQMAPPER_LOG={error|info|debug}
//! for verbosity. Seeds default to the fixed constant 42 so plain runs
//! reproduce; pass `--seed random` to opt into entropy.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use reqmapper::classifiers::{load_model, save_model};
use reqmapper::corpus::{load_corpus, load_requirements, save_corpus, IngestConfig};
use reqmapper::experiment::{run_sweep, write_outputs, OutputFormat, SweepConfig};
use reqmapper::metrics::{evaluate, format_report, ReportStyle};
use reqmapper::mitre::ClassCode;
use reqmapper::recommend::{to_jsonl, to_text, Recommender};
use reqmapper::split::{train_test_split, SplitConfig};
use reqmapper::text::{VectorizerConfig, Vocabulary, Weighting};
use reqmapper::{fit, Algorithm, ClassifierSpec, LabeledCorpus};
use std::fmt::Write as _;
use std::hash::{BuildHasher, Hasher};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "reqmapper",
    version,
    about = "Map software functional requirements to grouped MITRE ATT&CK tactic classes"
)]
struct Cli {
    /// Cap the number of worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

/// A fixed seed, or `random` for entropy.
#[derive(Debug, Clone, Copy)]
enum Seed {
    Fixed(u64),
    Random,
}

impl Seed {
    fn resolve(self) -> u64 {
        match self {
            Seed::Fixed(seed) => seed,
            Seed::Random => {
                // System-entropy-seeded hasher; good enough for a run seed.
                let state = std::collections::hash_map::RandomState::new();
                state.build_hasher().finish()
            }
        }
    }
}

fn parse_seed(s: &str) -> Result<Seed, String> {
    if s.eq_ignore_ascii_case("random") {
        return Ok(Seed::Random);
    }
    s.parse::<u64>()
        .map(Seed::Fixed)
        .map_err(|_| format!("`{s}` is not an unsigned 64-bit seed (or `random`)"))
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    Algorithm::parse(s).ok_or_else(|| {
        format!("`{s}` is not a known algorithm; valid algorithms: nb, svm, rf, mlp")
    })
}

fn parse_weighting(s: &str) -> Result<Weighting, String> {
    match s.to_lowercase().as_str() {
        "tfidf" => Ok(Weighting::Tfidf),
        "counts" => Ok(Weighting::Counts),
        _ => Err(format!("`{s}` is not a weighting; valid: tfidf, counts")),
    }
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let f: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a fraction"))?;
    if f > 0.0 && f < 1.0 {
        Ok(f)
    } else {
        Err(format!("fraction {f} must lie strictly between 0 and 1"))
    }
}

#[derive(Args)]
struct VectorizerArgs {
    /// Term weighting for the fitted vocabulary.
    #[arg(long, default_value = "tfidf", value_parser = parse_weighting)]
    weighting: Weighting,

    /// Drop tokens appearing in fewer than this many documents.
    #[arg(long, default_value_t = 1, value_name = "N")]
    min_df: u32,
}

impl VectorizerArgs {
    fn config(&self) -> VectorizerConfig {
        VectorizerConfig {
            min_doc_frequency: self.min_df.max(1),
            weighting: self.weighting,
            lowercase: true,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a corpus CSV and report its statistics.
    Validate {
        /// Corpus CSV with header `id,text,label`.
        #[arg(long)]
        input: PathBuf,
        /// Output format: text or json.
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Split a corpus into train/test CSV files.
    Split {
        #[arg(long)]
        input: PathBuf,
        /// Fraction of records for the training half, in (0, 1).
        #[arg(long, value_name = "F")]
        train_fraction: f64,
        #[arg(long, default_value = "42", value_parser = parse_seed)]
        seed: Seed,
        /// Split each class separately.
        #[arg(long)]
        stratified: bool,
        /// Directory receiving train.csv and test.csv.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train a classifier and save the model file.
    Train {
        /// Algorithm: nb, svm, rf, or mlp.
        #[arg(long, value_parser = parse_algorithm)]
        algo: Algorithm,
        #[arg(long)]
        input: PathBuf,
        /// Optional: train on a seeded split of this fraction instead of
        /// the whole corpus.
        #[arg(long, value_name = "F")]
        train_fraction: Option<f64>,
        #[arg(long, default_value = "42", value_parser = parse_seed)]
        seed: Seed,
        #[arg(long)]
        stratified: bool,
        /// Output model path (JSON).
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        vectorizer: VectorizerArgs,
    },
    /// Evaluate a saved model against a labeled corpus.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Output format: text, csv, or json.
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Sweep split ratios x algorithms over seeded trials.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated training fractions.
        #[arg(
            long,
            default_value = "0.6,0.7,0.8",
            value_delimiter = ',',
            value_parser = parse_fraction
        )]
        fractions: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        trials: u32,
        #[arg(long, default_value = "42", value_parser = parse_seed)]
        seed: Seed,
        #[arg(long)]
        stratified: bool,
        /// Directory receiving sweep.json, tables, and charts.
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        vectorizer: VectorizerArgs,
    },
    /// Recommend ATT&CK branches for new requirements.
    Recommend {
        #[arg(long)]
        model: PathBuf,
        /// Requirements CSV with header `id,text`.
        #[arg(long)]
        input: PathBuf,
        /// Output format: jsonl or text.
        #[arg(long, default_value = "jsonl")]
        format: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(
        env_logger::Env::new()
            .filter("REQMAPPER_LOG")
            .default_filter_or("error"),
    )
    .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };

    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
        {
            eprintln!("error: could not configure {jobs} worker threads: {e}");
            return ExitCode::from(1);
        }
    }

    match std::panic::catch_unwind(|| run(cli.command)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(panic) => {
            let detail = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unexpected fault".to_string());
            eprintln!("internal error: {detail}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), String> {
    match command {
        Command::Validate { input, format } => {
            let corpus = load_corpus(&input, IngestConfig::default()).map_err(stringify)?;
            let dist = corpus.class_distribution().map_err(stringify)?;
            let config = VectorizerConfig::default();
            let docs: Vec<_> = corpus.texts().map(|t| config.tokenize(t)).collect();
            let vocab = Vocabulary::fit(&docs, config).map_err(stringify)?;
            let tokens: usize = docs.iter().map(|d| d.len()).sum();

            match format.as_str() {
                "json" => {
                    let mut counts = serde_json::Map::new();
                    for (class, count) in dist.iter() {
                        counts.insert(class.to_string(), count.into());
                    }
                    let value = serde_json::json!({
                        "records": corpus.len(),
                        "class_distribution": counts,
                        "distinct_tokens": vocab.len(),
                        "total_tokens": tokens,
                    });
                    println!("{}", serde_json::to_string_pretty(&value).unwrap());
                }
                "text" => {
                    println!("records: {}", corpus.len());
                    println!("class distribution: {dist}");
                    println!("distinct tokens: {}", vocab.len());
                    println!("total tokens: {tokens}");
                }
                other => return Err(format!("unknown format `{other}`; valid: text, json")),
            }
            Ok(())
        }
        Command::Split {
            input,
            train_fraction,
            seed,
            stratified,
            out_dir,
        } => {
            let corpus = load_corpus(&input, IngestConfig::default()).map_err(stringify)?;
            let config = SplitConfig {
                train_fraction,
                seed: seed.resolve(),
                stratified,
            };
            let result = train_test_split(&corpus, &config).map_err(stringify)?;
            std::fs::create_dir_all(&out_dir).map_err(stringify)?;
            let train_path = out_dir.join("train.csv");
            let test_path = out_dir.join("test.csv");
            save_corpus(&result.train, &train_path).map_err(stringify)?;
            save_corpus(&result.test, &test_path).map_err(stringify)?;
            println!(
                "train: {} records -> {}",
                result.train.len(),
                train_path.display()
            );
            println!(
                "test:  {} records -> {}",
                result.test.len(),
                test_path.display()
            );
            Ok(())
        }
        Command::Train {
            algo,
            input,
            train_fraction,
            seed,
            stratified,
            model,
            vectorizer,
        } => {
            let seed = seed.resolve();
            let corpus = load_corpus(&input, IngestConfig::default()).map_err(stringify)?;
            let training: LabeledCorpus = match train_fraction {
                Some(fraction) => {
                    let config = SplitConfig {
                        train_fraction: fraction,
                        seed,
                        stratified,
                    };
                    train_test_split(&corpus, &config).map_err(stringify)?.train
                }
                None => corpus,
            };
            let vector_config = vectorizer.config();
            let docs: Vec<_> = training.texts().map(|t| vector_config.tokenize(t)).collect();
            let vocab = Vocabulary::fit(&docs, vector_config).map_err(stringify)?;
            let spec = ClassifierSpec::with_defaults(algo, seed);
            let trained = fit(&spec, &training, &vocab).map_err(stringify)?;
            save_model(&trained, &model).map_err(stringify)?;
            println!(
                "trained {} on {} records ({} tokens) -> {}",
                algo.display_name(),
                training.len(),
                vocab.len(),
                model.display()
            );
            Ok(())
        }
        Command::Eval {
            model,
            input,
            format,
        } => {
            let style = match format.as_str() {
                "text" => ReportStyle::Text,
                "csv" => ReportStyle::Csv,
                "json" => ReportStyle::Json,
                other => return Err(format!("unknown format `{other}`; valid: text, csv, json")),
            };
            let trained = load_model(&model).map_err(stringify)?;
            let corpus = load_corpus(&input, IngestConfig::default()).map_err(stringify)?;
            let gold: Vec<ClassCode> = corpus.labels().collect();
            let predictions: Vec<ClassCode> =
                corpus.texts().map(|t| trained.predict(t)).collect();
            let report = evaluate(&gold, &predictions).map_err(stringify)?;
            print!("{}", format_report(&report, style));
            if style == ReportStyle::Json {
                println!();
            }
            Ok(())
        }
        Command::Sweep {
            input,
            fractions,
            trials,
            seed,
            stratified,
            out_dir,
            vectorizer,
        } => {
            let corpus = load_corpus(&input, IngestConfig::default()).map_err(stringify)?;
            let config = SweepConfig {
                train_fractions: fractions,
                trials,
                stratified,
                vectorizer: vectorizer.config(),
                ..SweepConfig::new(seed.resolve())
            };
            let result = run_sweep(&corpus, &config).map_err(stringify)?;
            let written =
                write_outputs(&result, &out_dir, &OutputFormat::ALL).map_err(stringify)?;

            let mut summary = String::new();
            let _ = writeln!(
                summary,
                "best mean accuracy {:.2} by {} at {}% training",
                result.winner.mean_accuracy,
                result.winner.algorithm.display_name(),
                (result.winner.train_fraction * 100.0).round() as u32,
            );
            let _ = writeln!(summary, "wrote {} files under {}", written.len(), out_dir.display());
            print!("{summary}");
            Ok(())
        }
        Command::Recommend {
            model,
            input,
            format,
        } => {
            let recommender = Recommender::from_file(&model).map_err(stringify)?;
            let requirements =
                load_requirements(&input, IngestConfig::default()).map_err(stringify)?;
            let recommendations = recommender.recommend(&requirements).map_err(stringify)?;
            match format.as_str() {
                "jsonl" => print!("{}", to_jsonl(&recommendations)),
                "text" => print!("{}", to_text(&recommendations)),
                other => return Err(format!("unknown format `{other}`; valid: jsonl, text")),
            }
            Ok(())
        }
    }
}

fn stringify(e: impl std::fmt::Display) -> String {
    e.to_string()
}
