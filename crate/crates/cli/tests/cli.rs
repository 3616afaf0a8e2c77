//! End-to-end tests driving the compiled binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_reqmapper")
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .env_remove("REQMAPPER_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn sample_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sample_corpus.csv")
}

/// A small keyword corpus written as CSV for fast training runs.
fn write_toy_corpus(dir: &Path) -> PathBuf {
    let path = dir.join("toy.csv");
    let mut rows = String::from("id,text,label\n");
    let keywords = [
        ("payload execute gateway", "C1"),
        ("beacon relay uplink", "C2"),
        ("autorun implant stealth", "C3"),
        ("credential sudo pivot", "C4"),
        ("harvest exfil bundle", "C5"),
    ];
    let fillers = ["the system shall", "the service must", "the platform will"];
    let mut i = 0;
    for round in 0..8 {
        for (words, label) in keywords {
            i += 1;
            rows.push_str(&format!(
                "t{i},{} {words} run {round},{label}\n",
                fillers[round % fillers.len()]
            ));
        }
    }
    std::fs::write(&path, rows).unwrap();
    path
}

#[test]
fn help_exits_zero_for_every_subcommand() {
    for args in [
        vec!["--help"],
        vec!["validate", "--help"],
        vec!["split", "--help"],
        vec!["train", "--help"],
        vec!["eval", "--help"],
        vec!["sweep", "--help"],
        vec!["recommend", "--help"],
    ] {
        let output = run(&args);
        assert!(output.status.success(), "{args:?}: {}", stderr(&output));
        assert!(stdout(&output).contains("Usage"), "{args:?}");
    }
}

#[test]
fn unknown_flags_and_bad_values_exit_one() {
    let output = run(&["validate", "--input", "x.csv", "--frobnicate"]);
    assert_eq!(output.status.code(), Some(1));

    let output = run(&["train", "--algo", "xgboost", "--input", "x.csv", "--model", "m.json"]);
    assert_eq!(output.status.code(), Some(1));
    let err = stderr(&output);
    for token in ["nb", "svm", "rf", "mlp"] {
        assert!(err.contains(token), "error should list `{token}`: {err}");
    }

    let output = run(&["nonsense"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn validate_reports_stats_and_rejects_bad_corpora() {
    let corpus = sample_corpus();
    let output = run(&["validate", "--input", corpus.to_str().unwrap()]);
    assert!(output.status.success(), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("records: 50"));
    assert!(text.contains("C1: 10"));
    assert!(text.contains("C5: 10"));

    let output = run(&[
        "validate",
        "--input",
        corpus.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(value["records"], 50);
    assert_eq!(value["class_distribution"]["C3"], 10);

    // Missing file: one-line diagnostic, exit 1.
    let output = run(&["validate", "--input", "/nonexistent/corpus.csv"]);
    assert_eq!(output.status.code(), Some(1));
    assert_eq!(stderr(&output).lines().count(), 1);

    // Ungrouped tactic label: exit 1 naming the row.
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "id,text,label\nr1,scan the perimeter,reconnaissance\n").unwrap();
    let output = run(&["validate", "--input", bad.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("reconnaissance"));
}

#[test]
fn split_writes_disjoint_halves_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_toy_corpus(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let output = run(&[
            "split",
            "--input",
            corpus.to_str().unwrap(),
            "--train-fraction",
            "0.7",
            "--seed",
            "42",
            "--out-dir",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "{}", stderr(&output));
    }
    let train = std::fs::read_to_string(out_a.join("train.csv")).unwrap();
    let test = std::fs::read_to_string(out_a.join("test.csv")).unwrap();
    assert_eq!(train.lines().count() - 1, 28); // floor(0.7 * 40)
    assert_eq!(test.lines().count() - 1, 12);
    assert_eq!(train, std::fs::read_to_string(out_b.join("train.csv")).unwrap());
    assert_eq!(test, std::fs::read_to_string(out_b.join("test.csv")).unwrap());
}

#[test]
fn train_eval_recommend_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_toy_corpus(dir.path());
    let model = dir.path().join("model.json");

    let output = run(&[
        "train",
        "--algo",
        "svm",
        "--input",
        corpus.to_str().unwrap(),
        "--train-fraction",
        "0.7",
        "--seed",
        "42",
        "--model",
        model.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(model.exists());
    // The model file reloads through the library.
    reqmapper::load_model(&model).expect("saved model loads");

    let output = run(&[
        "eval",
        "--model",
        model.to_str().unwrap(),
        "--input",
        corpus.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    let accuracy = report["accuracy"].as_f64().unwrap();
    assert_eq!(report["micro"]["p"].as_f64().unwrap(), accuracy);
    assert!(accuracy > 0.9, "toy corpus should be separable: {accuracy}");

    let reqs = dir.path().join("reqs.csv");
    std::fs::write(
        &reqs,
        "id,text\nq1,the service must exfil and bundle records\nq2,the beacon uplink shall relay\n",
    )
    .unwrap();
    let output = run(&[
        "recommend",
        "--model",
        model.to_str().unwrap(),
        "--input",
        reqs.to_str().unwrap(),
        "--format",
        "jsonl",
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    let lines: Vec<serde_json::Value> = stdout(&output)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["id"], "q1");
    assert_eq!(lines[0]["predicted"], "C5");
    let tactics: Vec<&str> = lines[0]["member_tactics"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["name"].as_str().unwrap())
        .collect();
    assert_eq!(tactics, vec!["collection", "exfiltration"]);
    assert_eq!(lines[1]["predicted"], "C2");
}

#[test]
fn sweep_writes_outputs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_toy_corpus(dir.path());
    let out_a = dir.path().join("sweep_a");
    let out_b = dir.path().join("sweep_b");
    for out in [&out_a, &out_b] {
        let output = run(&[
            "sweep",
            "--input",
            corpus.to_str().unwrap(),
            "--fractions",
            "0.6,0.7",
            "--trials",
            "2",
            "--seed",
            "7",
            "--out-dir",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "{}", stderr(&output));
        assert!(stdout(&output).contains("best mean accuracy"));
    }
    for name in [
        "sweep.json",
        "table_60.txt",
        "table_60.csv",
        "chart_60.svg",
        "table_70.txt",
        "table_70.csv",
        "chart_70.svg",
    ] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs across identical runs");
    }
    let table = std::fs::read_to_string(out_a.join("table_70.txt")).unwrap();
    assert!(table.starts_with("70% Training | Accuracy | Recall | F-1 Score | Precision"));
    assert!(table.contains("Neural Network"));
}

#[test]
fn logging_goes_to_stderr_not_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_toy_corpus(dir.path());
    let out = dir.path().join("sweep");
    let output = Command::new(binary())
        .args([
            "sweep",
            "--input",
            corpus.to_str().unwrap(),
            "--fractions",
            "0.7",
            "--trials",
            "1",
            "--jobs",
            "2",
            "--out-dir",
            out.to_str().unwrap(),
        ])
        .env("REQMAPPER_LOG", "info")
        .output()
        .expect("binary runs");
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(stderr(&output).contains("sweep: fraction"));
    assert!(!stdout(&output).contains("sweep: fraction"));
}
