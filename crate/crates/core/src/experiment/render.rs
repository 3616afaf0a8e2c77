//! Sweep output rendering: text/CSV tables, JSON, and SVG bar charts.
//!
//! Tables follow the published layout: one table per training fraction,
//! rows in the order Neural Network, Random Forest, Support Vector
//! Machine, Naive Bayes, and the metric columns Accuracy, Recall, F-1
//! Score, Precision, rounded to two decimals. Charts are self-contained
//! SVG grouped bar charts, one bar per (algorithm, metric).

use super::{SweepCell, SweepResult};
use crate::classifiers::Algorithm;
use crate::metrics::format_metric;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
    Svg,
}

impl OutputFormat {
    pub const ALL: [OutputFormat; 4] = [
        OutputFormat::Text,
        OutputFormat::Csv,
        OutputFormat::Json,
        OutputFormat::Svg,
    ];
}

fn percent(fraction: f64) -> u32 {
    (fraction * 100.0).round() as u32
}

/// Cells of one fraction, in table row order.
fn fraction_cells(result: &SweepResult, fraction: f64) -> Vec<&SweepCell> {
    let mut ordered: Vec<&SweepCell> = Vec::new();
    for algorithm in Algorithm::TABLE_ORDER {
        if let Some(cell) = result.cell(fraction, algorithm) {
            ordered.push(cell);
        }
    }
    // Any algorithm outside the published four keeps its config order.
    for cell in &result.cells {
        if cell.train_fraction == fraction && !Algorithm::TABLE_ORDER.contains(&cell.algorithm) {
            ordered.push(cell);
        }
    }
    ordered
}

/// Plain-text result table for one training fraction.
pub fn render_table_text(result: &SweepResult, fraction: f64) -> String {
    let pct = percent(fraction);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{pct}% Training | Accuracy | Recall | F-1 Score | Precision"
    );
    for cell in fraction_cells(result, fraction) {
        let m = &cell.metrics;
        let _ = writeln!(
            out,
            "{} | {} | {} | {} | {}",
            cell.algorithm.display_name(),
            format_metric(m.accuracy.mean),
            format_metric(m.micro_recall.mean),
            format_metric(m.micro_f1.mean),
            format_metric(m.micro_precision.mean),
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "Mean of {} trial(s); {}% testing.",
        result.config.trials,
        100 - pct
    );
    out
}

/// CSV result table for one training fraction.
pub fn render_table_csv(result: &SweepResult, fraction: f64) -> String {
    let mut out = String::from("algorithm,accuracy,recall,f1_score,precision\n");
    for cell in fraction_cells(result, fraction) {
        let m = &cell.metrics;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            cell.algorithm.display_name(),
            format_metric(m.accuracy.mean),
            format_metric(m.micro_recall.mean),
            format_metric(m.micro_f1.mean),
            format_metric(m.micro_precision.mean),
        );
    }
    out
}

const BAR_COLORS: [&str; 4] = ["#4c78a8", "#f58518", "#54a24b", "#e45756"];
const METRIC_NAMES: [&str; 4] = ["Accuracy", "Recall", "F-1 Score", "Precision"];

/// Self-contained grouped bar chart for one training fraction: one group
/// per algorithm, one bar per metric.
pub fn render_chart_svg(result: &SweepResult, fraction: f64) -> String {
    let cells = fraction_cells(result, fraction);
    let pct = percent(fraction);

    let width = 760.0;
    let height = 440.0;
    let left = 56.0;
    let right = width - 16.0;
    let top = 56.0;
    let bottom = height - 64.0;
    let plot_h = bottom - top;
    let group_w = (right - left) / cells.len() as f64;
    let bar_w = (group_w * 0.8) / 4.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="28" font-size="16" text-anchor="middle">{pct}% Training, {}% Testing</text>"#,
        width / 2.0,
        100 - pct
    );

    // Horizontal gridlines and y-axis labels at 0.0 .. 1.0.
    for tick in 0..=5 {
        let value = tick as f64 / 5.0;
        let y = bottom - value * plot_h;
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{y:.1}" x2="{right}" y2="{y:.1}" stroke="#dddddd"/>"##
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{value:.1}</text>"##,
            left - 6.0,
            y + 4.0
        );
    }

    for (gi, cell) in cells.iter().enumerate() {
        let m = &cell.metrics;
        let values = [
            m.accuracy.mean,
            m.micro_recall.mean,
            m.micro_f1.mean,
            m.micro_precision.mean,
        ];
        let group_x = left + gi as f64 * group_w;
        let block_x = group_x + group_w * 0.1;
        for (bi, (&value, color)) in values.iter().zip(BAR_COLORS).enumerate() {
            let clamped = value.clamp(0.0, 1.0);
            let bar_h = clamped * plot_h;
            let x = block_x + bi as f64 * bar_w;
            let y = bottom - bar_h;
            let _ = writeln!(
                svg,
                r#"<rect class="bar" x="{x:.1}" y="{y:.1}" width="{:.1}" height="{bar_h:.1}" fill="{color}"><title>{} {}: {}</title></rect>"#,
                bar_w - 2.0,
                cell.algorithm.display_name(),
                METRIC_NAMES[bi],
                format_metric(value),
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
            group_x + group_w / 2.0,
            bottom + 18.0,
            cell.algorithm.display_name(),
        );
    }

    // Legend along the bottom edge.
    let legend_y = height - 18.0;
    let mut legend_x = left;
    for (name, color) in METRIC_NAMES.iter().zip(BAR_COLORS) {
        let _ = writeln!(
            svg,
            r#"<rect x="{legend_x:.1}" y="{:.1}" width="10" height="10" fill="{color}"/>"#,
            legend_y - 9.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{legend_y:.1}" font-size="11">{name}</text>"#,
            legend_x + 14.0
        );
        legend_x += 120.0;
    }

    let _ = writeln!(
        svg,
        r##"<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="#333333"/>"##
    );
    svg.push_str("</svg>\n");
    svg
}

/// Write the selected formats under `dir`: `sweep.json`, and per fraction
/// `table_<pct>.txt`, `table_<pct>.csv`, `chart_<pct>.svg`. Returns the
/// written paths.
pub fn write_outputs(
    result: &SweepResult,
    dir: impl AsRef<Path>,
    formats: &[OutputFormat],
) -> io::Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut emit = |name: String, contents: String| -> io::Result<()> {
        let path = dir.join(name);
        fs::write(&path, contents)?;
        written.push(path);
        Ok(())
    };

    if formats.contains(&OutputFormat::Json) {
        let json = serde_json::to_string_pretty(result).expect("sweep result serializes");
        emit("sweep.json".into(), json)?;
    }
    for &fraction in &result.config.train_fractions {
        let pct = percent(fraction);
        if formats.contains(&OutputFormat::Text) {
            emit(format!("table_{pct}.txt"), render_table_text(result, fraction))?;
        }
        if formats.contains(&OutputFormat::Csv) {
            emit(format!("table_{pct}.csv"), render_table_csv(result, fraction))?;
        }
        if formats.contains(&OutputFormat::Svg) {
            emit(format!("chart_{pct}.svg"), render_chart_svg(result, fraction))?;
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{ForestConfig, MlpConfig};
    use crate::experiment::{run_sweep, SweepConfig, SweepHyperparameters};
    use crate::synthetic::keyword_corpus;

    fn small_result() -> SweepResult {
        let corpus = keyword_corpus(50, 5);
        let config = SweepConfig {
            trials: 1,
            hyperparameters: SweepHyperparameters {
                random_forest: ForestConfig {
                    trees: 5,
                    max_depth: None,
                },
                neural_network: MlpConfig {
                    hidden: 8,
                    epochs: 30,
                    ..Default::default()
                },
                ..Default::default()
            },
            ..SweepConfig::new(13)
        };
        run_sweep(&corpus, &config).unwrap()
    }

    #[test]
    fn text_table_has_caption_header_and_row_order() {
        let result = small_result();
        let table = render_table_text(&result, 0.7);
        let mut lines = table.lines();
        assert_eq!(
            lines.next().unwrap(),
            "70% Training | Accuracy | Recall | F-1 Score | Precision"
        );
        let rows: Vec<&str> = lines
            .by_ref()
            .take(4)
            .map(|l| l.split(" | ").next().unwrap())
            .collect();
        assert_eq!(
            rows,
            vec![
                "Neural Network",
                "Random Forest",
                "Support Vector Machine",
                "Naive Bayes"
            ]
        );
    }

    #[test]
    fn csv_table_parses_back_to_two_decimal_values() {
        let result = small_result();
        let csv = render_table_csv(&result, 0.6);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("algorithm,accuracy,recall,f1_score,precision"));
        for line in lines {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 5);
            for value in &fields[1..] {
                let v: f64 = value.parse().unwrap();
                assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn chart_has_sixteen_bars() {
        let result = small_result();
        let svg = render_chart_svg(&result, 0.8);
        assert_eq!(svg.matches(r#"class="bar""#).count(), 16);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("80% Training, 20% Testing"));
    }

    #[test]
    fn json_round_trips_exactly() {
        let result = small_result();
        let json = serde_json::to_string_pretty(&result).unwrap();
        let parsed: SweepResult = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, result);
        for (a, b) in result.cells.iter().zip(&parsed.cells) {
            assert_eq!(a.metrics.accuracy.mean, b.metrics.accuracy.mean);
        }
    }

    #[test]
    fn write_outputs_creates_the_documented_files() {
        let result = small_result();
        let dir = tempfile::tempdir().unwrap();
        let written = write_outputs(&result, dir.path(), &OutputFormat::ALL).unwrap();
        let names: Vec<String> = written
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        for expected in [
            "sweep.json",
            "table_60.txt",
            "table_60.csv",
            "chart_60.svg",
            "table_70.txt",
            "table_70.csv",
            "chart_70.svg",
            "table_80.txt",
            "table_80.csv",
            "chart_80.svg",
        ] {
            assert!(names.contains(&expected.to_string()), "{expected} missing");
            assert!(dir.path().join(expected).exists());
        }
    }
}
