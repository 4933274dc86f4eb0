use std::path::{Path, PathBuf};

use tabsyn::csv_io::parse_csv;
use tabsyn_core::TableSchema;

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn p(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.p(name).to_string_lossy().into_owned()
    }
}

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["tabsyn"];
    argv.extend_from_slice(args);
    tabsyn::run(argv)
}

fn rows_in(csv: &Path, schema: &Path) -> usize {
    let schema: TableSchema = serde_json::from_str(&std::fs::read_to_string(schema).unwrap()).unwrap();
    parse_csv(&std::fs::read_to_string(csv).unwrap(), &schema).unwrap().len()
}

fn demo(d: &Dir, dataset: &str, rows: usize) {
    let rows = rows.to_string();
    let code = run(&[
        "demo-data", "--dataset", dataset, "--rows", &rows, "--seed", "3",
        "--out", &d.s("data.csv"), "--schema-out", &d.s("schema.json"),
    ]);
    assert_eq!(code, 0);
}

#[test]
fn split_row_counts_sum() {
    let d = Dir::new();
    demo(&d, "wildfire", 50);
    let code = run(&[
        "split", "--in", &d.s("data.csv"), "--schema", &d.s("schema.json"), "--ratio", "0.7", "--seed", "42",
        "--out-train", &d.s("tr.csv"), "--out-test", &d.s("te.csv"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(rows_in(&d.p("tr.csv"), &d.p("schema.json")), 35);
    assert_eq!(rows_in(&d.p("te.csv"), &d.p("schema.json")), 15);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["split", "--bogus"]), 1);
    assert_eq!(run(&["no-such-command"]), 1);
    // the seed is mandatory wherever randomness is involved
    assert_eq!(run(&["split", "--in", "a", "--schema", "b", "--out-train", "c", "--out-test", "d"]), 1);
    assert_eq!(run(&["--help"]), 0);
}

#[test]
fn data_errors_exit_two() {
    let d = Dir::new();
    demo(&d, "blobs", 20);
    std::fs::write(d.p("bad.csv"), "x1,x2,label\n1,2,Smoke\n").unwrap();
    let args = |input: &str| {
        run(&[
            "split", "--in", input, "--schema", &d.s("schema.json"), "--seed", "1",
            "--out-train", &d.s("tr.csv"), "--out-test", &d.s("te.csv"),
        ])
    };
    assert_eq!(args(&d.s("bad.csv")), 2);
    assert_eq!(args(&d.s("missing.csv")), 2);
    assert!(!d.p("tr.csv").exists());
}

#[test]
fn same_path_is_refused() {
    let d = Dir::new();
    demo(&d, "blobs", 20);
    let before = std::fs::read(d.p("data.csv")).unwrap();
    let code = run(&[
        "split", "--in", &d.s("data.csv"), "--schema", &d.s("schema.json"), "--seed", "1",
        "--out-train", &d.s("data.csv"), "--out-test", &d.s("te.csv"),
    ]);
    assert_eq!(code, 1);
    assert_eq!(std::fs::read(d.p("data.csv")).unwrap(), before);
}

#[test]
fn gan_pipeline_and_conditioned_sampling() {
    let d = Dir::new();
    demo(&d, "blobs", 40);
    let (data, schema) = (d.s("data.csv"), d.s("schema.json"));
    assert_eq!(run(&["fit-modes", "--in", &data, "--schema", &schema, "--seed", "1", "--out", &d.s("enc.json")]), 0);
    let gan = [
        "train-gan", "--in", &data, "--schema", &schema, "--seed", "2", "--encoder", &d.s("enc.json"),
        "--epochs", "2", "--hidden-width", "16", "--noise-dim", "8",
    ];
    let (g1, loss) = (d.s("gan.json"), d.s("loss.csv"));
    let mut first = gan.to_vec();
    first.extend(["--out", g1.as_str(), "--loss-out", loss.as_str()]);
    assert_eq!(run(&first), 0);
    let mut second = gan.to_vec();
    let g2 = d.s("gan2.json");
    second.extend(["--out", g2.as_str()]);
    assert_eq!(run(&second), 0);
    assert_eq!(std::fs::read(d.p("gan.json")).unwrap(), std::fs::read(d.p("gan2.json")).unwrap());
    let loss = std::fs::read_to_string(d.p("loss.csv")).unwrap();
    assert!(loss.starts_with("epoch,d_loss,g_loss,cond_penalty\n"));
    assert_eq!(loss.lines().count(), 3);

    let code = run(&[
        "sample", "--model", &d.s("gan.json"), "--rows", "30", "--seed", "4",
        "--condition", "label=Fire", "--out", &d.s("syn.csv"),
    ]);
    assert_eq!(code, 0);
    let syn = std::fs::read_to_string(d.p("syn.csv")).unwrap();
    assert_eq!(syn.lines().skip(1).filter(|l| l.ends_with(",Fire")).count(), 30);
    let bad = run(&[
        "sample", "--model", &d.s("gan.json"), "--rows", "3", "--seed", "4",
        "--condition", "label=Smoke", "--out", &d.s("x.csv"),
    ]);
    assert_eq!(bad, 2);

    let code = run(&[
        "augment", "--in", &data, "--schema", &schema, "--model", &d.s("gan.json"), "--rows", "10",
        "--seed", "5", "--out", &d.s("aug.csv"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(rows_in(&d.p("aug.csv"), &d.p("schema.json")), 50);
}

#[test]
fn train_evaluate_and_grid() {
    let d = Dir::new();
    demo(&d, "blobs", 60);
    let (data, schema) = (d.s("data.csv"), d.s("schema.json"));
    let grid = r#"{"kind": "decision_tree", "max_depth": [1, 3], "min_samples_leaf": [1], "min_samples_split": [2]}"#;
    std::fs::write(d.p("grid.json"), grid).unwrap();
    let code = run(&[
        "gridsearch", "--in", &data, "--schema", &schema, "--classifier", "dt", "--grid", &d.s("grid.json"),
        "--folds", "3", "--seed", "1", "--out", &d.s("grid.csv"), "--best-out", &d.s("best.json"),
    ]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(d.p("grid.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().next().unwrap().ends_with("mean_cv_accuracy"));

    let code = run(&[
        "train", "--in", &data, "--schema", &schema, "--classifier", "dt", "--params", &d.s("best.json"),
        "--seed", "1", "--out", &d.s("clf.json"),
    ]);
    assert_eq!(code, 0);
    let mismatched = run(&[
        "train", "--in", &data, "--schema", &schema, "--classifier", "svm", "--params", &d.s("best.json"),
        "--seed", "1", "--out", &d.s("clf2.json"),
    ]);
    assert_eq!(mismatched, 1);
    let code = run(&[
        "evaluate", "--in", &data, "--schema", &schema, "--model", &d.s("clf.json"),
        "--out", &d.s("eval.json"), "--text-out", &d.s("eval.txt"),
    ]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.p("eval.json")).unwrap()).unwrap();
    assert!(report["accuracy"].as_f64().unwrap() >= 0.95);
    let text = std::fs::read_to_string(d.p("eval.txt")).unwrap();
    assert!(text.contains("Fire") && text.contains("NoFire") && text.contains("weighted"));
}

#[test]
fn ingest_derives_features() {
    let d = Dir::new();
    let schema = r#"{"columns": [
        {"name": "ndvi", "kind": "continuous"},
        {"name": "evi", "kind": "continuous"},
        {"name": "powerline_distance_m", "kind": "continuous"},
        {"name": "label", "kind": "discrete", "categories": ["Fire", "NoFire"]}
    ]}"#;
    std::fs::write(d.p("schema.json"), schema).unwrap();
    std::fs::write(d.p("raw.csv"), "lat,lon,blue,red,nir,label\n0.01,0.3,0.05,0.1,0.5,Fire\n0,1,0.05,0.1,0.5,NoFire\n").unwrap();
    std::fs::write(d.p("lines.csv"), "line_id,vertex_order,lat,lon\nL,2,0,1\nL,1,0,-1\n").unwrap();
    let code = run(&[
        "ingest", "--in", &d.s("raw.csv"), "--schema", &d.s("schema.json"), "--lines", &d.s("lines.csv"),
        "--out", &d.s("table.csv"),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(d.p("table.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').take(3).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows[0][0], 0.4 / 0.6);
    assert!((rows[0][1] - 2.5 * 0.4 / 1.725).abs() < 1e-15);
    assert!((rows[0][2] - 1111.95).abs() < 0.01);
    assert_eq!(rows[1][2], 0.0);
    let no_lines = run(&["ingest", "--in", &d.s("raw.csv"), "--schema", &d.s("schema.json"), "--out", &d.s("t2.csv")]);
    assert_eq!(no_lines, 1);
}

#[test]
fn experiment_report_layout() {
    let d = Dir::new();
    demo(&d, "blobs", 60);
    let code = run(&[
        "experiment", "--in", &d.s("data.csv"), "--schema", &d.s("schema.json"), "--seed", "7",
        "--epochs", "2", "--hidden-width", "16", "--noise-dim", "8",
        "--out", &d.s("report.json"), "--text-out", &d.s("report.txt"),
    ]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.p("report.json")).unwrap()).unwrap();
    let summary = report["summary"].as_array().unwrap();
    assert_eq!(summary.len(), 5);
    for row in summary {
        for group in ["baseline", "augmented"] {
            for metric in ["precision", "recall", "f1", "accuracy"] {
                assert!(row[group][metric].is_f64());
            }
        }
    }
    assert_eq!(report["config"]["seeds"][0], 7);
    let code = run(&["report", "--in", &d.s("report.json"), "--format", "text", "--out", &d.s("again.txt")]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read(d.p("again.txt")).unwrap(), std::fs::read(d.p("report.txt")).unwrap());
    let code = run(&["report", "--in", &d.s("report.json"), "--format", "csv", "--out", &d.s("summary.csv")]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(d.p("summary.csv")).unwrap().lines().count(), 11);
}
