//! CSV and text renderings of loss histories, grid sweeps and metric
//! reports.

use std::fmt::Write;

use serde_json::Value as Json;
use tabsyn_core::baselines::GridReport;
use tabsyn_core::eval::{ClassMetrics, ExperimentReport, MeanMetrics, WeightedReport};
use tabsyn_core::gan::EpochLoss;

fn csv_text(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        w.write_record(r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
}

/// `epoch,d_loss,g_loss,cond_penalty`
pub fn loss_csv(history: &[EpochLoss]) -> String {
    let header = ["epoch", "d_loss", "g_loss", "cond_penalty"].map(String::from);
    let rows: Vec<Vec<String>> = history
        .iter()
        .map(|e| {
            vec![
                e.epoch.to_string(),
                e.d_loss.to_string(),
                e.g_loss.to_string(),
                e.cond_penalty.to_string(),
            ]
        })
        .collect();
    csv_text(&header, &rows)
}

/// Flattens nested parameter objects into dotted names (`tree.max_depth`).
fn flatten(prefix: &str, v: &Json, out: &mut Vec<(String, String)>) {
    match v {
        Json::Object(map) => {
            for (k, v) in map {
                if prefix.is_empty() && k == "kind" {
                    continue;
                }
                let name = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&name, v, out);
            }
        }
        Json::Null => out.push((prefix.into(), "none".into())),
        Json::String(s) => out.push((prefix.into(), s.clone())),
        other => out.push((prefix.into(), other.to_string())),
    }
}

/// One row per cell: the cell's parameters, then each fold's accuracy and
/// the mean.
pub fn grid_csv(report: &GridReport) -> String {
    let mut header: Vec<String> = Vec::new();
    let mut rows = Vec::with_capacity(report.cells.len());
    for cell in &report.cells {
        let mut fields = Vec::new();
        flatten("", &serde_json::to_value(&cell.params).expect("params serialize"), &mut fields);
        if header.is_empty() {
            header = fields.iter().map(|(k, _)| k.clone()).collect();
            header.extend((1..=cell.fold_accuracy.len()).map(|f| format!("fold_{f}")));
            header.push("mean_cv_accuracy".into());
        }
        let mut row: Vec<String> = fields.into_iter().map(|(_, v)| v).collect();
        row.extend(cell.fold_accuracy.iter().map(f64::to_string));
        row.push(cell.mean_accuracy.to_string());
        rows.push(row);
    }
    csv_text(&header, &rows)
}

fn class_line(out: &mut String, name: &str, m: &ClassMetrics) {
    let flag = if m.degenerate { "  (zero denominator reported as 0)" } else { "" };
    let _ = writeln!(
        out,
        "{name:<10} {:>9.4} {:>9.4} {:>9.4} {:>8}{flag}",
        m.precision, m.recall, m.f1, m.support
    );
}

/// Per-class blocks followed by the support-weighted row.
pub fn weighted_text(r: &WeightedReport, positive: &str, negative: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<10} {:>9} {:>9} {:>9} {:>8}", "class", "precision", "recall", "f1", "support");
    class_line(&mut out, positive, &r.positive);
    class_line(&mut out, negative, &r.negative);
    let support = r.positive.support + r.negative.support;
    let _ = writeln!(
        out,
        "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>8}",
        "weighted", r.precision, r.recall, r.f1, support
    );
    let _ = writeln!(out, "accuracy {:.4}", r.accuracy);
    out
}

/// `classifier,group,precision,recall,f1,accuracy`, seed-averaged.
pub fn summary_csv(report: &ExperimentReport) -> String {
    let header = ["classifier", "group", "precision", "recall", "f1", "accuracy"].map(String::from);
    let row = |name: &str, group: &str, m: &MeanMetrics| {
        vec![
            name.to_string(),
            group.to_string(),
            m.precision.to_string(),
            m.recall.to_string(),
            m.f1.to_string(),
            m.accuracy.to_string(),
        ]
    };
    let mut rows = Vec::new();
    for s in &report.summary {
        rows.push(row(s.classifier.short_name(), "baseline", &s.baseline));
        rows.push(row(s.classifier.short_name(), "augmented", &s.augmented));
    }
    csv_text(&header, &rows)
}
