//! Confusion-based metrics, support-weighted averaging and the
//! baseline-versus-augmented experiment harness.

mod experiment;
mod metrics;

pub use experiment::{
    render_table, run_experiment, ClassifierResult, ExperimentConfig, ExperimentReport, MeanMetrics, SealedTest,
    SeedResult, SummaryRow,
};
pub use metrics::{class_metrics, confusion, evaluate, weighted_report, ClassMetrics, ConfusionCounts, WeightedReport};
