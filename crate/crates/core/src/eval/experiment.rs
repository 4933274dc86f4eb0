use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use super::metrics::{evaluate, WeightedReport};
use crate::baselines::{fit, Classifier, ClassifierKind, Params};
use crate::gan::{train, EpochLoss, TrainConfig};
use crate::random::{self, derive_seed};
use crate::table::{split_train_test, DataTable, SplitSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub label: String,
    /// Category treated as the positive class in per-class blocks.
    pub positive: String,
    pub train_fraction: f64,
    pub seeds: Vec<u64>,
    pub classifiers: Vec<Params>,
    pub gan: TrainConfig,
    /// Synthetic rows added to the training split; `None` adds as many as
    /// the split has.
    pub n_syn: Option<usize>,
}

impl ExperimentConfig {
    /// All five classifiers with their default settings.
    pub fn new(label: &str, positive: &str, seeds: Vec<u64>) -> Self {
        ExperimentConfig {
            label: label.into(),
            positive: positive.into(),
            train_fraction: 0.7,
            seeds,
            classifiers: ClassifierKind::ALL.iter().map(|k| k.default_params()).collect(),
            gan: TrainConfig::default(),
            n_syn: None,
        }
    }
}

/// Held-out rows. Nothing outside this module can read them: the only way
/// in is [`SealedTest::score`], which evaluates a finished classifier.
pub struct SealedTest {
    table: DataTable,
    label: usize,
    positive: usize,
}

impl SealedTest {
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn score(&self, clf: &Classifier) -> Result<WeightedReport> {
        let pred = clf.predict(&self.table)?;
        evaluate(&pred, &self.table.categories_of(self.label), &self.positive)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierResult {
    pub classifier: ClassifierKind,
    pub baseline: WeightedReport,
    pub augmented: WeightedReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub train_rows: usize,
    pub test_rows: usize,
    pub synthetic_rows: usize,
    pub gan_history: Vec<EpochLoss>,
    pub results: Vec<ClassifierResult>,
}

/// Seed-averaged headline numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub classifier: ClassifierKind,
    pub baseline: MeanMetrics,
    pub augmented: MeanMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub runs: Vec<SeedResult>,
    pub summary: Vec<SummaryRow>,
}

fn mean_of(reports: &[&WeightedReport]) -> MeanMetrics {
    let n = reports.len() as f64;
    let sum = |f: fn(&WeightedReport) -> f64| reports.iter().map(|r| f(r)).sum::<f64>() / n;
    MeanMetrics {
        accuracy: sum(|r| r.accuracy),
        precision: sum(|r| r.precision),
        recall: sum(|r| r.recall),
        f1: sum(|r| r.f1),
    }
}

/// Splits the table, trains every classifier on the training split, trains
/// the GAN on the same split, retrains every classifier on the augmented
/// split and scores both groups on the held-out rows. Repeated per seed.
pub fn run_experiment(table: &DataTable, config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.seeds.is_empty() || config.classifiers.is_empty() {
        return Err(Error::invalid("need at least one seed and one classifier"));
    }
    let label = table.schema().discrete_index(&config.label)?;
    let positive = table.schema().category_index(label, &config.positive)?;
    let mut runs = Vec::with_capacity(config.seeds.len());
    for &seed in &config.seeds {
        let (train_rows, test_rows) = split_train_test(table, &SplitSpec::new(config.train_fraction, derive_seed(seed, 0))?)?;
        let sealed = SealedTest {
            table: test_rows,
            label,
            positive,
        };
        let n_syn = config.n_syn.unwrap_or(train_rows.len());
        let (augmented, gan_history) = if n_syn == 0 {
            (train_rows.clone(), Vec::new())
        } else {
            let gan_cfg = TrainConfig {
                seed: derive_seed(seed, 1),
                ..config.gan.clone()
            };
            let (model, history) = train(&train_rows, &gan_cfg)?;
            let mut rng = random::seeded(derive_seed(seed, 2));
            (model.augment(&train_rows, n_syn, &mut rng)?, history)
        };
        let mut results = Vec::with_capacity(config.classifiers.len());
        for (i, params) in config.classifiers.iter().enumerate() {
            let clf_seed = derive_seed(seed, 100 + i as u64);
            let base = fit(&train_rows, &config.label, params, clf_seed)?;
            let aug = fit(&augmented, &config.label, params, clf_seed)?;
            results.push(ClassifierResult {
                classifier: params.kind(),
                baseline: sealed.score(&base)?,
                augmented: sealed.score(&aug)?,
            });
        }
        runs.push(SeedResult {
            seed,
            train_rows: train_rows.len(),
            test_rows: sealed.len(),
            synthetic_rows: n_syn,
            gan_history,
            results,
        });
    }
    let summary = (0..config.classifiers.len())
        .map(|i| {
            let base: Vec<&WeightedReport> = runs.iter().map(|r| &r.results[i].baseline).collect();
            let aug: Vec<&WeightedReport> = runs.iter().map(|r| &r.results[i].augmented).collect();
            SummaryRow {
                classifier: config.classifiers[i].kind(),
                baseline: mean_of(&base),
                augmented: mean_of(&aug),
            }
        })
        .collect();
    Ok(ExperimentReport {
        config: config.clone(),
        runs,
        summary,
    })
}

/// Fixed-width comparison table: weighted P/R/F1 and accuracy for the
/// baseline group, then the augmented group, averaged over seeds.
pub fn render_table(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<6} | {:^31} | {:^31}",
        "Model", "Baseline", "Baseline+CTGAN"
    );
    let _ = writeln!(
        out,
        "{:<6} | {:>6} {:>6} {:>6} {:>8} | {:>6} {:>6} {:>6} {:>8}",
        "", "P", "R", "F1", "Acc", "P", "R", "F1", "Acc"
    );
    let _ = writeln!(out, "{}", "-".repeat(73));
    for row in &report.summary {
        let b = row.baseline;
        let a = row.augmented;
        let _ = writeln!(
            out,
            "{:<6} | {:>6.4} {:>6.4} {:>6.4} {:>8.4} | {:>6.4} {:>6.4} {:>6.4} {:>8.4}",
            row.classifier.short_name(),
            b.precision,
            b.recall,
            b.f1,
            b.accuracy,
            a.precision,
            a.recall,
            a.f1,
            a.accuracy
        );
    }
    let seeds: Vec<String> = report.config.seeds.iter().map(|s| format!("{s}")).collect();
    let _ = writeln!(
        out,
        "seeds: {}; positive class: {}",
        seeds.join(","),
        report.config.positive
    );
    out
}
