use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Confusion counts for one designated positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    /// The same confusion seen from the other class.
    pub fn flipped(&self) -> Self {
        ConfusionCounts {
            tp: self.tn,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tp,
        }
    }
}

pub fn confusion<T: PartialEq>(pred: &[T], truth: &[T], positive: &T) -> Result<ConfusionCounts> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut c = ConfusionCounts::default();
    for (p, t) in pred.iter().zip(truth) {
        match (p == positive, t == positive) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Rows whose true label is this class.
    pub support: usize,
    /// Correctly predicted rows of this class.
    pub correct: usize,
    /// Set when a zero denominator forced a metric to 0.
    pub degenerate: bool,
}

pub fn class_metrics(c: &ConfusionCounts) -> ClassMetrics {
    let mut degenerate = false;
    let mut ratio = |num: usize, den: usize| {
        if den == 0 {
            degenerate = true;
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        degenerate = true;
        0.0
    };
    ClassMetrics {
        precision,
        recall,
        f1,
        support: c.tp + c.fn_,
        correct: c.tp,
        degenerate,
    }
}

/// Support-weighted two-class summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedReport {
    pub positive: ClassMetrics,
    pub negative: ClassMetrics,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

pub fn weighted_report(positive: &ClassMetrics, negative: &ClassMetrics) -> Result<WeightedReport> {
    let total = positive.support + negative.support;
    if total == 0 {
        return Err(Error::ZeroSupport);
    }
    let (sp, sn, s) = (positive.support as f64, negative.support as f64, total as f64);
    let avg = |a: f64, b: f64| (sp * a + sn * b) / s;
    Ok(WeightedReport {
        positive: *positive,
        negative: *negative,
        precision: avg(positive.precision, negative.precision),
        recall: avg(positive.recall, negative.recall),
        f1: avg(positive.f1, negative.f1),
        accuracy: (positive.correct + negative.correct) as f64 / s,
    })
}

/// Confusion, per-class metrics and weighted summary in one go.
pub fn evaluate<T: PartialEq>(pred: &[T], truth: &[T], positive: &T) -> Result<WeightedReport> {
    let c = confusion(pred, truth, positive)?;
    weighted_report(&class_metrics(&c), &class_metrics(&c.flipped()))
}
