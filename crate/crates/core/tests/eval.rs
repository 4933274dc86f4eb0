use proptest::prelude::*;
use tabsyn_core::baselines::ClassifierKind;
use tabsyn_core::demo;
use tabsyn_core::eval::*;
use tabsyn_core::Error;

const F: &str = "Fire";
const NF: &str = "NoFire";

fn counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> ConfusionCounts {
    ConfusionCounts { tp, fp, fn_, tn }
}

#[test]
fn confusion_examples() {
    let c = confusion(&[F, F, NF], &[F, F, NF], &F).unwrap();
    assert_eq!(c, counts(2, 0, 0, 1));
    let c = confusion(&[F; 4], &[NF; 4], &F).unwrap();
    assert_eq!(c, counts(0, 4, 0, 0));
    assert!(matches!(confusion(&[F], &[F, NF], &F), Err(Error::LengthMismatch { .. })));
    assert_eq!(confusion::<&str>(&[], &[], &F), Err(Error::EmptyTable));
}

#[test]
fn class_metric_examples() {
    let perfect = class_metrics(&counts(1, 0, 0, 0));
    assert_eq!((perfect.precision, perfect.recall, perfect.f1), (1.0, 1.0, 1.0));
    let m = class_metrics(&counts(30, 30, 10, 0));
    assert_eq!((m.precision, m.recall), (0.5, 0.75));
    assert!((m.f1 - 0.6).abs() < 1e-12);
    assert!(!m.degenerate);
    let empty = class_metrics(&counts(0, 0, 3, 5));
    assert_eq!(empty.precision, 0.0);
    assert!(empty.degenerate);
}

fn class(precision: f64, support: usize) -> ClassMetrics {
    ClassMetrics {
        precision,
        recall: precision,
        f1: precision,
        support,
        correct: 0,
        degenerate: false,
    }
}

#[test]
fn weighted_examples() {
    let r = weighted_report(&class(0.8, 50), &class(0.6, 50)).unwrap();
    assert!((r.precision - 0.7).abs() < 1e-15);
    assert_eq!(weighted_report(&class(1.0, 30), &class(0.0, 70)).unwrap().precision, 0.3);
    assert_eq!(weighted_report(&class(0.5, 0), &class(0.5, 0)), Err(Error::ZeroSupport));
}

#[test]
fn zero_synthetic_rows_gives_identical_groups() {
    let table = demo::blobs(80, 2);
    let mut config = ExperimentConfig::new(demo::LABEL, demo::POSITIVE, vec![1, 2]);
    config.n_syn = Some(0);
    config.classifiers = vec![
        ClassifierKind::DecisionTree.default_params(),
        ClassifierKind::GradientBoosting.default_params(),
    ];
    let report = run_experiment(&table, &config).unwrap();
    assert_eq!(report.runs.len(), 2);
    for run in &report.runs {
        assert!(run.gan_history.is_empty());
        assert_eq!(run.train_rows + run.test_rows, 80);
        for r in &run.results {
            assert_eq!(r.baseline, r.augmented);
            assert!(r.baseline.accuracy >= 0.95);
        }
    }
    let text = render_table(&report);
    assert!(text.contains("Baseline+CTGAN"));
    assert_eq!(text.lines().filter(|l| l.starts_with("DT") || l.starts_with("GB")).count(), 2);
}

proptest! {
    #[test]
    fn weighted_metrics_match_oracle(
        rows in prop::collection::vec((0usize..2, 0usize..2), 1..80),
    ) {
        let (pred, truth): (Vec<usize>, Vec<usize>) = rows.into_iter().unzip();
        let r = evaluate(&pred, &truth, &0).unwrap();
        let n = truth.len() as f64;
        let mut want = [0.0; 3];
        for k in 0..2 {
            let hit = pred.iter().zip(&truth).filter(|(p, t)| **p == k && **t == k).count() as f64;
            let predicted = pred.iter().filter(|p| **p == k).count() as f64;
            let actual = truth.iter().filter(|t| **t == k).count() as f64;
            let p = if predicted > 0.0 { hit / predicted } else { 0.0 };
            let rc = if actual > 0.0 { hit / actual } else { 0.0 };
            let f = if p + rc > 0.0 { 2.0 * p * rc / (p + rc) } else { 0.0 };
            want[0] += actual / n * p;
            want[1] += actual / n * rc;
            want[2] += actual / n * f;
        }
        prop_assert!((r.precision - want[0]).abs() <= 1e-12);
        prop_assert!((r.recall - want[1]).abs() <= 1e-12);
        prop_assert!((r.f1 - want[2]).abs() <= 1e-12);
        let c = confusion(&pred, &truth, &0).unwrap();
        prop_assert_eq!(c.total(), pred.len());
        prop_assert_eq!(r.accuracy, (c.tp + c.tn) as f64 / n);
        for (w, a, b) in [
            (r.precision, r.positive.precision, r.negative.precision),
            (r.recall, r.positive.recall, r.negative.recall),
            (r.f1, r.positive.f1, r.negative.f1),
        ] {
            prop_assert!(w >= a.min(b) - 1e-12 && w <= a.max(b) + 1e-12);
        }
    }

    #[test]
    fn harmonic_mean_identity(tp in 0usize..50, fp in 0usize..50, fn_ in 0usize..50) {
        let m = class_metrics(&counts(tp, fp, fn_, 0));
        if m.precision + m.recall == 0.0 {
            prop_assert_eq!(m.f1, 0.0);
        } else {
            let h = 2.0 * m.precision * m.recall / (m.precision + m.recall);
            prop_assert!((m.f1 - h).abs() <= 1e-12);
        }
    }
}
