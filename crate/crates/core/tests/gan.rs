use std::sync::OnceLock;

use proptest::prelude::*;
use tabsyn_core::gan::*;
use tabsyn_core::random;
use tabsyn_core::{demo, ColumnKind, DataTable, Value};

fn quick_config(seed: u64) -> TrainConfig {
    TrainConfig {
        epochs: 3,
        hidden_width: 24,
        noise_dim: 8,
        seed,
        ..TrainConfig::default()
    }
}

/// One small trained model shared by the properties below.
fn model() -> &'static (DataTable, GanModel) {
    static MODEL: OnceLock<(DataTable, GanModel)> = OnceLock::new();
    MODEL.get_or_init(|| {
        let table = demo::wildfire(90, 4).unwrap();
        let (model, _) = train(&table, &quick_config(1)).unwrap();
        (table, model)
    })
}

#[test]
fn losses_are_recorded_per_epoch() {
    let table = demo::blobs(50, 1);
    let (_, history) = train(&table, &quick_config(2)).unwrap();
    assert_eq!(history.len(), 3);
    assert!(history.iter().enumerate().all(|(i, e)| e.epoch == i && e.d_loss.is_finite() && e.g_loss.is_finite()));
}

#[test]
fn augment_keeps_real_rows_first() {
    let (table, model) = model();
    let out = model.augment(table, 25, &mut random::seeded(3)).unwrap();
    assert_eq!(out.len(), table.len() + 25);
    assert_eq!(&out.rows()[..table.len()], table.rows());
    assert!(model.augment(&demo::blobs(10, 0), 5, &mut random::seeded(3)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn synthetic_rows_fit_the_schema(seed in 0u64..10_000, n in 1usize..300) {
        let (_, model) = model();
        let syn = model.sample_synthetic(n, None, &mut random::seeded(seed)).unwrap();
        prop_assert_eq!(syn.len(), n);
        for row in syn.rows() {
            for (v, col) in row.iter().zip(syn.schema().columns()) {
                match (v, &col.kind) {
                    (Value::Continuous(x), ColumnKind::Continuous) => prop_assert!(x.is_finite()),
                    (Value::Discrete(k), ColumnKind::Discrete { categories }) => prop_assert!(*k < categories.len()),
                    _ => prop_assert!(false, "cell kind does not match column"),
                }
            }
        }
    }

    #[test]
    fn conditioned_rows_carry_the_category(seed in 0u64..10_000, which in 0usize..4) {
        let (table, model) = model();
        let cover = ["forest", "shrub", "grass", "urban"][which];
        let cond = build_condition(table.schema(), "land_cover", cover).unwrap();
        let syn = model.sample_synthetic(40, Some(&cond), &mut random::seeded(seed)).unwrap();
        let col = table.schema().column_index("land_cover").unwrap();
        prop_assert!(syn.categories_of(col).iter().all(|&k| k == which));
    }

    #[test]
    fn conditions_are_one_hot_in_one_block(seed in 0u64..10_000) {
        let (table, _) = model();
        let c = sample_condition(table, &mut random::seeded(seed)).unwrap();
        let layout = CondLayout::new(table.schema());
        let (offset, len) = layout.block(c.column).unwrap();
        prop_assert_eq!(c.vector.len(), layout.width);
        prop_assert_eq!(c.vector.iter().filter(|&&v| v == 1.0).count(), 1);
        prop_assert_eq!(c.vector.iter().filter(|&&v| v != 0.0).count(), 1);
        prop_assert_eq!(c.vector[offset + c.category], 1.0);
        prop_assert!(c.category < len);
    }
}

#[test]
fn condition_frequencies_follow_log_counts() {
    let (table, _) = model();
    let sampler = ConditionSampler::from_table(table).unwrap();
    let counts = category_counts(table);
    let mut rng = random::seeded(5);
    let draws = 40_000;
    let mut hits = vec![0usize; 4];
    let mut cover_draws = 0;
    let col = table.schema().column_index("land_cover").unwrap();
    for _ in 0..draws {
        let c = sampler.sample(&mut rng).unwrap();
        if c.column == col {
            hits[c.category] += 1;
            cover_draws += 1;
        }
    }
    let w: Vec<f64> = counts[0].iter().map(|&n| (1.0 + n as f64).ln()).collect();
    let total: f64 = w.iter().sum();
    for k in 0..4 {
        let want = w[k] / total;
        let got = hits[k] as f64 / cover_draws as f64;
        assert!((got - want).abs() < 0.015, "category {k}: {got} vs {want}");
    }
    assert!((cover_draws as f64 / draws as f64 - 0.5).abs() < 0.015);
}
