//! Seeded synthetic datasets for examples, smoke runs and tests. Every
//! generator labels rows with a two-category `label` column
//! (`Fire`, `NoFire`).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::features::{evi, ndvi, BandSample};
use crate::random::{self, Sampling};
use crate::table::{Column, DataTable, Row, TableSchema, Value};
use crate::Result;

pub const LABEL: &str = "label";
pub const POSITIVE: &str = "Fire";

fn label_column() -> Column {
    Column::discrete(LABEL, ["Fire", "NoFire"])
}

fn schema_with(names: &[&str]) -> TableSchema {
    let mut cols: Vec<Column> = names.iter().map(|n| Column::continuous(*n)).collect();
    cols.push(label_column());
    TableSchema::new(cols).expect("static demo schema")
}

/// Two Gaussian blobs (std 0.5) centered at `(2, 2)` for Fire and
/// `(-2, -2)` for NoFire; classes alternate row by row.
pub fn blobs(n: usize, seed: u64) -> DataTable {
    let mut rng = random::seeded(seed);
    let rows = (0..n)
        .map(|i| {
            let k = i % 2;
            let c = if k == 0 { 2.0 } else { -2.0 };
            vec![
                Value::Continuous(c + 0.5 * rng.normal()),
                Value::Continuous(c + 0.5 * rng.normal()),
                Value::Discrete(k),
            ]
        })
        .collect();
    DataTable::new(schema_with(&["x1", "x2"]), rows).expect("blob rows match schema")
}

/// Concentric rings: Fire on radius 1, NoFire on radius 3, radial noise
/// std 0.1.
pub fn rings(n: usize, seed: u64) -> DataTable {
    let mut rng = random::seeded(seed);
    let rows = (0..n)
        .map(|i| {
            let k = i % 2;
            let r = if k == 0 { 1.0 } else { 3.0 } + 0.1 * rng.normal();
            let t = 2.0 * core::f64::consts::PI * rng.uniform();
            vec![
                Value::Continuous(r * libm::cos(t)),
                Value::Continuous(r * libm::sin(t)),
                Value::Discrete(k),
            ]
        })
        .collect();
    DataTable::new(schema_with(&["x1", "x2"]), rows).expect("ring rows match schema")
}

/// One continuous column drawn from an equal mixture of `N(-3, 0.5^2)` and
/// `N(3, 0.5^2)`, plus a label column that is always Fire.
pub fn two_mode(n: usize, seed: u64) -> DataTable {
    let mut rng = random::seeded(seed);
    let rows = (0..n).map(|_| vec![Value::Continuous(two_mode_draw(&mut rng)), Value::Discrete(0)]).collect();
    DataTable::new(schema_with(&["x"]), rows).expect("mixture rows match schema")
}

pub fn two_mode_draw(rng: &mut random::Rng) -> f64 {
    let m = if rng.bernoulli(0.5) { -3.0 } else { 3.0 };
    m + 0.5 * rng.normal()
}

/// Three continuous features and a label. Each class is a two-component
/// mixture, and the classes overlap enough that small training sets leave
/// room to improve.
pub fn small_task(n: usize, seed: u64) -> DataTable {
    let mut rng = random::seeded(seed);
    let rows = (0..n)
        .map(|_| {
            let k = usize::from(rng.bernoulli(0.5));
            let sign = if k == 0 { 1.0 } else { -1.0 };
            let side = if rng.bernoulli(0.5) { 1.0 } else { -1.0 };
            vec![
                Value::Continuous(sign * 1.0 + 0.9 * rng.normal()),
                Value::Continuous(side * 2.0 + 0.7 * rng.normal()),
                Value::Continuous(sign * side * 0.8 + 1.0 * rng.normal()),
                Value::Discrete(k),
            ]
        })
        .collect();
    DataTable::new(schema_with(&["f1", "f2", "f3"]), rows).expect("task rows match schema")
}

/// Wildfire-style table: weather, vegetation indices computed from band
/// reflectances, elevation, distance to power lines and land cover.
pub fn wildfire(n: usize, seed: u64) -> Result<DataTable> {
    let schema = TableSchema::new(vec![
        Column::continuous("temperature"),
        Column::continuous("humidity"),
        Column::continuous("wind_speed"),
        Column::continuous("precipitation"),
        Column::continuous("ndvi"),
        Column::continuous("evi"),
        Column::continuous("elevation"),
        Column::continuous("powerline_distance_m"),
        Column::discrete("land_cover", ["forest", "shrub", "grass", "urban"]),
        label_column(),
    ])?;
    let mut rng = random::seeded(seed);
    let mut rows: Vec<Row> = Vec::with_capacity(n);
    for i in 0..n {
        let fire = i % 2 == 0;
        let f = if fire { 1.0 } else { 0.0 };
        let temperature = 22.0 + 6.0 * f + 5.0 * rng.normal();
        let humidity = (45.0 - 12.0 * f + 12.0 * rng.normal()).clamp(2.0, 100.0);
        let wind = (3.0 + 1.5 * f + 1.5 * rng.normal()).max(0.0);
        let precipitation = if rng.bernoulli(0.6 - 0.35 * f) { 0.0 } else { 8.0 * rng.uniform() };
        let bands = BandSample {
            blue: 0.03 + 0.02 * rng.uniform(),
            red: 0.06 + 0.06 * rng.uniform() + 0.03 * f,
            nir: 0.25 + 0.2 * rng.uniform() - 0.05 * f,
        };
        let elevation = 400.0 + 700.0 * rng.uniform() + 150.0 * f;
        // a gamma-like skew: fires cluster nearer to lines
        let scale = if fire { 1500.0 } else { 4000.0 };
        let distance = -scale * libm::log(rng.open_uniform());
        let cover = rng.weighted_index(if fire { &[4.0, 3.0, 2.0, 1.0] } else { &[2.0, 2.0, 3.0, 3.0] });
        rows.push(vec![
            Value::Continuous(temperature),
            Value::Continuous(humidity),
            Value::Continuous(wind),
            Value::Continuous(precipitation),
            Value::Continuous(ndvi(&bands)?),
            Value::Continuous(evi(&bands)?),
            Value::Continuous(elevation),
            Value::Continuous(distance),
            Value::Discrete(cover),
            Value::Discrete(usize::from(!fire)),
        ]);
    }
    DataTable::new(schema, rows)
}

/// Names accepted by [`by_name`].
pub const DATASETS: [&str; 5] = ["blobs", "rings", "two-mode", "small-task", "wildfire"];

pub fn by_name(name: &str, n: usize, seed: u64) -> Result<DataTable> {
    match name {
        "blobs" => Ok(blobs(n, seed)),
        "rings" => Ok(rings(n, seed)),
        "two-mode" => Ok(two_mode(n, seed)),
        "small-task" => Ok(small_task(n, seed)),
        "wildfire" => wildfire(n, seed),
        other => Err(crate::Error::invalid(format!(
            "unknown dataset '{other}' (expected one of {})",
            DATASETS.join(", ")
        ))),
    }
}
