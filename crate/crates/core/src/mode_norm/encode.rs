use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use super::vgm::{fit_vgm_with, ColumnModeModel, VgmConfig};
use crate::random::{derive_seed, Sampling};
use crate::table::{DataTable, Row, TableSchema, Value};
use crate::{Error, Result};

/// Densities below this are treated as underflow when choosing a mode.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// `rho_k = weight_k * N(value; mean_k, std_k)` for every mode.
pub fn mode_probabilities(model: &ColumnModeModel, value: f64) -> Vec<f64> {
    model
        .modes()
        .iter()
        .map(|m| m.weight * normal_pdf(value, m.mean, m.std))
        .collect()
}

fn normal_pdf(x: f64, mean: f64, std: f64) -> f64 {
    let z = (x - mean) / std;
    libm::exp(-0.5 * z * z) / (std * libm::sqrt(core::f64::consts::TAU))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedValue {
    pub alpha: f64,
    pub beta: Vec<f64>,
}

/// Samples a mode in proportion to its density; if every density underflowed
/// the mode with the nearest mean is used.
pub fn select_mode<R: RngCore + ?Sized>(model: &ColumnModeModel, value: f64, rng: &mut R) -> usize {
    let rho = mode_probabilities(model, value);
    if rho.iter().all(|&r| r < UNDERFLOW_FLOOR) {
        return nearest_mode(model, value);
    }
    rng.weighted_index(&rho)
}

fn nearest_mode(model: &ColumnModeModel, value: f64) -> usize {
    let mut best = 0;
    for (k, m) in model.modes().iter().enumerate() {
        if (value - m.mean).abs() < (value - model.modes()[best].mean).abs() {
            best = k;
        }
    }
    best
}

/// Raw within-mode scalar `(value - mean) / (4 std)` before clamping.
pub fn raw_alpha(model: &ColumnModeModel, mode: usize, value: f64) -> f64 {
    let m = model.modes()[mode];
    (value - m.mean) / (4.0 * m.std)
}

pub fn encode_with_mode(model: &ColumnModeModel, value: f64, mode: usize) -> EncodedValue {
    let mut beta = vec![0.0; model.mode_count()];
    beta[mode] = 1.0;
    EncodedValue {
        alpha: raw_alpha(model, mode, value).clamp(-1.0, 1.0),
        beta,
    }
}

pub fn encode_value<R: RngCore + ?Sized>(
    model: &ColumnModeModel,
    value: f64,
    rng: &mut R,
) -> EncodedValue {
    let mode = select_mode(model, value, rng);
    encode_with_mode(model, value, mode)
}

/// Inverse of the encoding; a relaxed `beta` is resolved by argmax.
pub fn decode_value(model: &ColumnModeModel, alpha: f64, beta: &[f64]) -> f64 {
    let m = model.modes()[argmax(beta)];
    alpha * 4.0 * m.std + m.mean
}

/// Index of the first maximum.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Per-continuous-column transform. Constant columns skip the mixture and
/// occupy no encoded width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "transform", rename_all = "lowercase")]
pub enum ColumnTransform {
    Mixture { model: ColumnModeModel },
    Constant { value: f64 },
}

impl ColumnTransform {
    pub fn width(&self) -> usize {
        match self {
            ColumnTransform::Mixture { model } => 1 + model.mode_count(),
            ColumnTransform::Constant { .. } => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Segment {
    /// `alpha` offset followed by the mode indicator range.
    Mixture {
        column: usize,
        alpha: usize,
        beta: Range<usize>,
    },
    Constant {
        column: usize,
    },
    Discrete {
        column: usize,
        range: Range<usize>,
    },
}

/// Encoded row layout: all continuous columns (alpha then beta each), then
/// the one-hot blocks of the discrete columns, each group in schema order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowLayout {
    pub segments: Vec<Segment>,
    pub width: usize,
}

impl RowLayout {
    fn build(schema: &TableSchema, transforms: &[ColumnTransform]) -> RowLayout {
        let mut segments = Vec::new();
        let mut offset = 0;
        for (column, t) in schema.continuous_columns().zip(transforms) {
            match t {
                ColumnTransform::Mixture { model } => {
                    let k = model.mode_count();
                    segments.push(Segment::Mixture {
                        column,
                        alpha: offset,
                        beta: offset + 1..offset + 1 + k,
                    });
                    offset += 1 + k;
                }
                ColumnTransform::Constant { .. } => segments.push(Segment::Constant { column }),
            }
        }
        for (column, cats) in schema.discrete_columns() {
            segments.push(Segment::Discrete {
                column,
                range: offset..offset + cats.len(),
            });
            offset += cats.len();
        }
        RowLayout {
            segments,
            width: offset,
        }
    }

    /// Offset range of discrete column `column`'s one-hot block.
    pub fn discrete_range(&self, column: usize) -> Option<Range<usize>> {
        self.segments.iter().find_map(|s| match s {
            Segment::Discrete { column: c, range } if *c == column => Some(range.clone()),
            _ => None,
        })
    }
}

/// Fitted mode-specific normalizer for a whole schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowEncoder {
    schema: TableSchema,
    transforms: Vec<ColumnTransform>,
    layout: RowLayout,
}

impl RowEncoder {
    /// `transforms` holds one entry per continuous column, in schema order.
    pub fn new(schema: TableSchema, transforms: Vec<ColumnTransform>) -> Result<Self> {
        if transforms.len() != schema.continuous_count() {
            return Err(Error::SchemaMismatch(alloc::format!(
                "{} continuous columns but {} transforms",
                schema.continuous_count(),
                transforms.len()
            )));
        }
        let layout = RowLayout::build(&schema, &transforms);
        Ok(RowEncoder {
            schema,
            transforms,
            layout,
        })
    }

    /// Fits one mixture per continuous column; constant columns become
    /// passthroughs.
    pub fn fit(table: &DataTable, config: &VgmConfig, seed: u64) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::EmptyTable);
        }
        let schema = table.schema().clone();
        let mut transforms = Vec::new();
        for (i, column) in schema.continuous_columns().enumerate() {
            let values = table.continuous_values(column);
            let t = match fit_vgm_with(&values, config, derive_seed(seed, i as u64)) {
                Ok(model) => ColumnTransform::Mixture { model },
                Err(Error::DegenerateColumn) => ColumnTransform::Constant { value: values[0] },
                Err(e) => return Err(e),
            };
            transforms.push(t);
        }
        RowEncoder::new(schema, transforms)
    }

    pub fn schema(&self) -> &TableSchema {
        &self.schema
    }

    pub fn transforms(&self) -> &[ColumnTransform] {
        &self.transforms
    }

    pub fn layout(&self) -> &RowLayout {
        &self.layout
    }

    pub fn width(&self) -> usize {
        self.layout.width
    }

    fn transform_for(&self, column: usize) -> &ColumnTransform {
        let idx = self.schema.continuous_columns().position(|c| c == column).unwrap_or(0);
        &self.transforms[idx]
    }

    pub fn encode_row<R: RngCore + ?Sized>(&self, row: &Row, rng: &mut R) -> Result<Vec<f64>> {
        if row.len() != self.schema.len() {
            return Err(Error::RaggedRow {
                row: 0,
                expected: self.schema.len(),
                found: row.len(),
            });
        }
        let mut out = vec![0.0; self.layout.width];
        for seg in &self.layout.segments {
            match seg {
                Segment::Mixture { column, alpha, beta } => {
                    let value = cell_f64(row, *column)?;
                    let ColumnTransform::Mixture { model } = self.transform_for(*column) else {
                        unreachable!("layout built from transforms")
                    };
                    let enc = encode_value(model, value, rng);
                    out[*alpha] = enc.alpha;
                    out[beta.clone()].copy_from_slice(&enc.beta);
                }
                Segment::Constant { .. } => {}
                Segment::Discrete { column, range } => {
                    let k = row[*column].as_category().ok_or_else(|| Error::BadCell {
                        row: 0,
                        column: self.schema.columns()[*column].name.clone(),
                        reason: "expected a category".into(),
                    })?;
                    if k >= range.len() {
                        return Err(Error::BadCell {
                            row: 0,
                            column: self.schema.columns()[*column].name.clone(),
                            reason: "category index out of range".into(),
                        });
                    }
                    out[range.start + k] = 1.0;
                }
            }
        }
        Ok(out)
    }

    pub fn encode_table<R: RngCore + ?Sized>(&self, table: &DataTable, rng: &mut R) -> Result<Vec<Vec<f64>>> {
        table.rows().iter().map(|r| self.encode_row(r, rng)).collect()
    }

    /// Decodes an encoded (possibly relaxed) row; mode and category blocks
    /// resolve by argmax.
    pub fn decode_row(&self, encoded: &[f64]) -> Result<Row> {
        if encoded.len() != self.layout.width {
            return Err(Error::LayoutMismatch {
                expected: self.layout.width,
                found: encoded.len(),
            });
        }
        let mut row = vec![Value::Discrete(0); self.schema.len()];
        for seg in &self.layout.segments {
            match seg {
                Segment::Mixture { column, alpha, beta } => {
                    let ColumnTransform::Mixture { model } = self.transform_for(*column) else {
                        unreachable!("layout built from transforms")
                    };
                    row[*column] =
                        Value::Continuous(decode_value(model, encoded[*alpha], &encoded[beta.clone()]));
                }
                Segment::Constant { column } => {
                    let ColumnTransform::Constant { value } = self.transform_for(*column) else {
                        unreachable!("layout built from transforms")
                    };
                    row[*column] = Value::Continuous(*value);
                }
                Segment::Discrete { column, range } => {
                    row[*column] = Value::Discrete(argmax(&encoded[range.clone()]));
                }
            }
        }
        Ok(row)
    }
}

fn cell_f64(row: &Row, column: usize) -> Result<f64> {
    row[column].as_f64().ok_or_else(|| Error::BadCell {
        row: 0,
        column: alloc::format!("#{column}"),
        reason: "expected a continuous value".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode_norm::Mode;
    use crate::random::seeded;
    use crate::table::Column;

    fn one(mean: f64, std: f64) -> ColumnModeModel {
        ColumnModeModel::new(vec![Mode { weight: 1.0, mean, std }]).unwrap()
    }

    fn two() -> ColumnModeModel {
        ColumnModeModel::new(vec![
            Mode { weight: 0.5, mean: -1.0, std: 1.0 },
            Mode { weight: 0.5, mean: 1.0, std: 1.0 },
        ])
        .unwrap()
    }

    #[test]
    fn symmetric_modes_equal_density() {
        let rho = mode_probabilities(&two(), 0.0);
        assert_eq!(rho[0], rho[1]);
    }

    #[test]
    fn standard_normal_density_at_zero() {
        let rho = mode_probabilities(&one(0.0, 1.0), 0.0);
        assert!((rho[0] - 1.0 / (2.0 * core::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert!((rho[0] - 0.39894).abs() < 1e-5);
    }

    #[test]
    fn far_tail_underflows_to_nearest_mean() {
        let m = two();
        let rho = mode_probabilities(&m, 1.0 + 50.0);
        assert!(rho.iter().all(|&r| r < UNDERFLOW_FLOOR));
        let mut r = seeded(0);
        assert_eq!(select_mode(&m, 51.0, &mut r), 1);
        assert_eq!(select_mode(&m, -1e6, &mut r), 0);
    }

    #[test]
    fn alpha_cases() {
        let mut r = seeded(0);
        let m = one(10.0, 2.0);
        let e = encode_value(&m, 10.0, &mut r);
        assert_eq!((e.alpha, e.beta.clone()), (0.0, vec![1.0]));
        assert_eq!(encode_value(&m, 18.0, &mut r).alpha, 1.0);
        let m = one(0.0, 1.0);
        assert_eq!(raw_alpha(&m, 0, 9.0), 2.25);
        assert_eq!(encode_value(&m, 9.0, &mut r).alpha, 1.0);
    }

    #[test]
    fn decode_cases() {
        assert_eq!(decode_value(&one(10.0, 2.0), 0.5, &[1.0]), 14.0);
        let m = ColumnModeModel::new(vec![
            Mode { weight: 0.5, mean: 0.0, std: 1.0 },
            Mode { weight: 0.5, mean: 10.0, std: 2.0 },
        ])
        .unwrap();
        assert_eq!(decode_value(&m, 0.5, &[0.2, 0.8]), 14.0);
    }

    fn encoder() -> RowEncoder {
        let schema = TableSchema::new(vec![
            Column::continuous("x"),
            Column::discrete("label", ["Fire", "NoFire"]),
        ])
        .unwrap();
        RowEncoder::new(schema, vec![ColumnTransform::Mixture { model: two() }]).unwrap()
    }

    #[test]
    fn row_width_and_round_trip() {
        let enc = encoder();
        assert_eq!(enc.width(), 5);
        let row = vec![Value::Continuous(0.7), Value::Discrete(1)];
        let mut r = seeded(4);
        let e = enc.encode_row(&row, &mut r).unwrap();
        assert_eq!(e.len(), 5);
        assert_eq!(&e[3..], &[0.0, 1.0]);
        let back = enc.decode_row(&e).unwrap();
        assert_eq!(back[1], Value::Discrete(1));
        assert!((back[0].as_f64().unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn wrong_width_rejected() {
        let enc = encoder();
        assert_eq!(
            enc.decode_row(&[0.0; 4]),
            Err(Error::LayoutMismatch { expected: 5, found: 4 })
        );
    }

    #[test]
    fn constant_columns_pass_through() {
        let schema = TableSchema::new(vec![
            Column::continuous("c"),
            Column::continuous("x"),
            Column::discrete("label", ["a", "b"]),
        ])
        .unwrap();
        let rows = (0..40)
            .map(|i| {
                vec![
                    Value::Continuous(3.5),
                    Value::Continuous(i as f64),
                    Value::Discrete(i % 2),
                ]
            })
            .collect();
        let table = DataTable::new(schema, rows).unwrap();
        let enc = RowEncoder::fit(&table, &VgmConfig::default(), 1).unwrap();
        assert_eq!(enc.transforms()[0], ColumnTransform::Constant { value: 3.5 });
        let mut r = seeded(1);
        let e = enc.encode_row(&table.rows()[5], &mut r).unwrap();
        let back = enc.decode_row(&e).unwrap();
        assert_eq!(back[0], Value::Continuous(3.5));
    }
}
