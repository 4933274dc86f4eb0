use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::table::{ColumnKind, DataTable, TableSchema, Value};
use crate::{Error, Result};

/// Where one design-matrix feature comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Feature {
    Continuous(usize),
    /// `(column, category)` indicator
    OneHot(usize, usize),
}

/// Turns table rows into numeric feature vectors: continuous columns pass
/// through, non-label discrete columns become indicator blocks. The label
/// must be a two-category discrete column; its category index is the
/// class (0 or 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMap {
    schema: TableSchema,
    label: usize,
    features: Vec<Feature>,
}

impl FeatureMap {
    pub fn new(schema: &TableSchema, label: &str) -> Result<Self> {
        let label_idx = schema.discrete_index(label)?;
        let cats = schema.columns()[label_idx].categories().unwrap_or(&[]);
        if cats.len() != 2 {
            return Err(Error::NotBinary(String::from(label)));
        }
        let mut features = Vec::new();
        for (i, col) in schema.columns().iter().enumerate() {
            if i == label_idx {
                continue;
            }
            match &col.kind {
                ColumnKind::Continuous => features.push(Feature::Continuous(i)),
                ColumnKind::Discrete { categories } => {
                    features.extend((0..categories.len()).map(|k| Feature::OneHot(i, k)));
                }
            }
        }
        if features.is_empty() {
            return Err(Error::InvalidSchema("no feature columns besides the label".into()));
        }
        Ok(FeatureMap {
            schema: schema.clone(),
            label: label_idx,
            features,
        })
    }

    pub fn schema(&self) -> &TableSchema {
        &self.schema
    }

    pub fn label_column(&self) -> usize {
        self.label
    }

    pub fn label_name(&self) -> &str {
        &self.schema.columns()[self.label].name
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn width(&self) -> usize {
        self.features.len()
    }

    fn row_features(&self, row: &[Value], skip_label: bool) -> Vec<f64> {
        let shift = |c: usize| if skip_label && c > self.label { c - 1 } else { c };
        self.features
            .iter()
            .map(|f| match *f {
                Feature::Continuous(c) => row[shift(c)].as_f64().unwrap_or(0.0),
                Feature::OneHot(c, k) => f64::from(u8::from(row[shift(c)].as_category() == Some(k))),
            })
            .collect()
    }

    /// Feature rows for a table carrying either the training schema or the
    /// training schema with the label column removed.
    pub fn matrix(&self, table: &DataTable) -> Result<Vec<Vec<f64>>> {
        let skip_label = if table.schema() == &self.schema {
            false
        } else if self.matches_without_label(table.schema()) {
            true
        } else {
            return Err(Error::SchemaMismatch("table does not match the classifier's training schema".into()));
        };
        Ok(table
            .rows()
            .iter()
            .map(|r| self.row_features(r, skip_label))
            .collect())
    }

    fn matches_without_label(&self, other: &TableSchema) -> bool {
        let ours: Vec<_> = self
            .schema
            .columns()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.label)
            .map(|(_, c)| c)
            .collect();
        ours.len() == other.len() && ours.iter().zip(other.columns()).all(|(a, b)| *a == b)
    }

    /// Feature rows and class labels of a labeled table.
    pub fn design(&self, table: &DataTable) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
        if table.schema() != &self.schema {
            return Err(Error::SchemaMismatch("training table schema differs".into()));
        }
        if table.is_empty() {
            return Err(Error::EmptyTable);
        }
        let x = self.matrix(table)?;
        let y = table.categories_of(self.label);
        Ok((x, y))
    }
}

/// Per-feature standardization fitted on training rows. Constant features
/// keep unit scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    /// Fits on the features where `mask` is true; the rest pass through.
    pub fn fit(x: &[Vec<f64>], mask: &[bool]) -> Self {
        let n = x.len().max(1) as f64;
        let d = mask.len();
        let mut mean = alloc::vec![0.0; d];
        let mut std = alloc::vec![1.0; d];
        for j in (0..d).filter(|&j| mask[j]) {
            let m = x.iter().map(|r| r[j]).sum::<f64>() / n;
            let v = x.iter().map(|r| (r[j] - m) * (r[j] - m)).sum::<f64>() / n;
            mean[j] = m;
            let s = libm::sqrt(v);
            std[j] = if s > 1e-12 { s } else { 1.0 };
        }
        Scaler { mean, std }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}
