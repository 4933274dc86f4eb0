//! Schema-aware table storage and deterministic splitting.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::random;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ColumnKind {
    Continuous,
    Discrete { categories: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(flatten)]
    pub kind: ColumnKind,
}

impl Column {
    pub fn continuous(name: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Continuous,
        }
    }

    pub fn discrete<S: Into<String>>(
        name: impl Into<String>,
        categories: impl IntoIterator<Item = S>,
    ) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Discrete {
                categories: categories.into_iter().map(Into::into).collect(),
            },
        }
    }

    pub fn categories(&self) -> Option<&[String]> {
        match &self.kind {
            ColumnKind::Discrete { categories } => Some(categories),
            ColumnKind::Continuous => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, ColumnKind::Discrete { .. })
    }
}

/// Ordered column layout. At least one column must be discrete: the class
/// label is always a discrete column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema", into = "RawSchema")]
pub struct TableSchema {
    columns: Vec<Column>,
}

#[derive(Serialize, Deserialize)]
struct RawSchema {
    columns: Vec<Column>,
}

impl TryFrom<RawSchema> for TableSchema {
    type Error = Error;
    fn try_from(raw: RawSchema) -> Result<Self> {
        TableSchema::new(raw.columns)
    }
}

impl From<TableSchema> for RawSchema {
    fn from(s: TableSchema) -> Self {
        RawSchema { columns: s.columns }
    }
}

impl TableSchema {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for c in &columns {
            if c.name.is_empty() {
                return Err(Error::InvalidSchema("empty column name".into()));
            }
            if !names.insert(c.name.as_str()) {
                return Err(Error::InvalidSchema(format!("duplicate column `{}`", c.name)));
            }
            if let Some(cats) = c.categories() {
                if cats.is_empty() {
                    return Err(Error::InvalidSchema(format!(
                        "discrete column `{}` has no categories",
                        c.name
                    )));
                }
                let unique: BTreeSet<&str> = cats.iter().map(String::as_str).collect();
                if unique.len() != cats.len() {
                    return Err(Error::InvalidSchema(format!(
                        "duplicate category in column `{}`",
                        c.name
                    )));
                }
            }
        }
        if !columns.iter().any(Column::is_discrete) {
            return Err(Error::InvalidSchema("at least one discrete column is required".into()));
        }
        Ok(TableSchema { columns })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn discrete_index(&self, name: &str) -> Result<usize> {
        let idx = self.column_index(name)?;
        if self.columns[idx].is_discrete() {
            Ok(idx)
        } else {
            Err(Error::NotDiscrete(name.to_string()))
        }
    }

    pub fn category_index(&self, column: usize, category: &str) -> Result<usize> {
        let col = &self.columns[column];
        let cats = col
            .categories()
            .ok_or_else(|| Error::NotDiscrete(col.name.clone()))?;
        cats.iter()
            .position(|c| c == category)
            .ok_or_else(|| Error::UnknownCategory {
                column: col.name.clone(),
                category: category.to_string(),
            })
    }

    /// Number of continuous columns (N).
    pub fn continuous_count(&self) -> usize {
        self.columns.iter().filter(|c| !c.is_discrete()).count()
    }

    /// Number of discrete columns (M).
    pub fn discrete_count(&self) -> usize {
        self.columns.iter().filter(|c| c.is_discrete()).count()
    }

    /// `(column index, categories)` for each discrete column in schema order.
    pub fn discrete_columns(&self) -> impl Iterator<Item = (usize, &[String])> {
        self.columns
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.categories().map(|cats| (i, cats)))
    }

    pub fn continuous_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_discrete())
            .map(|(i, _)| i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Continuous(f64),
    Discrete(usize),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Continuous(x) => Some(x),
            Value::Discrete(_) => None,
        }
    }

    pub fn as_category(&self) -> Option<usize> {
        match *self {
            Value::Discrete(k) => Some(k),
            Value::Continuous(_) => None,
        }
    }
}

pub type Row = Vec<Value>;

/// Rows validated against a schema: width, cell kinds, category ranges and
/// finiteness are all checked on insertion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataTable {
    schema: TableSchema,
    rows: Vec<Row>,
}

impl DataTable {
    pub fn empty(schema: TableSchema) -> Self {
        DataTable {
            schema,
            rows: Vec::new(),
        }
    }

    pub fn new(schema: TableSchema, rows: Vec<Row>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            validate_row(&schema, row, i)?;
        }
        Ok(DataTable { schema, rows })
    }

    pub fn push(&mut self, row: Row) -> Result<()> {
        validate_row(&self.schema, &row, self.rows.len())?;
        self.rows.push(row);
        Ok(())
    }

    pub fn schema(&self) -> &TableSchema {
        &self.schema
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn into_rows(self) -> Vec<Row> {
        self.rows
    }

    /// New table holding the rows at `indices` (in that order).
    pub fn select(&self, indices: &[usize]) -> DataTable {
        DataTable {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    pub fn continuous_values(&self, column: usize) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r[column].as_f64()).collect()
    }

    pub fn categories_of(&self, column: usize) -> Vec<usize> {
        self.rows.iter().filter_map(|r| r[column].as_category()).collect()
    }

    /// Appends all rows of `other`; the schemas must be identical.
    pub fn concat(&self, other: &DataTable) -> Result<DataTable> {
        if self.schema != other.schema {
            return Err(Error::SchemaMismatch("tables have different schemas".into()));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(DataTable {
            schema: self.schema.clone(),
            rows,
        })
    }
}

fn validate_row(schema: &TableSchema, row: &Row, index: usize) -> Result<()> {
    if row.len() != schema.len() {
        return Err(Error::RaggedRow {
            row: index,
            expected: schema.len(),
            found: row.len(),
        });
    }
    for (col, value) in schema.columns().iter().zip(row) {
        let bad = |reason: &str| Error::BadCell {
            row: index,
            column: col.name.clone(),
            reason: reason.to_string(),
        };
        match (&col.kind, value) {
            (ColumnKind::Continuous, Value::Continuous(x)) => {
                if !x.is_finite() {
                    return Err(bad("non-finite value"));
                }
            }
            (ColumnKind::Discrete { categories }, Value::Discrete(k)) => {
                if *k >= categories.len() {
                    return Err(bad("category index out of range"));
                }
            }
            (ColumnKind::Continuous, Value::Discrete(_)) => {
                return Err(bad("expected a continuous value"))
            }
            (ColumnKind::Discrete { .. }, Value::Continuous(_)) => {
                return Err(bad("expected a category"))
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    train_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Result<Self> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::invalid("train fraction must lie strictly between 0 and 1"));
        }
        Ok(SplitSpec {
            train_fraction,
            seed,
        })
    }

    pub fn train_fraction(&self) -> f64 {
        self.train_fraction
    }
}

/// Shuffled row indices split into `(train, test)`; the train side holds
/// `floor(train_fraction * n)` indices.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::TooFewRows(format!("cannot split {n} rows")));
    }
    let n_train = libm::floor(spec.train_fraction * n as f64) as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::TooFewRows(format!(
            "fraction {} of {n} rows leaves one side empty",
            spec.train_fraction
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = random::seeded(spec.seed);
    random::shuffle(&mut rng, &mut idx);
    let test = idx.split_off(n_train);
    Ok((idx, test))
}

pub fn split_train_test(table: &DataTable, spec: &SplitSpec) -> Result<(DataTable, DataTable)> {
    let (train, test) = split_indices(table.len(), spec)?;
    Ok((table.select(&train), table.select(&test)))
}

/// Per-category counts of a discrete column, in schema category order.
pub fn class_counts(table: &DataTable, column: &str) -> Result<Vec<(String, usize)>> {
    let idx = table.schema().discrete_index(column)?;
    let cats = table.schema().columns()[idx].categories().unwrap_or_default();
    let mut counts = alloc::vec![0usize; cats.len()];
    for k in table.categories_of(idx) {
        counts[k] += 1;
    }
    Ok(cats.iter().cloned().zip(counts).collect())
}

/// Shuffled assignment of `n` rows to `k` folds of near-equal size.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::invalid("need at least two folds"));
    }
    if n < k {
        return Err(Error::TooFewRows(format!("{n} rows cannot fill {k} folds")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = random::seeded(seed);
    random::shuffle(&mut rng, &mut idx);
    let mut folds = alloc::vec![Vec::new(); k];
    for (i, row) in idx.into_iter().enumerate() {
        folds[i % k].push(row);
    }
    Ok(folds)
}

/// Row indices grouped by their category in discrete column `column`.
pub(crate) fn rows_by_category(table: &DataTable, column: usize) -> Vec<Vec<usize>> {
    let n_cats = table.schema().columns()[column]
        .categories()
        .map_or(0, <[String]>::len);
    let mut by_cat = alloc::vec![Vec::new(); n_cats];
    for (i, row) in table.rows().iter().enumerate() {
        if let Some(k) = row[column].as_category() {
            by_cat[k].push(i);
        }
    }
    by_cat
}
