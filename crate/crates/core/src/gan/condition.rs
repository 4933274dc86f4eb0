use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::random::Sampling;
use crate::table::{DataTable, TableSchema};
use crate::{Error, Result};

/// One block per discrete column, in schema order: `(column, offset, categories)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CondLayout {
    pub blocks: Vec<(usize, usize, usize)>,
    pub width: usize,
}

impl CondLayout {
    pub fn new(schema: &TableSchema) -> Self {
        let mut blocks = Vec::new();
        let mut offset = 0;
        for (column, cats) in schema.discrete_columns() {
            blocks.push((column, offset, cats.len()));
            offset += cats.len();
        }
        CondLayout {
            blocks,
            width: offset,
        }
    }

    pub fn block(&self, column: usize) -> Option<(usize, usize)> {
        self.blocks
            .iter()
            .find(|b| b.0 == column)
            .map(|&(_, off, len)| (off, len))
    }
}

/// A chosen `(discrete column, category)` with its mask vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub column: usize,
    pub category: usize,
    pub vector: Vec<f64>,
}

impl Condition {
    pub fn new(layout: &CondLayout, column: usize, category: usize) -> Result<Self> {
        let (offset, len) = layout
            .block(column)
            .ok_or_else(|| Error::NotDiscrete(alloc::format!("#{column}")))?;
        if category >= len {
            return Err(Error::invalid("category index out of range"));
        }
        let mut vector = vec![0.0; layout.width];
        vector[offset + category] = 1.0;
        Ok(Condition {
            column,
            category,
            vector,
        })
    }
}

pub fn build_condition(schema: &TableSchema, column: &str, category: &str) -> Result<Condition> {
    let col = schema.discrete_index(column)?;
    let cat = schema.category_index(col, category)?;
    Condition::new(&CondLayout::new(schema), col, cat)
}

/// Training-by-sampling: a discrete column is chosen uniformly, then a
/// category with probability proportional to `ln(1 + count)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSampler {
    layout: CondLayout,
    log_weights: Vec<Vec<f64>>,
}

impl ConditionSampler {
    /// `counts[i]` are the category counts of the `i`-th discrete column.
    pub fn from_counts(schema: &TableSchema, counts: &[Vec<usize>]) -> Result<Self> {
        let layout = CondLayout::new(schema);
        if counts.len() != layout.blocks.len()
            || counts.iter().zip(&layout.blocks).any(|(c, b)| c.len() != b.2)
        {
            return Err(Error::SchemaMismatch("category counts do not match schema".into()));
        }
        if !counts.is_empty() && counts.iter().all(|c| c.iter().all(|&n| n == 0)) {
            return Err(Error::EmptyTable);
        }
        let log_weights = counts
            .iter()
            .map(|c| c.iter().map(|&n| libm::log(1.0 + n as f64)).collect())
            .collect();
        Ok(ConditionSampler {
            layout,
            log_weights,
        })
    }

    pub fn from_table(table: &DataTable) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::EmptyTable);
        }
        ConditionSampler::from_counts(table.schema(), &category_counts(table))
    }

    pub fn layout(&self) -> &CondLayout {
        &self.layout
    }

    /// Probability of each category of the `block`-th discrete column given
    /// that column is chosen.
    pub fn category_probabilities(&self, block: usize) -> Vec<f64> {
        let w = &self.log_weights[block];
        let total: f64 = w.iter().sum();
        w.iter().map(|x| x / total).collect()
    }

    /// `None` when the schema has no discrete column to condition on.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Option<Condition> {
        // a column with all-zero counts cannot be conditioned on
        let usable: Vec<usize> = (0..self.layout.blocks.len())
            .filter(|&b| self.log_weights[b].iter().any(|&w| w > 0.0))
            .collect();
        if usable.is_empty() {
            return None;
        }
        let block = usable[rng.below(usable.len())];
        let category = rng.weighted_index(&self.log_weights[block]);
        let (column, _, _) = self.layout.blocks[block];
        Some(Condition::new(&self.layout, column, category).expect("category drawn from layout"))
    }
}

/// Category counts for every discrete column, in schema order.
pub fn category_counts(table: &DataTable) -> Vec<Vec<usize>> {
    table
        .schema()
        .discrete_columns()
        .map(|(column, cats)| {
            let mut c = vec![0usize; cats.len()];
            for k in table.categories_of(column) {
                c[k] += 1;
            }
            c
        })
        .collect()
}

pub fn sample_condition<R: RngCore + ?Sized>(table: &DataTable, rng: &mut R) -> Result<Condition> {
    ConditionSampler::from_table(table)?
        .sample(rng)
        .ok_or_else(|| Error::invalid("table has no discrete column"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::seeded;
    use crate::table::{Column, Value};

    fn schema2() -> TableSchema {
        TableSchema::new(vec![
            Column::continuous("x"),
            Column::discrete("a", ["p", "q"]),
            Column::discrete("b", ["u", "v", "w"]),
        ])
        .unwrap()
    }

    #[test]
    fn single_column_condition() {
        let s = TableSchema::new(vec![Column::discrete("label", ["Fire", "NoFire"])]).unwrap();
        assert_eq!(build_condition(&s, "label", "Fire").unwrap().vector, vec![1.0, 0.0]);
    }

    #[test]
    fn two_column_layout() {
        let c = build_condition(&schema2(), "b", "w").unwrap();
        assert_eq!(c.vector, vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!((c.column, c.category), (2, 2));
    }

    #[test]
    fn condition_errors() {
        let s = schema2();
        assert!(matches!(build_condition(&s, "a", "Blaze"), Err(Error::UnknownCategory { .. })));
        assert!(matches!(build_condition(&s, "x", "p"), Err(Error::NotDiscrete(_))));
        assert!(matches!(build_condition(&s, "zz", "p"), Err(Error::UnknownColumn(_))));
    }

    fn table_with_counts(a: usize, b: usize) -> DataTable {
        let s = TableSchema::new(vec![Column::discrete("label", ["A", "B"])]).unwrap();
        let rows = (0..a + b)
            .map(|i| vec![Value::Discrete(usize::from(i >= a))])
            .collect();
        DataTable::new(s, rows).unwrap()
    }

    #[test]
    fn log_frequency_probabilities() {
        let s = ConditionSampler::from_table(&table_with_counts(90, 10)).unwrap();
        let p = s.category_probabilities(0);
        let want = 91f64.ln() / (91f64.ln() + 11f64.ln());
        assert!((p[0] - want).abs() < 1e-12);
        assert!((p[0] - 0.653).abs() < 1e-3);
        let s = ConditionSampler::from_table(&table_with_counts(50, 50)).unwrap();
        assert_eq!(s.category_probabilities(0), vec![0.5, 0.5]);
    }

    #[test]
    fn single_category_always_drawn() {
        let s = TableSchema::new(vec![Column::discrete("only", ["z"])]).unwrap();
        let t = DataTable::new(s, vec![vec![Value::Discrete(0)]; 3]).unwrap();
        let mut r = seeded(0);
        for _ in 0..100 {
            assert_eq!(sample_condition(&t, &mut r).unwrap().category, 0);
        }
    }

    #[test]
    fn empty_table_rejected() {
        let t = table_with_counts(0, 0);
        let mut r = seeded(0);
        assert_eq!(sample_condition(&t, &mut r), Err(Error::EmptyTable));
    }
}
