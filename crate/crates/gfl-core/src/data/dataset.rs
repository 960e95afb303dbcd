//! In-memory tabular datasets.

use super::schema::FeatureSchema;
use super::{DataError, Result};

/// A schema-conforming table: feature rows plus binary labels.
///
/// Invariants, enforced on construction and on every push: each row has
/// exactly `schema.feature_count()` values, every value satisfies its
/// column's kind and range, and there is one 0/1 label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset {
    schema: FeatureSchema,
    rows: Vec<Vec<f64>>,
    labels: Vec<u8>,
}

impl TabularDataset {
    pub fn empty(schema: FeatureSchema) -> Self {
        TabularDataset {
            schema,
            rows: Vec::new(),
            labels: Vec::new(),
        }
    }

    /// Build from parallel row and label lists, validating everything.
    pub fn new(schema: FeatureSchema, rows: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(DataError::Usage(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let mut ds = TabularDataset::empty(schema);
        for (row, label) in rows.into_iter().zip(labels) {
            ds.push(row, label)?;
        }
        Ok(ds)
    }

    /// Append one validated row. The error names the offending record as
    /// record `len() + 1` (1-based).
    pub fn push(&mut self, row: Vec<f64>, label: u8) -> Result<()> {
        let record = self.rows.len() + 1;
        if row.len() != self.schema.feature_count() {
            return Err(DataError::FieldCount {
                path: "<memory>".into(),
                record,
                expected: self.schema.feature_count() + 1,
                found: row.len() + 1,
            });
        }
        for (i, &v) in row.iter().enumerate() {
            self.schema.validate_value(i, v, record)?;
        }
        if label > 1 {
            return Err(DataError::Label {
                record,
                column: self.schema.target_name().to_string(),
                value: f64::from(label),
            });
        }
        self.rows.push(row);
        self.labels.push(label);
        Ok(())
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Count of (negative, positive) labels.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        (self.labels.len() - pos, pos)
    }

    /// New dataset holding the given row indices, in the given order.
    /// Indices must be in bounds; duplicates are allowed (sampling with
    /// replacement produces them).
    pub fn subset(&self, indices: &[usize]) -> Result<TabularDataset> {
        let mut rows = Vec::with_capacity(indices.len());
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.rows.len() {
                return Err(DataError::Usage(format!(
                    "row index {i} out of bounds for {} rows",
                    self.rows.len()
                )));
            }
            rows.push(self.rows[i].clone());
            labels.push(self.labels[i]);
        }
        // Rows were validated on entry; skip re-validation.
        Ok(TabularDataset {
            schema: self.schema.clone(),
            rows,
            labels,
        })
    }

    /// One column of feature values.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.schema.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }
}
