//! Feature schemas for tabular datasets.

use super::{DataError, Result};

/// How a column's values behave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    /// Real-valued inside `[min, max]`.
    Continuous,
    /// Integer codes inside `[min, max]` (categories or counts stored as
    /// numbers). Values must be whole.
    IntegerCoded,
}

/// One feature column: name, kind, and legal closed range.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub min: f64,
    pub max: f64,
}

impl Column {
    pub fn continuous(name: &str, min: f64, max: f64) -> Self {
        Column {
            name: name.to_string(),
            kind: ColumnKind::Continuous,
            min,
            max,
        }
    }

    pub fn integer_coded(name: &str, min: f64, max: f64) -> Self {
        Column {
            name: name.to_string(),
            kind: ColumnKind::IntegerCoded,
            min,
            max,
        }
    }
}

/// Ordered feature columns plus the name of the binary target column.
///
/// The column order is the order of fields in every dataset row and every
/// CSV record; the target always comes last in files.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSchema {
    columns: Vec<Column>,
    target: String,
}

impl FeatureSchema {
    pub fn new(columns: Vec<Column>, target: &str) -> Result<Self> {
        if columns.is_empty() {
            return Err(DataError::Schema("schema needs at least one column".into()));
        }
        if target.is_empty() {
            return Err(DataError::Schema("target name must be non-empty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for col in &columns {
            if col.name.is_empty() {
                return Err(DataError::Schema("column names must be non-empty".into()));
            }
            if col.name == target {
                return Err(DataError::Schema(format!(
                    "column '{}' collides with the target name",
                    col.name
                )));
            }
            if !seen.insert(col.name.clone()) {
                return Err(DataError::Schema(format!(
                    "duplicate column name '{}'",
                    col.name
                )));
            }
            if !col.min.is_finite() || !col.max.is_finite() || col.min >= col.max {
                return Err(DataError::Schema(format!(
                    "column '{}' has invalid range [{}, {}]",
                    col.name, col.min, col.max
                )));
            }
            if col.kind == ColumnKind::IntegerCoded
                && (col.min.fract() != 0.0 || col.max.fract() != 0.0)
            {
                return Err(DataError::Schema(format!(
                    "integer-coded column '{}' has non-integer bounds [{}, {}]",
                    col.name, col.min, col.max
                )));
            }
        }
        Ok(FeatureSchema {
            columns,
            target: target.to_string(),
        })
    }

    /// The heart-condition screening schema used by the bundled corpus:
    /// thirteen clinical features and a binary diagnosis target.
    pub fn heart() -> Self {
        FeatureSchema::new(
            vec![
                Column::continuous("age", 32.0, 76.0),
                Column::integer_coded("sex", 0.0, 1.0),
                Column::continuous("trestbps", 98.0, 200.0),
                Column::integer_coded("cp", 0.0, 3.0),
                Column::continuous("chol", 126.0, 409.0),
                Column::continuous("oldpeak", 0.0, 4.4),
                Column::integer_coded("restecg", 0.0, 2.0),
                Column::integer_coded("fbs", 0.0, 1.0),
                Column::integer_coded("exang", 0.0, 1.0),
                Column::continuous("thalach", 81.0, 199.0),
                Column::integer_coded("ca", 0.0, 4.0),
                Column::integer_coded("thal", 0.0, 3.0),
                Column::integer_coded("slope", 0.0, 2.0),
            ],
            "target",
        )
        .expect("static schema is valid")
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn feature_count(&self) -> usize {
        self.columns.len()
    }

    pub fn target_name(&self) -> &str {
        &self.target
    }

    /// Feature names followed by the target name: the CSV header.
    pub fn header(&self) -> Vec<&str> {
        self.columns
            .iter()
            .map(|c| c.name.as_str())
            .chain(std::iter::once(self.target.as_str()))
            .collect()
    }

    /// Index of a feature column by name.
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| DataError::UnknownColumn(name.to_string()))
    }

    /// Check one feature value against its column's kind and range.
    /// `record` is only used to label the error.
    pub fn validate_value(&self, column: usize, value: f64, record: usize) -> Result<()> {
        let col = &self.columns[column];
        if !value.is_finite() || value < col.min || value > col.max {
            return Err(DataError::Range {
                record,
                column: col.name.clone(),
                value,
                min: col.min,
                max: col.max,
            });
        }
        if col.kind == ColumnKind::IntegerCoded && value.fract() != 0.0 {
            return Err(DataError::NotInteger {
                record,
                column: col.name.clone(),
                value,
            });
        }
        Ok(())
    }
}
