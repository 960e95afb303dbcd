//! Schema-driven scaling of feature rows into the unit interval.
//!
//! Scaling parameters come from the schema's declared ranges, never from the
//! data, so two shards of the same corpus scale identically no matter how
//! the rows were split. That property is what lets federated clients train
//! on locally scaled shards and still aggregate meaningfully.

use super::dataset::TabularDataset;
use super::schema::{ColumnKind, FeatureSchema};
use super::{DataError, Result};

/// Invertible per-column map into `[0, 1]` derived from a schema.
///
/// Continuous columns map affinely from `[min, max]`; integer-coded columns
/// divide by their maximum code (preserving zero, so binary flags keep their
/// 0/1 reading).
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    schema: FeatureSchema,
}

impl Scaler {
    pub fn new(schema: FeatureSchema) -> Result<Self> {
        for col in schema.columns() {
            if col.kind == ColumnKind::IntegerCoded && col.max <= 0.0 {
                return Err(DataError::Schema(format!(
                    "integer-coded column '{}' needs a positive maximum to scale",
                    col.name
                )));
            }
        }
        Ok(Scaler { schema })
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    /// Scale one raw value of column `idx`.
    #[inline]
    pub fn scale_value(&self, idx: usize, value: f64) -> f64 {
        let col = &self.schema.columns()[idx];
        match col.kind {
            ColumnKind::Continuous => (value - col.min) / (col.max - col.min),
            ColumnKind::IntegerCoded => value / col.max,
        }
    }

    /// Invert [`Self::scale_value`]. Integer-coded columns round back to a
    /// whole code; all columns clamp into their legal range.
    #[inline]
    pub fn unscale_value(&self, idx: usize, scaled: f64) -> f64 {
        let col = &self.schema.columns()[idx];
        match col.kind {
            ColumnKind::Continuous => {
                (col.min + scaled * (col.max - col.min)).clamp(col.min, col.max)
            }
            ColumnKind::IntegerCoded => (scaled * col.max).round().clamp(col.min, col.max),
        }
    }

    pub fn scale_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.schema.feature_count() {
            return Err(DataError::Usage(format!(
                "row width {} does not match schema width {}",
                row.len(),
                self.schema.feature_count()
            )));
        }
        Ok(row
            .iter()
            .enumerate()
            .map(|(i, &v)| self.scale_value(i, v))
            .collect())
    }

    pub fn unscale_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.schema.feature_count() {
            return Err(DataError::Usage(format!(
                "row width {} does not match schema width {}",
                row.len(),
                self.schema.feature_count()
            )));
        }
        Ok(row
            .iter()
            .enumerate()
            .map(|(i, &v)| self.unscale_value(i, v))
            .collect())
    }
}

/// A dataset after scaling: plain numeric rows ready for a model, no longer
/// bound to the schema's raw ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledDataset {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl ScaledDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Scale a whole dataset, returning the model-ready rows and the scaler
/// that produced them (for inversion or for scaling further shards).
pub fn preprocess(dataset: &TabularDataset) -> Result<(ScaledDataset, Scaler)> {
    let scaler = Scaler::new(dataset.schema().clone())?;
    let rows = dataset
        .rows()
        .iter()
        .map(|r| scaler.scale_row(r))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        ScaledDataset {
            rows,
            labels: dataset.labels().to_vec(),
        },
        scaler,
    ))
}
