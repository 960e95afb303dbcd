//! CSV load and save for schema-conforming datasets.
//!
//! Files carry a header (feature names in schema order, then the target
//! name) and one record per row. Values are written with Rust's shortest
//! round-trip float formatting, so `save_csv` followed by `load_csv`
//! reproduces the dataset bit for bit.

use std::path::Path;

use super::dataset::TabularDataset;
use super::schema::FeatureSchema;
use super::{DataError, Result};

/// Load a dataset, validating the header and every record against `schema`.
/// Record numbers in errors are 1-based (the first data record is 1).
pub fn load_csv(path: &Path, schema: &FeatureSchema) -> Result<TabularDataset> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| wrap_csv(&display, e))?;

    let header = reader
        .headers()
        .map_err(|e| wrap_csv(&display, e))?
        .clone();
    let expected = schema.header();
    if header.len() != expected.len() {
        return Err(DataError::FieldCount {
            path: display,
            record: 0,
            expected: expected.len(),
            found: header.len(),
        });
    }
    for (index, (found, &expect)) in header.iter().zip(&expected).enumerate() {
        if found != expect {
            return Err(DataError::Header {
                path: display,
                index,
                expected: expect.to_string(),
                found: found.to_string(),
            });
        }
    }

    let mut ds = TabularDataset::empty(schema.clone());
    for (i, record) in reader.records().enumerate() {
        let record_no = i + 1;
        let record = record.map_err(|e| wrap_csv(&display, e))?;
        if record.len() != expected.len() {
            return Err(DataError::FieldCount {
                path: display,
                record: record_no,
                expected: expected.len(),
                found: record.len(),
            });
        }
        let mut row = Vec::with_capacity(schema.feature_count());
        for (col, field) in record.iter().take(schema.feature_count()).enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| DataError::Parse {
                record: record_no,
                column: schema.columns()[col].name.clone(),
                value: field.to_string(),
            })?;
            schema.validate_value(col, value, record_no)?;
            row.push(value);
        }
        let raw_label = record.get(schema.feature_count()).expect("length checked");
        let label_value: f64 = raw_label.trim().parse().map_err(|_| DataError::Parse {
            record: record_no,
            column: schema.target_name().to_string(),
            value: raw_label.to_string(),
        })?;
        if label_value != 0.0 && label_value != 1.0 {
            return Err(DataError::Label {
                record: record_no,
                column: schema.target_name().to_string(),
                value: label_value,
            });
        }
        ds.push(row, label_value as u8).map_err(|e| relabel(e, record_no))?;
    }
    Ok(ds)
}

/// Record numbers from `TabularDataset::push` count from the dataset's own
/// length; replace them with the file's record number.
fn relabel(err: DataError, record: usize) -> DataError {
    match err {
        DataError::Range {
            column,
            value,
            min,
            max,
            ..
        } => DataError::Range {
            record,
            column,
            value,
            min,
            max,
        },
        DataError::NotInteger { column, value, .. } => DataError::NotInteger {
            record,
            column,
            value,
        },
        DataError::Label { column, value, .. } => DataError::Label {
            record,
            column,
            value,
        },
        other => other,
    }
}

fn wrap_csv(path: &str, source: csv::Error) -> DataError {
    DataError::Csv {
        path: path.to_string(),
        source,
    }
}

/// Write a dataset with its header. Creates or truncates `path`.
pub fn save_csv(dataset: &TabularDataset, path: &Path) -> Result<()> {
    let display = path.display().to_string();
    let mut writer = csv::Writer::from_path(path).map_err(|e| wrap_csv(&display, e))?;
    writer
        .write_record(dataset.schema().header())
        .map_err(|e| wrap_csv(&display, e))?;
    for (row, &label) in dataset.rows().iter().zip(dataset.labels()) {
        let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        record.push(label.to_string());
        writer
            .write_record(&record)
            .map_err(|e| wrap_csv(&display, e))?;
    }
    writer.flush().map_err(|e| DataError::Io {
        path: display,
        source: e,
    })?;
    Ok(())
}
