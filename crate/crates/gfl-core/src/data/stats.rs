//! Column summaries, histograms, and a real-versus-synthetic fidelity score.

use super::dataset::TabularDataset;
use super::{DataError, Result};

/// Per-column summary statistics over the observed values.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSummary {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Population standard deviation (divides by `n`).
    pub sd: f64,
}

/// Summaries for every feature column, in schema order. Empty datasets are
/// rejected: a summary of nothing is meaningless.
pub fn summarize(dataset: &TabularDataset) -> Result<Vec<ColumnSummary>> {
    if dataset.is_empty() {
        return Err(DataError::Usage("cannot summarize an empty dataset".into()));
    }
    let n = dataset.len() as f64;
    let mut out = Vec::with_capacity(dataset.schema().feature_count());
    for (idx, col) in dataset.schema().columns().iter().enumerate() {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for row in dataset.rows() {
            let v = row[idx];
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        let mean = sum / n;
        let var = dataset
            .rows()
            .iter()
            .map(|r| {
                let d = r[idx] - mean;
                d * d
            })
            .sum::<f64>()
            / n;
        out.push(ColumnSummary {
            name: col.name.clone(),
            min,
            max,
            mean,
            sd: var.sqrt(),
        });
    }
    Ok(out)
}

/// A histogram over a column's full schema range.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` edges spanning the column's schema range.
    pub edges: Vec<f64>,
    /// One count per bin; sums to the dataset's row count.
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Counts normalized to proportions.
    pub fn proportions(&self) -> Vec<f64> {
        let total: usize = self.counts.iter().sum();
        if total == 0 {
            return vec![0.0; self.counts.len()];
        }
        self.counts
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect()
    }
}

/// Histogram of one feature column with `bins` equal-width bins over the
/// column's schema range (not the observed range, so histograms of two
/// datasets under the same schema are comparable bin by bin). Values equal
/// to the range maximum land in the last bin.
pub fn histogram(dataset: &TabularDataset, column: &str, bins: usize) -> Result<Histogram> {
    if bins == 0 {
        return Err(DataError::Usage("histogram needs at least one bin".into()));
    }
    let idx = dataset.schema().column_index(column)?;
    let col = &dataset.schema().columns()[idx];
    let width = (col.max - col.min) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| col.min + width * i as f64).collect();
    let mut counts = vec![0usize; bins];
    for row in dataset.rows() {
        let mut bin = ((row[idx] - col.min) / width) as usize;
        if bin >= bins {
            bin = bins - 1;
        }
        counts[bin] += 1;
    }
    Ok(Histogram { edges, counts })
}

/// Distributional fidelity of a synthetic dataset against a real one:
/// per feature column, the histogram intersection
/// `sum_i min(p_real_i, p_synth_i)` over `bins` shared bins. 1 means the
/// binned distributions coincide, 0 means they are disjoint.
///
/// Both datasets must share a schema and be non-empty.
pub fn fidelity_report(
    real: &TabularDataset,
    synthetic: &TabularDataset,
    bins: usize,
) -> Result<Vec<(String, f64)>> {
    if real.schema() != synthetic.schema() {
        return Err(DataError::Usage(
            "fidelity_report needs both datasets on the same schema".into(),
        ));
    }
    if real.is_empty() || synthetic.is_empty() {
        return Err(DataError::Usage(
            "fidelity_report needs non-empty datasets".into(),
        ));
    }
    let mut out = Vec::with_capacity(real.schema().feature_count());
    for col in real.schema().columns() {
        let hr = histogram(real, &col.name, bins)?.proportions();
        let hs = histogram(synthetic, &col.name, bins)?.proportions();
        let overlap: f64 = hr.iter().zip(&hs).map(|(&a, &b)| a.min(b)).sum();
        out.push((col.name.clone(), overlap));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::schema::{Column, FeatureSchema};
    use super::*;

    fn toy_schema() -> FeatureSchema {
        FeatureSchema::new(
            vec![
                Column::continuous("a", 0.0, 10.0),
                Column::integer_coded("b", 0.0, 3.0),
            ],
            "y",
        )
        .unwrap()
    }

    fn toy_ds(rows: Vec<Vec<f64>>) -> TabularDataset {
        let labels = vec![0; rows.len()];
        TabularDataset::new(toy_schema(), rows, labels).unwrap()
    }

    #[test]
    fn summary_matches_hand_computed_moments() {
        // Column a: [2, 4, 6] -> min 2, max 6, mean 4, population sd
        // sqrt(((2-4)^2 + 0 + (6-4)^2)/3) = sqrt(8/3).
        let ds = toy_ds(vec![vec![2.0, 0.0], vec![4.0, 1.0], vec![6.0, 2.0]]);
        let s = &summarize(&ds).unwrap()[0];
        assert_eq!(s.min, 2.0);
        assert_eq!(s.max, 6.0);
        assert!((s.mean - 4.0).abs() < 1e-12);
        assert!((s.sd - (8.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn summarize_rejects_empty_datasets() {
        let ds = TabularDataset::empty(toy_schema());
        assert!(summarize(&ds).is_err());
    }

    #[test]
    fn histogram_spans_schema_range_and_counts_every_row() {
        // Schema range of a is [0, 10]; 5 bins of width 2.
        let ds = toy_ds(vec![
            vec![0.0, 0.0],
            vec![1.9, 0.0],
            vec![2.0, 0.0],
            vec![10.0, 0.0],
        ]);
        let h = histogram(&ds, "a", 5).unwrap();
        assert_eq!(h.edges.first(), Some(&0.0));
        assert_eq!(h.edges.last(), Some(&10.0));
        assert_eq!(h.counts, vec![2, 1, 0, 0, 1]);
        assert_eq!(h.counts.iter().sum::<usize>(), ds.len());
    }

    #[test]
    fn histogram_rejects_zero_bins_and_unknown_columns() {
        let ds = toy_ds(vec![vec![1.0, 0.0]]);
        assert!(histogram(&ds, "a", 0).is_err());
        assert!(histogram(&ds, "zz", 4).is_err());
    }

    #[test]
    fn fidelity_is_one_for_identical_data_and_drops_with_divergence() {
        let real = toy_ds(vec![vec![1.0, 0.0], vec![2.0, 1.0], vec![3.0, 2.0]]);
        let same = fidelity_report(&real, &real.clone(), 4).unwrap();
        assert!(same.iter().all(|(_, v)| (*v - 1.0).abs() < 1e-12));

        // All mass in the opposite half of the range: intersection 0.
        let far = toy_ds(vec![vec![9.0, 3.0], vec![8.5, 3.0], vec![9.9, 3.0]]);
        let report = fidelity_report(&real, &far, 4).unwrap();
        let a_score = report.iter().find(|(n, _)| n == "a").unwrap().1;
        assert_eq!(a_score, 0.0);
    }

    #[test]
    fn fidelity_requires_shared_schema() {
        let real = toy_ds(vec![vec![1.0, 0.0]]);
        let other_schema = FeatureSchema::new(
            vec![
                Column::continuous("a", 0.0, 5.0),
                Column::integer_coded("b", 0.0, 3.0),
            ],
            "y",
        )
        .unwrap();
        let other = TabularDataset::new(other_schema, vec![vec![1.0, 0.0]], vec![0]).unwrap();
        assert!(fidelity_report(&real, &other, 4).is_err());
    }
}
