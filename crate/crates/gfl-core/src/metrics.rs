//! Binary classification metrics.

use crate::error::{CoreError, Result};

/// Counts of the four prediction outcomes. Positive class is label 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_neg: usize,
}

impl ConfusionMatrix {
    /// Tally hard predictions against labels.
    pub fn from_predictions(predictions: &[u8], labels: &[u8]) -> Result<Self> {
        if predictions.len() != labels.len() {
            return Err(CoreError::Usage(format!(
                "{} predictions but {} labels",
                predictions.len(),
                labels.len()
            )));
        }
        let mut cm = ConfusionMatrix::default();
        for (&p, &y) in predictions.iter().zip(labels) {
            match (p, y) {
                (1, 1) => cm.true_pos += 1,
                (1, 0) => cm.false_pos += 1,
                (0, 1) => cm.false_neg += 1,
                (0, 0) => cm.true_neg += 1,
                _ => {
                    return Err(CoreError::Usage(format!(
                        "predictions and labels must be 0 or 1, saw ({p}, {y})"
                    )))
                }
            }
        }
        Ok(cm)
    }

    /// Tally probabilities against labels with the decision rule
    /// `p >= threshold -> positive`.
    pub fn from_probabilities(probs: &[f64], labels: &[u8], threshold: f64) -> Result<Self> {
        let predictions: Vec<u8> = probs.iter().map(|&p| u8::from(p >= threshold)).collect();
        ConfusionMatrix::from_predictions(&predictions, labels)
    }

    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    /// Merge counts from another matrix (e.g. per-shard evaluation).
    pub fn merge(&mut self, other: &ConfusionMatrix) {
        self.true_pos += other.true_pos;
        self.false_pos += other.false_pos;
        self.false_neg += other.false_neg;
        self.true_neg += other.true_neg;
    }
}

/// Headline metrics derived from a confusion matrix. Ratios whose
/// denominator is zero are reported as `None` rather than an arbitrary
/// number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricBundle {
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f_score: Option<f64>,
}

/// Accuracy, precision, recall, and F1 from outcome counts. An empty
/// matrix is a usage error.
pub fn metrics_from(cm: &ConfusionMatrix) -> Result<MetricBundle> {
    let total = cm.total();
    if total == 0 {
        return Err(CoreError::Usage(
            "cannot compute metrics from an empty confusion matrix".into(),
        ));
    }
    let accuracy = (cm.true_pos + cm.true_neg) as f64 / total as f64;
    let precision = ratio(cm.true_pos, cm.true_pos + cm.false_pos);
    let recall = ratio(cm.true_pos, cm.true_pos + cm.false_neg);
    let f_score = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    Ok(MetricBundle {
        accuracy,
        precision,
        recall,
        f_score,
    })
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    if den == 0 {
        None
    } else {
        Some(num as f64 / den as f64)
    }
}

/// Mean of each round's epoch-final training losses across participating
/// nodes: one value per round, in round order. Rounds with no participants
/// yield `None`.
pub fn loss_curve(per_round_final_losses: &[Vec<f64>]) -> Vec<Option<f64>> {
    per_round_final_losses
        .iter()
        .map(|round| {
            if round.is_empty() {
                None
            } else {
                Some(round.iter().sum::<f64>() / round.len() as f64)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_a_hand_tallied_example() {
        let preds = [1u8, 1, 0, 0, 1, 0];
        let labels = [1u8, 0, 0, 1, 1, 0];
        let cm = ConfusionMatrix::from_predictions(&preds, &labels).unwrap();
        assert_eq!(cm.true_pos, 2);
        assert_eq!(cm.false_pos, 1);
        assert_eq!(cm.false_neg, 1);
        assert_eq!(cm.true_neg, 2);
        assert_eq!(cm.total(), 6);
    }

    #[test]
    fn metrics_match_hand_computed_ratios() {
        // tp=2 fp=1 fn=1 tn=2: acc 4/6, precision 2/3, recall 2/3, f1 2/3.
        let cm = ConfusionMatrix {
            true_pos: 2,
            false_pos: 1,
            false_neg: 1,
            true_neg: 2,
        };
        let m = metrics_from(&cm).unwrap();
        assert!((m.accuracy - 4.0 / 6.0).abs() < 1e-12);
        assert!((m.precision.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.recall.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.f_score.unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_denominators_become_none_not_numbers() {
        // Never predicts positive and no positives exist: precision and
        // recall are both undefined.
        let cm = ConfusionMatrix {
            true_pos: 0,
            false_pos: 0,
            false_neg: 0,
            true_neg: 5,
        };
        let m = metrics_from(&cm).unwrap();
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, None);
        assert_eq!(m.f_score, None);

        // Predicts positive sometimes but no true positives: defined zeros.
        let cm = ConfusionMatrix {
            true_pos: 0,
            false_pos: 2,
            false_neg: 3,
            true_neg: 5,
        };
        let m = metrics_from(&cm).unwrap();
        assert_eq!(m.precision, Some(0.0));
        assert_eq!(m.recall, Some(0.0));
        assert_eq!(m.f_score, Some(0.0));
    }

    #[test]
    fn empty_matrix_is_rejected() {
        assert!(metrics_from(&ConfusionMatrix::default()).is_err());
    }

    #[test]
    fn threshold_rule_is_inclusive_at_the_boundary() {
        let cm = ConfusionMatrix::from_probabilities(&[0.5, 0.499], &[1, 1], 0.5).unwrap();
        assert_eq!(cm.true_pos, 1);
        assert_eq!(cm.false_neg, 1);
    }

    #[test]
    fn merge_adds_counts() {
        let mut a = ConfusionMatrix::from_predictions(&[1, 0], &[1, 0]).unwrap();
        let b = ConfusionMatrix::from_predictions(&[0, 1], &[1, 0]).unwrap();
        a.merge(&b);
        assert_eq!(a.total(), 4);
        assert_eq!(a.true_pos, 1);
        assert_eq!(a.false_neg, 1);
        assert_eq!(a.false_pos, 1);
        assert_eq!(a.true_neg, 1);
    }

    #[test]
    fn loss_curve_averages_per_round() {
        let curve = loss_curve(&[vec![0.6, 0.4], vec![0.3], vec![]]);
        assert_eq!(curve.len(), 3);
        assert!((curve[0].unwrap() - 0.5).abs() < 1e-12);
        assert!((curve[1].unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(curve[2], None);
    }
}
