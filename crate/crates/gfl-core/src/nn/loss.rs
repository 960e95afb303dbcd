//! Binary cross-entropy on probabilities.

/// Probabilities are clamped to `[EPS, 1 - EPS]` inside every log so losses
/// stay finite even when a model saturates.
pub const PROB_EPS: f64 = 1e-7;

#[inline]
pub fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_EPS, 1.0 - PROB_EPS)
}

/// Binary cross-entropy of one prediction: `-(y ln p + (1-y) ln(1-p))`.
#[inline]
pub fn bce(prob: f64, label: u8) -> f64 {
    let p = clamp_prob(prob);
    if label == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Mean binary cross-entropy over a batch. Empty input yields 0.
pub fn loss_bce(probs: &[f64], labels: &[u8]) -> f64 {
    assert_eq!(
        probs.len(),
        labels.len(),
        "loss_bce needs one label per probability"
    );
    if probs.is_empty() {
        return 0.0;
    }
    let sum: f64 = probs.iter().zip(labels).map(|(&p, &y)| bce(p, y)).sum();
    sum / probs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    // Hand-evaluated natural logs used as fixed oracles.
    const LN_2: f64 = 0.693_147_180_559_945_3;
    const LN_10: f64 = 2.302_585_092_994_046;

    #[test]
    fn bce_at_half_is_ln_two_for_either_label() {
        assert!((bce(0.5, 1) - LN_2).abs() < 1e-12);
        assert!((bce(0.5, 0) - LN_2).abs() < 1e-12);
    }

    #[test]
    fn bce_penalizes_confident_mistakes() {
        // p = 0.1 with label 1 costs -ln(0.1) = ln(10).
        assert!((bce(0.1, 1) - LN_10).abs() < 1e-12);
        // p = 0.9 with label 0 costs the same by symmetry.
        assert!((bce(0.9, 0) - LN_10).abs() < 1e-12);
    }

    #[test]
    fn loss_bce_averages_per_sample_terms() {
        // -(ln 0.9 + ln 0.8) / 2, evaluated by hand.
        let expect = 0.328_504_066_972_036 / 2.0;
        let got = loss_bce(&[0.9, 0.8], &[1, 1]);
        assert!((got - expect).abs() < 1e-12, "got {got}, expect {expect}");
    }

    #[test]
    fn loss_bce_is_finite_at_saturated_probabilities() {
        let l = loss_bce(&[0.0, 1.0], &[1, 0]);
        assert!(l.is_finite());
        // Both terms are -ln(EPS).
        assert!((l - -PROB_EPS.ln()).abs() < 1e-9);
    }

    #[test]
    fn loss_bce_of_empty_batch_is_zero() {
        assert_eq!(loss_bce(&[], &[]), 0.0);
    }
}
